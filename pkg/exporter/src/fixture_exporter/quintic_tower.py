"""Dihedral quintic tower: L = Q[x]/(f) with disc(f) = q^2, its imaginary
quadratic partner K = Q(sqrt(-q)), and the compositum F = L(sqrt(-q)).

Requirements checked on the way in (``ComputationError`` otherwise): f is a
monic integer quintic with disc(f) = q^2 for a prime q = 3 (mod 4), the class
number of Q(sqrt(-q)) equals 5, the signature of L is (1, 2), and every
unramified prime below 3000 obeys the class-field splitting law of K (split
completely in L iff represented by the principal form of discriminant -q,
pattern (1, 2, 2) iff inert in K).  Under those hypotheses F is the Hilbert
class field of K: degree 10, totally imaginary, dihedral over Q.

Certificates produced along the way:

1. Z[theta] is maximal: disc(f) = q^2 leaves d_L in {q^2, 1} and no quintic
   field has |d_L| = 1, so d_L = q^2.  h_L = 1 whenever the Minkowski bound
   q * 120/5^5 * (4/pi)^2 is below 3 and f(0), f(1) are odd (no ideal of
   norm 2).
2. a fundamental pair of units of L: norm-form grid search, exact Lagrange
   reduction of the rank-2 log lattice, then saturation at every prime
   p <= 47 by witness characters — for ~25 split primes ell = 1 (mod p) the
   p-th-power characters of the generators mod ell form an F_p matrix whose
   kernel contains every unit class with a global p-th root; an empty kernel
   rules p out unconditionally.
3. analytic cross-check: res_{s=1} zeta_L = (2 pi)^2 R_L / q from the
   smoothed Moebius-convolved Dirichlet series of zeta_L; ~0.1% agreement
   also confirms the pair is fundamental (an index would scale the ratio).
4. exact embeddings of F: the rotation 5-cycle on the roots of f is found by
   exact rational reconstruction of X = b(theta) in the basis
   theta^i * omega^j (omega^2 = -q) with f(X) = 0 verified exactly, and the
   dihedral relations b^5 = 1, a b a = b^{-1} are checked exactly as well.
5. Gamma = U(L) U(L'): a fundamental pair and its rotated copy, LLL-reduced,
   saturated at every p <= 47 as above.  The zeta factorization
   zeta_F = zeta_K * zeta_L^2 / zeta^2, the conductor-discriminant identity
   |d_F| = |d_K| * |d_L|^2, and w_F = w_K = 2 (K is the only abelian
   subfield of F, so all roots of unity of F already lie in K) combine into
   the residue identity h_F * R_F = h_K * R_L^2.  With
   R_Gamma = [U(F):Gamma] * R_F, the pin h_K * R_L^2 / R_Gamma equals
   h_F / [U(F):Gamma]; it must land exactly on the integer 1, and the
   saturation excludes every prime <= 47 from the index, so a common value
   h_F = [U(F):Gamma] >= 53 would force R_F below the known regulator lower
   bounds for totally imaginary degree-10 fields: both are 1.  (The index is
   made of small primes a priori: in the integral group ring of the order-10
   dihedral group, sum_i (1 + a b^i) + sum_k b^k = 5 + sum_{g} g, so every
   unit u of F satisfies u^5 = +- prod_i N_{F/L_i}(u) — the five quintic
   norms land in the conjugate unit groups while N_{F/K}(u) and N_{F/Q}(u)
   are +-1 — hence the p = 5 saturation is the decisive certificate.)
6. Galois action matrices of the reflection and the rotation on the reduced
   fundamental units, verified EXACTLY in F (not only on logarithms), then
   cross-checked through the lattice machinery: the regulator constant of
   this unit lattice against the order-10 dihedral relation must equal 5,
   and the Gram determinant must equal 5 * R_F^2.

Throughout the private helpers, ``coeffs`` means the five trailing
coefficients (a4, a3, a2, a1, a0) of the monic quintic; the public entry
points accept the full descending coefficient tuple (1, a4, ..., a0) used by
the job layer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import isqrt

import mpmath as mp
import numpy as np
import sympy

from .errors import ComputationError
from .quadratics import compute_imaginary_quadratic

WORK_DPS = 250  # working precision of the closure numerics
REQUIRED_H_K = 5  # class number of Q(sqrt(-q)) must equal the degree of L

SAT_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


# --------------------------------------------------- splitting patterns mod p

def _pmulmod(u, v, f, p):
    """u*v mod (f, p); dense coefficient lists, low degree first, f monic."""
    c = [0] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                c[i + j] = (c[i + j] + ui * vj) % p
    df = len(f) - 1
    for k in range(len(c) - 1, df - 1, -1):
        ck = c[k]
        if ck:
            c[k] = 0
            for i in range(df):
                c[k - df + i] = (c[k - df + i] - ck * f[i]) % p
    out = c[:df]
    while len(out) < df:
        out.append(0)
    return [v % p for v in out]


def _xpowmod(e, f, p):
    """x^e mod (f, p)."""
    df = len(f) - 1
    result = [1] + [0] * (df - 1)
    base = [0, 1] + [0] * (df - 2)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd_deg(u, v, p):
    """Degree of gcd(u, v) mod p."""
    def deg(a):
        d = len(a) - 1
        while d >= 0 and a[d] % p == 0:
            d -= 1
        return d

    u, v = u[:], v[:]
    while True:
        dv = deg(v)
        if dv < 0:
            return max(deg(u), 0)
        inv = pow(v[dv] % p, p - 2, p)
        du = deg(u)
        while du >= dv:
            coef = (u[du] * inv) % p
            for i in range(dv + 1):
                u[du - dv + i] = (u[du - dv + i] - coef * v[i]) % p
            du = deg(u)
        u, v = v, u


def factor_pattern(p, coeffs):
    """Multiset of residue degrees of f mod p (p unramified).  Only the
    patterns possible for a dihedral quintic are accepted."""
    a4, a3, a2, a1, a0 = coeffs
    f = [a0 % p, a1 % p, a2 % p, a3 % p, a4 % p, 1]
    xp = _xpowmod(p, f, p)
    lin = xp[:]
    lin[1] = (lin[1] - 1) % p
    d1 = _pgcd_deg(lin, f, p)
    if d1 == 5:
        return (1, 1, 1, 1, 1)
    xp2 = _xpowmod(p * p, f, p)
    lin2 = xp2[:]
    lin2[1] = (lin2[1] - 1) % p
    d2 = _pgcd_deg(lin2, f, p)
    if d1 == 1 and d2 == 5:
        return (1, 2, 2)
    if d1 == 0 and d2 == 0:
        return (5,)
    raise ComputationError(
        f"p={p}: degrees (d1={d1}, d2={d2}) impossible for a dihedral quintic")


def chi_mq(p, q):
    """Kronecker symbol (-q | p) for an odd prime p != q."""
    return 1 if pow(-q % p, (p - 1) // 2, p) == 1 else -1


def principal_form_represents(p, q):
    """Is p = x^2 + x y + ((1+q)/4) y^2 solvable in integers?"""
    y = 0
    while q * y * y <= 4 * p:
        s2 = 4 * p - q * y * y
        s = isqrt(s2)
        if s * s == s2 and (s - y) % 2 == 0:
            return True
        y += 1
    return False


def verify_splitting_law(coeffs, q, bound=3000):
    """Check every unramified prime below ``bound`` against the class-field
    splitting law of K = Q(sqrt(-q))."""
    counts = {"split": 0, "inert5": 0, "refl": 0}

    def expected(p):
        if p == 2:
            chi = 1 if (-q) % 8 == 1 else -1
        else:
            chi = chi_mq(p, q)
        if chi == -1:
            return (1, 2, 2)
        return (1, 1, 1, 1, 1) if principal_form_represents(p, q) else (5,)

    for p in sympy.primerange(2, bound):
        if p == q:
            continue
        pat = factor_pattern(p, coeffs)
        exp = expected(p)
        if pat != exp:
            raise ComputationError(
                f"p={p}: factor pattern {pat}, class-field law predicts {exp}")
        counts["refl" if pat == (1, 2, 2)
               else ("split" if len(pat) == 5 else "inert5")] += 1
    return counts


# ------------------------------------------------------- exact Z[th] (deg 5)

class QuinticRing:
    """Exact arithmetic in Q[x]/(f); works on int or Fraction coefficients."""

    def __init__(self, coeffs):
        self.coeffs = coeffs
        a4, a3, a2, a1, a0 = coeffs
        red = [(-a0, -a1, -a2, -a3, -a4)]
        for _ in range(3):
            prev = red[-1]
            nxt = [0, *prev[:4]]
            top = prev[4]
            if top:
                for i in range(5):
                    nxt[i] += top * red[0][i]
            red.append(tuple(nxt))
        self.red = red  # th^(5+k) = red[k]

    def mul(self, u, v):
        c = [0] * 9
        for i in range(5):
            if u[i]:
                for j in range(5):
                    c[i + j] += u[i] * v[j]
        out = list(c[:5])
        for k in range(4):
            t = c[5 + k]
            if t:
                for i in range(5):
                    out[i] += t * self.red[k][i]
        return tuple(out)

    def pow(self, u, e):
        assert e >= 0
        result = (1, 0, 0, 0, 0)
        base = u
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def norm(self, u):
        cols = []
        acc = (1, 0, 0, 0, 0)
        for _ in range(5):
            cols.append(self.mul(u, acc))
            acc = self.mul(acc, (0, 1, 0, 0, 0))
        m = sympy.Matrix(5, 5, lambda i, j: cols[j][i])
        return int(m.det())

    def inverse_of_unit(self, u):
        """Inverse of a norm +-1 element of Z[th]; exact, integral result."""
        cols = []
        acc = (1, 0, 0, 0, 0)
        for _ in range(5):
            cols.append(self.mul(u, acc))
            acc = self.mul(acc, (0, 1, 0, 0, 0))
        n = 5
        m = [[Fraction(cols[c][r]) for c in range(n)] for r in range(n)]
        rhs = [Fraction(1 if r == 0 else 0) for r in range(n)]
        for c in range(n):
            piv = next(i for i in range(c, n) if m[i][c] != 0)
            m[c], m[piv] = m[piv], m[c]
            rhs[c], rhs[piv] = rhs[piv], rhs[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            rhs[c] *= inv
            for i in range(n):
                if i != c and m[i][c] != 0:
                    coef = m[i][c]
                    m[i] = [a - coef * b for a, b in zip(m[i], m[c])]
                    rhs[i] -= coef * rhs[c]
        assert all(v.denominator == 1 for v in rhs), "unit inverse not integral"
        out = tuple(int(v) for v in rhs)
        assert self.mul(u, out) == (1, 0, 0, 0, 0)
        return out


# ------------------------------------------------------------------ unit hunt

def find_unit_elements(coeffs, box=5):
    """Elements of Z[th] with norm +-1 and all power-basis coordinates in
    [-box, box], from a vectorized norm-form grid plus an exact norm check."""
    x = sympy.Symbol("x")
    cs = sympy.symbols("c0 c1 c2 c3 c4")
    a4, a3, a2, a1, a0 = coeffs
    f = x**5 + a4 * x**4 + a3 * x**3 + a2 * x**2 + a1 * x + a0
    g = cs[0] + cs[1] * x + cs[2] * x**2 + cs[3] * x**3 + cs[4] * x**4
    form = sympy.expand(sympy.resultant(f, g, x))
    nf = sympy.lambdify(cs, form, "numpy")

    side = np.arange(-box, box + 1, dtype=np.float64)
    grids = np.meshgrid(side, side, side, side, side, indexing="ij")
    vals = nf(*grids)
    mask = np.abs(np.abs(vals) - 1.0) < 0.5

    ring = QuinticRing(coeffs)
    units = []
    for idx in np.argwhere(mask):
        c = tuple(int(side[i]) for i in idx)
        if c[1:] == (0, 0, 0, 0):
            continue
        if ring.norm(c) in (1, -1):
            units.append(c)
    return units


# ------------------------------------------------ witness saturation machinery

def _fp_kernel(rows, ncols, p):
    """Kernel basis of the F_p matrix with the given rows."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c] % p, p - 2, p)
        m[r] = [(v * inv) % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                coef = m[i][c]
                m[i] = [(a - coef * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-m[i][fc]) % p
        basis.append(vec)
    return basis


def _sqrt_mod(a, p):
    """Tonelli-Shanks square root mod an odd prime (a must be a QR)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = (t2 * t2) % p
                i += 1
            bb = pow(c, 1 << (m - i - 1), p)
            m, c = i, (bb * bb) % p
            t, r = (t * c) % p, (r * bb) % p
    assert (r * r - a) % p == 0
    return r


def split_witnesses(coeffs, q, p, count, denominators):
    """Primes ell = 1 mod p, split completely in F, each with one root of f
    and a square root of -q mod ell; skips ell dividing a denominator."""
    a4, a3, a2, a1, a0 = coeffs
    out = []
    ell = 2
    while len(out) < count:
        ell = int(sympy.nextprime(ell))
        if ell == q or (ell - 1) % p != 0:
            continue
        if any(d % ell == 0 for d in denominators):
            continue
        if chi_mq(ell, q) != 1 or not principal_form_represents(ell, q):
            continue
        xs = np.arange(ell, dtype=np.int64)
        fv = np.zeros(ell, dtype=np.int64)
        for a in (1, a4, a3, a2, a1, a0):
            fv = (fv * xs + a) % ell
        roots = np.nonzero(fv == 0)[0]
        if len(roots) != 5:
            raise ComputationError(
                f"ell={ell}: expected 5 roots of f, got {len(roots)}; the "
                "class-field splitting law fails beyond the verified range")
        out.append((ell, int(roots[0]), _sqrt_mod(-q, ell)))
    return out


def character_row(values, ell, p):
    """Indices (base a generator of mu_p mod ell) of the p-th power
    characters of ``values``; None if any value vanishes mod ell."""
    e = (ell - 1) // p
    z = None
    g = 2
    while z is None:
        cand = pow(g, e, ell)
        if cand != 1:
            z = cand
        g += 1
    table = {1: 0}
    acc = 1
    for k in range(1, p):
        acc = (acc * z) % ell
        table[acc] = k
    row = []
    for v in values:
        v %= ell
        if v == 0:
            return None
        row.append(table[pow(v, e, ell)])
    return row


def saturation_kernel(value_fn, ngens, p, witnesses, include_minus_one):
    """Kernel of the witness character matrix; [] means p-saturated."""
    ncols = ngens + (1 if include_minus_one else 0)
    rows = []
    for (ell, r, w) in witnesses:
        vals = value_fn(ell, r, w)
        if vals is None or any(v % ell == 0 for v in vals):
            continue
        if include_minus_one:
            vals = list(vals) + [ell - 1]
        row = character_row(vals, ell, p)
        if row is not None:
            rows.append(row)
    if len(rows) < ncols + 6:
        raise ComputationError(f"p={p}: only {len(rows)} usable witnesses")
    return _fp_kernel(rows, ncols, p), len(rows)


# ----------------------------------------------------------------- analytics

def prime_splitting(p, coeffs, q):
    """(e, f) pairs of the primes over p (Z[th] is maximal)."""
    if p == q:
        x = sympy.Symbol("x")
        a4, a3, a2, a1, a0 = coeffs
        poly = sympy.Poly(x**5 + a4 * x**4 + a3 * x**3 + a2 * x**2 + a1 * x + a0,
                          x, modulus=q)
        return [(e, int(sympy.degree(fac))) for fac, e in poly.factor_list()[1]]
    return [(1, f) for f in factor_pattern(p, coeffs)]


def _local_ideal_counts(p, coeffs, q, kmax):
    """c[k] = number of ideals of norm p^k."""
    c = [0] * (kmax + 1)
    c[0] = 1
    for (e, f) in prime_splitting(p, coeffs, q):
        newc = [0] * (kmax + 1)
        for k in range(kmax + 1):
            if c[k]:
                j = 0
                while k + j * f <= kmax:
                    newc[k + j * f] += c[k]
                    j += 1
        c = newc
    return c


def sieve_zeta_coeffs(N, coeffs, q):
    """a[n] = number of ideals of norm n, via a smallest-prime-factor sieve."""
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
    local = {}
    a = [0] * (N + 1)
    a[1] = 1
    for n in range(2, N + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if p not in local:
            local[p] = _local_ideal_counts(p, coeffs, q,
                                           int(math.log(N, p) + 1e-9))
        c = local[p]
        a[n] = a[m] * c[k] if k < len(c) else 0
    return a


def analytic_regulator(coeffs, q, N=200000):
    """R_L from res_{s=1} zeta_L = (2pi)^2 R_L / q (h=1, w=2, |d|=q^2),
    with Gaussian smoothing at three cutoffs."""
    a = sieve_zeta_coeffs(N, coeffs, q)
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    for p in sympy.primerange(2, N + 1):
        mu[p::p] *= -1
        p2 = p * p
        if p2 <= N:
            mu[p2::p2] = 0
    b = [0] * (N + 1)
    for d in range(1, N + 1):
        m = int(mu[d])
        if m == 0:
            continue
        for n in range(d, N + 1, d):
            b[n] += m * a[n // d]
    ests = []
    for X in (N / 6.0, N / 3.0, N / 1.5):
        s = 0.0
        for n in range(1, N + 1):
            if b[n]:
                s += b[n] / n * math.exp(-((n / X) ** 2))
        ests.append(s * float(q) / (4.0 * math.pi**2))
    return ests


# ------------------------------------------- exact F = Q(th, omega) arithmetic

class FieldF:
    """Exact arithmetic in Q[th, omega]/(f(th), omega^2 + q).

    Elements: 5x2 tuples of Fractions, coeff[i][j] of th^i omega^j.
    """

    def __init__(self, coeffs, q):
        self.ring = QuinticRing(coeffs)
        self.q = q

    def zero(self):
        return tuple(tuple(Fraction(0) for _ in range(2)) for _ in range(5))

    def one(self):
        return self.from_theta_poly((1, 0, 0, 0, 0))

    def theta(self):
        return self.from_theta_poly((0, 1, 0, 0, 0))

    def omega(self):
        return tuple((Fraction(0), Fraction(1 if i == 0 else 0)) for i in range(5))

    def from_theta_poly(self, c):
        return tuple((Fraction(c[i]), Fraction(0)) for i in range(5))

    def add(self, u, v):
        return tuple(tuple(u[i][j] + v[i][j] for j in range(2)) for i in range(5))

    def neg(self, u):
        return tuple(tuple(-u[i][j] for j in range(2)) for i in range(5))

    def scal(self, c, u):
        return tuple(tuple(c * u[i][j] for j in range(2)) for i in range(5))

    def mul(self, u, v):
        u0 = tuple(u[i][0] for i in range(5))
        u1 = tuple(u[i][1] for i in range(5))
        v0 = tuple(v[i][0] for i in range(5))
        v1 = tuple(v[i][1] for i in range(5))
        r = self.ring
        p00 = r.mul(u0, v0)
        p11 = r.mul(u1, v1)
        p01 = r.mul(u0, v1)
        p10 = r.mul(u1, v0)
        return tuple((p00[i] - self.q * p11[i], p01[i] + p10[i]) for i in range(5))

    def inv(self, u):
        basis = []
        for j in range(2):
            for i in range(5):
                e = [[Fraction(0)] * 2 for _ in range(5)]
                e[i][j] = Fraction(1)
                basis.append(tuple(tuple(row) for row in e))
        cols = []
        for bvec in basis:
            prod = self.mul(u, bvec)
            cols.append([prod[i][j] for j in range(2) for i in range(5)])
        n = 10
        m = [[Fraction(cols[c][r]) for c in range(n)] for r in range(n)]
        rhs = [Fraction(1 if r == 0 else 0) for r in range(n)]
        for c in range(n):
            piv = next(i for i in range(c, n) if m[i][c] != 0)
            m[c], m[piv] = m[piv], m[c]
            rhs[c], rhs[piv] = rhs[piv], rhs[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            rhs[c] *= inv
            for i in range(n):
                if i != c and m[i][c] != 0:
                    coef = m[i][c]
                    m[i] = [a - coef * b for a, b in zip(m[i], m[c])]
                    rhs[i] -= coef * rhs[c]
        out = [[Fraction(0)] * 2 for _ in range(5)]
        for k, bvec in enumerate(basis):
            if rhs[k]:
                for i in range(5):
                    for j in range(2):
                        out[i][j] += rhs[k] * bvec[i][j]
        res = tuple(tuple(row) for row in out)
        assert self.mul(u, res) == self.one(), "inverse verification failed"
        return res

    def pow(self, u, e):
        if e < 0:
            return self.pow(self.inv(u), -e)
        result = self.one()
        base = u
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def apply_b(self, u, X):
        """th -> X, omega -> omega."""
        out = self.zero()
        for j in (0, 1):
            acc = self.zero()
            for i in range(4, -1, -1):
                acc = self.mul(acc, X)
                c = u[i][j]
                if c:
                    acc = self.add(acc, self.scal(c, self.one()))
            if j == 1:
                acc = self.mul(acc, self.omega())
            out = self.add(out, acc)
        return out

    def apply_a(self, u):
        """th -> th, omega -> -omega."""
        return tuple((u[i][0], -u[i][1]) for i in range(5))

    def eval_numeric(self, u, th_val, omega_val):
        acc = mp.mpc(0)
        tp = mp.mpc(1)
        for i in range(5):
            for j in range(2):
                c = u[i][j]
                if c:
                    acc += (mp.mpf(c.numerator) / c.denominator) * tp * omega_val**j
            tp *= th_val
        return acc

    def eval_mod(self, u, r, w, ell):
        acc = 0
        rp = 1
        for i in range(5):
            for j in range(2):
                c = u[i][j]
                if c:
                    num = c.numerator % ell
                    den = pow(c.denominator % ell, ell - 2, ell)
                    acc = (acc + num * den * rp * pow(w, j, ell)) % ell
            rp = (rp * r) % ell
        return acc


# --------------------------------------------------------------- entry points

def check_quintic_preconditions(coeffs) -> int:
    """Validate a degree-5 job; returns the prime q with disc(f) = q^2.

    ``coeffs`` is the full descending coefficient tuple (1, a4, ..., a0).
    """
    x = sympy.Symbol("x")
    expr = x**5
    for k, c in enumerate(coeffs[1:]):
        expr += int(c) * x ** (4 - k)
    disc = int(sympy.discriminant(expr, x))
    if disc <= 0:
        raise ComputationError(
            f"disc(f) = {disc} <= 0: a dihedral quintic with imaginary "
            "quadratic partner has square (positive) discriminant"
        )
    root, exact = sympy.integer_nthroot(disc, 2)
    q = int(root)
    if not exact or not sympy.isprime(q):
        raise ComputationError(
            f"disc(f) = {disc} is not the square of a prime; this tower "
            "construction requires d_L = q^2"
        )
    if q % 4 != 3:
        raise ComputationError(
            f"q = {q} is not 3 (mod 4), so -q is not a fundamental "
            "discriminant; this configuration is unsupported"
        )
    hk = compute_imaginary_quadratic(q).h
    if hk != REQUIRED_H_K:
        raise ComputationError(
            f"h(-{q}) = {hk} != 5: L(sqrt(-{q})) cannot be the Hilbert class "
            f"field of Q(sqrt(-{q})) over a quintic"
        )
    return q


@lru_cache(maxsize=4)
def compute_quintic_tower(coeffs) -> dict:
    """Full tower computation for the quintic defined by the descending
    coefficient tuple (1, a4, a3, a2, a1, a0); returns a plain dict of
    invariants (decimal fields as fixed-width strings)."""
    q = check_quintic_preconditions(coeffs)
    hk = REQUIRED_H_K
    c5 = tuple(int(v) for v in coeffs[1:])
    a4, a3, a2, a1, a0 = c5

    try:
        from sympy.polys.numberfields.galoisgroups import galois_group

        x = sympy.Symbol("x")
        G, _ = galois_group(sympy.Poly(
            x**5 + a4 * x**4 + a3 * x**3 + a2 * x**2 + a1 * x + a0, x))
        if int(G.order()) != 10:
            raise ComputationError(
                f"Galois group of the splitting field has order {G.order()}, "
                "not 10: the quintic is not dihedral"
            )
    except ImportError:
        # the splitting law plus the exact f(X) = 0 identity carry the proof
        pass

    counts = verify_splitting_law(c5, q)

    mink = math.factorial(5) / 5**5 * (4 / math.pi) ** 2 * q
    f_at_1 = 1 + a4 + a3 + a2 + a1 + a0
    if not (mink < 3 and a0 % 2 == 1 and f_at_1 % 2 == 1):
        raise ComputationError(
            f"h_L = 1 certificate fails: it needs Minkowski bound "
            f"{mink:.4f} < 3 and f(0) = {a0}, f(1) = {f_at_1} both odd "
            "(no prime of norm 2)"
        )
    h_L = 1

    ring = QuinticRing(c5)
    unit_elems = find_unit_elements(c5, box=5)

    with mp.workdps(WORK_DPS):
        roots_all = mp.polyroots([1, a4, a3, a2, a1, a0],
                                 maxsteps=600, extraprec=600)
        real_roots = [mp.re(r) for r in roots_all
                      if abs(mp.im(r)) < mp.mpf("1e-100")]
        upper = sorted((r for r in roots_all if mp.im(r) > mp.mpf("1e-100")),
                       key=mp.re)
        if len(real_roots) != 1 or len(upper) != 2:
            raise ComputationError("the quintic does not have signature (1, 2)")
        t0 = real_roots[0]

        def l_logs(c):
            out = []
            for k, t in enumerate((mp.mpc(t0), upper[0], upper[1])):
                v = mp.mpc(0)
                tp = mp.mpc(1)
                for ci in c:
                    v += ci * tp
                    tp *= t
                out.append((2 if k else 1) * mp.log(abs(v)))
            return out

        def dot(u, v):
            return sum(x * y for x, y in zip(u, v))

        cands = sorted(unit_elems, key=lambda c: float(dot(l_logs(c), l_logs(c))))
        if not cands:
            raise ComputationError("no units found on the norm-form grid")
        u1c = cands[0]
        u1l = l_logs(u1c)
        u2c = u2l = None
        for c in cands[1:]:
            ll = l_logs(c)
            if abs(u1l[0] * ll[1] - u1l[1] * ll[0]) > mp.mpf("1e-50"):
                u2c, u2l = c, ll
                break
        if u2c is None:
            raise ComputationError(
                "no independent unit pair found; enlarge the search box")

        # exact Lagrange (Gauss) reduction of the rank-2 log lattice
        while True:
            m = int(mp.nint(dot(u1l, u2l) / dot(u1l, u1l)))
            if m:
                step = ring.inverse_of_unit(u1c) if m > 0 else u1c
                for _ in range(abs(m)):
                    u2c = ring.mul(u2c, step)
                u2l = [a - m * b for a, b in zip(u2l, u1l)]
            if dot(u2l, u2l) < dot(u1l, u1l):
                u1c, u2c = u2c, u1c
                u1l, u2l = u2l, u1l
            else:
                break

        R_L = abs(u1l[0] * u2l[1] - u1l[1] * u2l[0])
        for name, ll in (("u1", u1l), ("u2", u2l)):
            if not abs(sum(ll)) < mp.mpf("1e-200"):
                raise ComputationError(f"product formula fails for {name}")

        l_sat_report = {}
        for p in SAT_PRIMES:
            wits = split_witnesses(c5, q, p, 25, denominators=[1])

            def value_fn(ell, r, w, _u1=u1c, _u2=u2c):
                def ev(c):
                    acc, rp = 0, 1
                    for ci in c:
                        acc = (acc + ci * rp) % ell
                        rp = (rp * r) % ell
                    return acc
                return [ev(_u1), ev(_u2)]

            kernel, used = saturation_kernel(value_fn, 2, p, wits,
                                             include_minus_one=(p == 2))
            if p == 2:
                kernel = [v for v in kernel if any(x % 2 for x in v[:2])]
            if kernel:
                raise ComputationError(
                    f"L units not {p}-saturated: kernel {kernel}")
            l_sat_report[p] = used

        ests = analytic_regulator(c5, q)
        rel = abs(ests[-1] / float(R_L) - 1)
        if not rel < 5e-3:
            raise ComputationError(
                "analytic regulator disagrees with the unit lattice; the "
                "pair may not be fundamental"
            )

        # ------------------------------------------------------------ F level
        FF = FieldF(c5, q)
        R5 = [mp.mpc(t0), upper[0], mp.conj(upper[0]), upper[1], mp.conj(upper[1])]
        cperm = (0, 2, 1, 4, 3)
        OMEGA = mp.mpc(0, 1) * mp.sqrt(mp.mpf(q))

        def is_5cycle(perm):
            seen = {0}
            k = perm[0]
            while k != 0:
                seen.add(k)
                k = perm[k]
            return len(seen) == 5

        def inv_perm(perm):
            out = [0] * 5
            for i, v in enumerate(perm):
                out[v] = i
            return tuple(out)

        candidates = [perm for perm in permutations(range(5))
                      if is_5cycle(perm)
                      and tuple(cperm[perm[cperm[i]]] for i in range(5))
                      == inv_perm(perm)]

        def orbit(perm):
            e = [0]
            for _ in range(4):
                e.append(perm[e[-1]])
            return e

        def reconstruct(profile, e, max_den=10**40):
            """Exact element of F from its values at the 5 chosen embeddings."""
            M = mp.matrix(10, 10)
            for k in range(5):
                th = R5[e[k]]
                col = 0
                for j in range(2):
                    for i in range(5):
                        val = th**i * OMEGA**j
                        M[2 * k, col] = mp.re(val)
                        M[2 * k + 1, col] = mp.im(val)
                        col += 1
            rhs = mp.matrix(10, 1)
            for k in range(5):
                rhs[2 * k] = mp.re(profile[k])
                rhs[2 * k + 1] = mp.im(profile[k])
            try:
                xs = mp.lu_solve(M, rhs)
            except ZeroDivisionError:
                return None
            tol = mp.mpf(10) ** (-(mp.mp.dps - 80))
            fracs = []
            for cval in xs:
                fr = Fraction(mp.nstr(cval, 60)).limit_denominator(max_den)
                if abs(cval - mp.mpf(fr.numerator) / fr.denominator) > tol * max(1, abs(cval)):
                    return None
                fracs.append(fr)
            return tuple((fracs[i], fracs[5 + i]) for i in range(5))

        def f_of(elt):
            """f(elt) evaluated exactly in F."""
            val = FF.zero()
            powc = FF.one()
            for coef in (a0, a1, a2, a3, a4):
                if coef:
                    val = FF.add(val, FF.scal(Fraction(coef), powc))
                powc = FF.mul(powc, elt)
            return FF.add(val, powc)

        X = E = PI = None
        for perm in candidates:
            e = orbit(perm)
            profile = [R5[e[(k + 1) % 5]] for k in range(5)]
            cand = reconstruct(profile, e)
            if cand is None or cand == FF.theta():
                continue
            if f_of(cand) != FF.zero():
                continue
            X, E, PI = cand, e, perm
            break
        if X is None:
            raise ComputationError(
                "no dihedral 5-cycle reconstructs the rotation image of theta "
                "exactly"
            )

        # exact dihedral relations: b^5 = id and a b a = b^-1, checked on th
        bk = FF.theta()
        images = []
        for _ in range(5):
            bk = FF.apply_b(bk, X)
            images.append(bk)
        if images[-1] != FF.theta():
            raise ComputationError("b^5 != identity on theta")
        aXa = FF.apply_a(FF.apply_b(FF.apply_a(FF.theta()), X))
        if aXa != images[3]:  # images[3] = b^4(th)
            raise ComputationError("a b a != b^-1 on theta")

        THV = [R5[E[k]] for k in range(5)]

        class UnitC:
            __slots__ = ("vals", "logs", "elt")

            def __init__(self, vals, elt):
                self.vals = list(vals)
                self.elt = elt
                self.logs = [2 * mp.log(abs(v)) for v in vals]

            @classmethod
            def from_elt(cls, elt):
                return cls([FF.eval_numeric(elt, THV[k], OMEGA)
                            for k in range(5)], elt)

            def times(self, other, k=1):
                return UnitC([a * b**k for a, b in zip(self.vals, other.vals)],
                             FF.mul(self.elt, FF.pow(other.elt, k)))

        def gram_schmidt(basis):
            r = len(basis)
            mu_m = [[mp.mpf(0)] * r for _ in range(r)]
            ortho = []
            for i, bu in enumerate(basis):
                v = list(bu.logs)
                for j in range(i):
                    mu_m[i][j] = dot(bu.logs, ortho[j]) / dot(ortho[j], ortho[j])
                    v = [xx - mu_m[i][j] * yy for xx, yy in zip(v, ortho[j])]
                ortho.append(v)
            return ortho, mu_m

        def lll_reduce(basis, delta="0.99"):
            basis = list(basis)
            d = mp.mpf(delta)
            k = 1
            while k < len(basis):
                ortho, mu_m = gram_schmidt(basis)
                for j in range(k - 1, -1, -1):
                    m = int(mp.nint(mu_m[k][j]))
                    if m:
                        basis[k] = basis[k].times(basis[j], -m)
                        ortho, mu_m = gram_schmidt(basis)
                nk = dot(ortho[k], ortho[k])
                nk1 = dot(ortho[k - 1], ortho[k - 1])
                if nk >= (d - mu_m[k][k - 1] ** 2) * nk1:
                    k += 1
                else:
                    basis[k], basis[k - 1] = basis[k - 1], basis[k]
                    k = max(k - 1, 1)
            return basis

        def lattice_det(basis):
            r = len(basis)
            m = mp.matrix(r, r)
            for i in range(r):
                for j in range(r):
                    m[i, j] = basis[i].logs[j]
            return abs(mp.det(m))

        g_u1 = UnitC.from_elt(FF.from_theta_poly(u1c))
        g_u2 = UnitC.from_elt(FF.from_theta_poly(u2c))
        g_u1p = UnitC.from_elt(FF.apply_b(g_u1.elt, X))
        g_u2p = UnitC.from_elt(FF.apply_b(g_u2.elt, X))
        gamma = [g_u1, g_u2, g_u1p, g_u2p]
        for name, u in zip(("u1", "u2", "u1'", "u2'"), gamma):
            if not abs(sum(u.logs)) < mp.mpf("1e-190"):
                raise ComputationError(f"product formula fails for {name}")
        for k in range(5):
            if not abs(g_u1p.vals[k] - g_u1.vals[(k + 1) % 5]) < mp.mpf("1e-190"):
                raise ComputationError(
                    "rotated unit values are not a cyclic shift of the "
                    "original embedding values"
                )
        R_gamma = lattice_det(gamma)
        if not R_gamma > mp.mpf("1e-10"):
            raise ComputationError("conjugate units are not independent")

        basis = lll_reduce(list(gamma))
        R_check = lattice_det(basis)
        if not abs(R_check - R_gamma) < mp.mpf("1e-180") * R_gamma:
            raise ComputationError("LLL changed the lattice determinant")
        for u in basis:
            for k in range(5):
                chk = FF.eval_numeric(u.elt, THV[k], OMEGA)
                if not abs(chk - u.vals[k]) < mp.mpf("1e-180") * max(1, abs(u.vals[k])):
                    raise ComputationError(
                        "reduced basis values drifted from their exact elements")

        denoms = sorted({c.denominator for u in basis for pair in u.elt
                         for c in pair})
        f_sat_report = {}
        for p in SAT_PRIMES:
            wits = split_witnesses(c5, q, p, 25, denominators=denoms)

            def value_fn(ell, r, w, _basis=basis):
                return [FF.eval_mod(u.elt, r, w, ell) for u in _basis]

            kernel, used = saturation_kernel(value_fn, 4, p, wits,
                                             include_minus_one=(p == 2))
            if p == 2:
                kernel = [v for v in kernel if any(x % 2 for x in v[:4])]
            if kernel:
                raise ComputationError(
                    f"F units not {p}-saturated over the conjugate-unit "
                    f"lattice: kernel {kernel}"
                )
            f_sat_report[p] = used

        R_F = R_gamma
        k_pin = hk * R_L**2 / R_F
        h_F = int(mp.nint(k_pin))
        if not abs(k_pin - h_F) < mp.mpf("1e-180"):
            raise ComputationError(
                "residue identity h_K R_L^2 / R_Gamma does not close on an "
                "integer"
            )
        if h_F != 1:
            raise ComputationError(
                f"h_F / [U(F):Gamma] = {h_F} != 1: the class-field "
                "certificates only close for a trivial class number and a "
                "full unit lattice"
            )
        index = 1

        def apply_gen(u, gen):
            if gen == "b":
                elt = FF.apply_b(u.elt, X)
                vals = [u.vals[(k + 1) % 5] for k in range(5)]
            else:
                elt = FF.apply_a(u.elt)
                vals = [mp.conj(u.vals[(-k) % 5]) for k in range(5)]
            out = UnitC(vals, elt)
            for k in range(5):
                chk = FF.eval_numeric(elt, THV[k], OMEGA)
                if not abs(chk - out.vals[k]) < mp.mpf("1e-180") * max(1, abs(out.vals[k])):
                    raise ComputationError(
                        f"{gen}-image values disagree with the exact element")
            return out

        def solve_coords(basis, target_logs, tol="1e-60"):
            r = len(basis)
            B = mp.matrix(r, r)
            rhs = mp.matrix(r, 1)
            for i in range(r):
                for j in range(r):
                    B[i, j] = dot(basis[j].logs, basis[i].logs)
                rhs[i] = dot(target_logs, basis[i].logs)
            xs = mp.lu_solve(B, rhs)
            ints = [int(mp.nint(v)) for v in xs]
            for c in range(5):
                acc = sum(ints[j] * basis[j].logs[c] for j in range(r))
                if abs(acc - target_logs[c]) > mp.mpf(tol):
                    return None
            return ints

        def action_matrix(gen):
            cols = []
            for j in range(4):
                img = apply_gen(basis[j], gen)
                xv = solve_coords(basis, img.logs)
                if xv is None:
                    raise ComputationError(
                        f"{gen}(basis[{j}]) is not in the unit lattice")
                prod = FF.one()
                for u, ev in zip(basis, xv):
                    if ev:
                        prod = FF.mul(prod, FF.pow(u.elt, ev))
                if not (prod == img.elt or FF.neg(prod) == img.elt):
                    raise ComputationError(
                        f"{gen}(basis[{j}]): exact verification failed")
                cols.append(xv)
            return [[cols[j][i] for j in range(4)] for i in range(4)]

        A_mat = action_matrix("a")
        B_mat = action_matrix("b")

        # cross-check through the lattice machinery: the regulator constant of
        # this unit lattice against the order-10 dihedral relation must be 5
        from artifact.dokchitser import dok_pairing
        from artifact.groups import build_group
        from artifact.lattices import lattice_from_generators
        from artifact.ledger import audit_relation

        G = build_group("D2q:5")
        if G.generator_indices != (5, 1):
            raise ComputationError(
                f"unexpected generator layout {G.generator_indices} for the "
                "order-10 dihedral group"
            )
        lat = lattice_from_generators(G, [A_mat, B_mat])
        rel = audit_relation(G)
        const = dok_pairing(lat, rel).value
        if const != Fraction(5):
            raise ComputationError(
                f"unit-lattice regulator constant is {const}, expected 5")

        gram = mp.matrix(4, 4)
        for i in range(4):
            for j in range(4):
                gram[i, j] = dot(basis[i].logs, basis[j].logs)
        gram_det = mp.det(gram)
        if not abs(gram_det - 5 * R_F**2) < mp.mpf("1e-170") * abs(gram_det):
            raise ComputationError("Gram determinant is not 5 R_F^2")

        return {
            "q": q,
            "poly": list(c5),
            "poly_disc": q * q,
            "splitting_law_counts": counts,
            "h_L": h_L,
            "h_K": hk,
            "w_L": 2,
            "w_F": 2,
            "R_L": mp.nstr(R_L, 110, strip_zeros=False),
            "unit1": list(u1c),
            "unit2": list(u2c),
            "L_saturation_witness_rows": l_sat_report,
            "analytic_R_L": ests,
            "rotation_cycle": list(PI),
            "orbit_of_0": E,
            "X_coords": [[str(X[i][j]) for j in range(2)] for i in range(5)],
            "R_F": mp.nstr(R_F, 110, strip_zeros=False),
            "h_F": h_F,
            "unit_index": index,
            "F_saturation_witness_rows": f_sat_report,
            "basis_coords": [[[str(u.elt[i][j]) for j in range(2)]
                              for i in range(5)] for u in basis],
            "unit_logs_matrix": [[mp.nstr(u.logs[c], 60, strip_zeros=False)
                                  for c in range(5)] for u in basis],
            "action_reflection": A_mat,
            "action_rotation": B_mat,
            "dok_constant": str(const),
        }
