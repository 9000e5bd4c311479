"""Unit group and class number of a totally real cubic field L = Q[x]/(f).

Requirements checked on the way in (``ComputationError`` otherwise):

* f monic integer cubic, irreducible, with three real roots (disc(f) > 0);
* disc(f) not a perfect square (so the Galois closure is S3, not C3);
* Z[theta] is the maximal order: at every prime p with p^2 | disc(f) the
  Dedekind criterion must certify p-maximality (then d_L = disc(f));
* the squarefree kernel of disc(f) is ≡ 1 (mod 4) — it is then the
  discriminant of the quadratic resolvent field K.

Method (factor-base relation search):

1. numpy grid of exact norms N(c0 + c1*th + c2*th^2) over a box; keep
   elements whose |N| factors over small unramified primes (plus the
   totally ramified ones).
2. exact prime-ideal valuations via Hensel-lifted roots of f mod p^K.
3. integer kernel of the valuation matrix -> units, represented by their
   exponent vectors over the elements (values/logs at 150 dps).
4. Lagrange-reduce the rank-2 log lattice; saturate with p-th-root
   characteristic-polynomial tests for p <= 47.
5. analytic pin: res zeta_L = 4 h R / sqrt(d_L) from smoothed partial sums
   of the Dirichlet series of zeta_L/zeta -> h integer.  The quotient's
   coefficients are multiplicative, so they are filled in O(N) from local
   ideal counts via a smallest-prime-factor sieve.

Ramified primes: a totally ramified p (f a perfect cube mod p) contributes a
single valuation column with e = 3, f = 1; ramified primes with a
double-root pattern (e = 2 above them) are excluded from the factor base —
elements meeting them are simply skipped, which costs nothing but search
yield.  A generator of norm ±p over a totally ramified p (needed for S-unit
jobs) is searched on a small exact-norm grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import mpmath as mp
import numpy as np
import sympy

from .errors import ComputationError
from .quadratics import RealQuadraticData, compute_real_quadratic

WORK_DPS = 150  # working precision of the unit-lattice numerics
SAT_PMAX = 47  # saturation certificates at every prime up to this bound


# ---------------------------------------------------------------- arithmetic

def _theta_shift(v: tuple[int, int, int], coeffs) -> tuple[int, int, int]:
    """Coordinates of theta * (v0 + v1*th + v2*th^2) in the power basis."""
    a2, a1, a0 = coeffs[1], coeffs[2], coeffs[3]
    return (-a0 * v[2], v[0] - a1 * v[2], v[1] - a2 * v[2])


def mult_matrix(c, coeffs):
    col0 = tuple(c)
    col1 = _theta_shift(col0, coeffs)
    col2 = _theta_shift(col1, coeffs)
    return [
        [col0[0], col1[0], col2[0]],
        [col0[1], col1[1], col2[1]],
        [col0[2], col1[2], col2[2]],
    ]


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def norm_exact(c, coeffs):
    return det3(mult_matrix(c, coeffs))


def poly_disc(coeffs) -> int:
    x = sympy.Symbol("x")
    return int(sympy.Poly(list(coeffs), x).discriminant())


# ------------------------------------------------------- factor base helpers

def _f_at(coeffs, v: int, m: int) -> int:
    """f(v) mod m by Horner."""
    acc = 0
    for c in coeffs:
        acc = (acc * v + c) % m
    return acc


def _fprime_at(coeffs, v: int, m: int) -> int:
    acc = 0
    deg = len(coeffs) - 1
    for i, c in enumerate(coeffs[:-1]):
        acc = (acc * v + (deg - i) * c) % m
    return acc


def f_mod_roots(p, coeffs):
    return [r for r in range(p) if _f_at(coeffs, r, p) == 0]


def hensel_lift(p, r, K, coeffs):
    """Root of f mod p^K lifting the simple root r mod p."""
    pk = p
    R = r
    while pk < p**K:
        pk2 = min(pk * pk, p**K)
        d = _fprime_at(coeffs, R, pk2)
        dinv = pow(d, -1, pk2)
        R = (R - _f_at(coeffs, R, pk2) * dinv) % pk2
        pk = pk2
    assert _f_at(coeffs, R, p**K) == 0
    return R


def is_triple_root_pattern(p, coeffs) -> int | None:
    """If f ≡ (x - r)^3 (mod p), return r; otherwise None."""
    roots = f_mod_roots(p, coeffs)
    if len(roots) != 1:
        return None
    r = roots[0]
    a2, a1, a0 = coeffs[1], coeffs[2], coeffs[3]
    if (a2 + 3 * r) % p == 0 and (a1 - 3 * r * r) % p == 0 and (a0 + r**3) % p == 0:
        return r
    return None


def dedekind_p_maximal(coeffs, p) -> bool:
    """Dedekind's criterion: is Z[theta] maximal at p?"""
    x = sympy.Symbol("x")
    f_z = sympy.Poly(list(coeffs), x, domain=sympy.ZZ)
    f_p = sympy.Poly(list(coeffs), x, domain=sympy.GF(p))
    one = sympy.Poly(1, x, domain=sympy.GF(p))
    g_p, h_p = one, one
    for fac, e in f_p.factor_list()[1]:
        g_p *= fac
        h_p *= fac**(e - 1)
    g_z = g_p.set_domain(sympy.ZZ)
    h_z = h_p.set_domain(sympy.ZZ)
    diff = g_z * h_z - f_z
    t_coeffs = [c // p for c in diff.all_coeffs()]
    if any(c % p for c in diff.all_coeffs()):
        raise ComputationError(f"Dedekind lift failed at p={p}")
    t_p = sympy.Poly(t_coeffs if t_coeffs else [0], x, domain=sympy.GF(p))
    g = g_p.gcd(h_p).gcd(t_p)
    return g.degree() == 0


class FactorBase:
    """Prime-ideal valuation columns over the rational primes up to pmax."""

    def __init__(self, coeffs, disc, pmax):
        self.coeffs = coeffs
        self.cols = []  # (p, tag) tag: root value for deg-1, "i" inert, "d2" degree-2, "e" totally ramified
        self.by_p = {}
        for p in sympy.primerange(2, pmax + 1):
            if disc % p == 0:
                if is_triple_root_pattern(p, coeffs) is not None:
                    # totally ramified: one prime, e = 3, f = 1
                    self.by_p[p] = {"kind": "eis"}
                    self.cols.append((p, "e"))
                # other ramified patterns are excluded from the base
                continue
            roots = f_mod_roots(p, coeffs)
            K = max(3, int(60 / math.log10(p)) + 2)
            lifted = {r: hensel_lift(p, r, K, coeffs) for r in roots}
            if len(roots) == 0:
                self.by_p[p] = {"kind": "inert"}
                self.cols.append((p, "i"))
            elif len(roots) == 1:
                self.by_p[p] = {"kind": "mixed", "roots": lifted, "K": K}
                self.cols.append((p, roots[0]))
                self.cols.append((p, "d2"))
            else:
                self.by_p[p] = {"kind": "split", "roots": lifted, "K": K}
                for r in roots:
                    self.cols.append((p, r))
        self.col_index = {c: i for i, c in enumerate(self.cols)}
        self.primes = sorted(self.by_p)

    def valuations(self, c, n_abs):
        """Column->valuation dict for element c with |N(c)| = n_abs (smooth)."""
        out = {}
        n = n_abs
        for p in self.primes:
            if n % p:
                continue
            ep = 0
            while n % p == 0:
                n //= p
                ep += 1
            info = self.by_p[p]
            if info["kind"] == "eis":
                out[self.col_index[(p, "e")]] = ep
            elif info["kind"] == "inert":
                if ep % 3:
                    return None
                out[self.col_index[(p, "i")]] = ep // 3
            else:
                K = info["K"]
                pK = p**K
                total_deg1 = 0
                for r, R in info["roots"].items():
                    t = (c[0] + c[1] * R + c[2] * R * R) % pK
                    if t == 0:
                        return None  # too deep; skip element
                    v = 0
                    while t % p == 0:
                        t //= p
                        v += 1
                    if v:
                        out[self.col_index[(p, r)]] = v
                        total_deg1 += v
                if info["kind"] == "split":
                    if total_deg1 != ep:
                        return None
                else:
                    rem = ep - total_deg1
                    if rem < 0 or rem % 2:
                        return None
                    if rem:
                        out[self.col_index[(p, "d2")]] = rem // 2
        if n != 1:
            return None
        return out


# ------------------------------------------------------------ element search

@lru_cache(maxsize=8)
def norm_grid(coeffs, bound):
    """Exact norms of c0 + c1*th + c2*th^2 on an integer box, via numpy."""
    a, b, c, x = sympy.symbols("a b c x")
    f = sum(int(cf) * x**(len(coeffs) - 1 - i) for i, cf in enumerate(coeffs))
    u = a + b * x + c * x**2
    nf = sympy.expand(sympy.resultant(f, u, x))
    terms = sympy.Poly(nf, a, b, c).terms()
    rng = np.arange(-bound, bound + 1, dtype=np.int64)
    A = rng[:, None, None]
    B = rng[None, :, None]
    C = rng[None, None, :]
    total = np.zeros((rng.size, rng.size, rng.size), dtype=np.int64)
    for (ea, eb, ec), coef in terms:
        total += int(coef) * (A**ea) * (B**eb) * (C**ec)
    return rng, total


def collect_elements(fb, bound=14, norm_cap=10**7, want=900):
    rng, total = norm_grid(fb.coeffs, bound)
    idx = np.argwhere((total != 0) & (np.abs(total) <= norm_cap))
    # visit small norms first
    order = np.argsort(np.abs(total[tuple(idx.T)]))
    rows = []
    elements = []
    for t in order:
        i, j, k = idx[t]
        c = (int(rng[i]), int(rng[j]), int(rng[k]))
        if c[0] <= 0 and all(v <= 0 for v in c):
            continue  # use one representative of +-c
        n = int(total[i, j, k])
        n_abs = abs(n)
        # quick smoothness check
        m = n_abs
        for p in fb.primes:
            while m % p == 0:
                m //= p
        if m != 1:
            continue
        vals = fb.valuations(c, n_abs)
        if vals is None:
            continue
        rows.append(vals)
        elements.append(c)
        if len(elements) >= want:
            break
    return elements, rows


def find_norm_generator(coeffs, p, bound=16):
    """First element of norm ±p on the exact-norm grid (C-order scan)."""
    rng, total = norm_grid(coeffs, bound)
    for i, j, k in np.argwhere(np.abs(total) == p):
        return (int(rng[i]), int(rng[j]), int(rng[k]))
    return None


# --------------------------------------------------------------- unit object

class UnitVal:
    """A unit known by exponent vector over elements: values/logs at 150 dps."""

    __slots__ = ("logs", "signs", "mags", "expvec")

    def __init__(self, logs, signs, mags, expvec=None):
        self.logs = logs
        self.signs = signs
        self.mags = mags
        self.expvec = expvec

    @classmethod
    def from_exponents(cls, elements, expvec, embeddings):
        logs = [mp.mpf(0)] * 3
        signs = [1] * 3
        for c, k in zip(elements, expvec):
            if not k:
                continue
            for i in range(3):
                th = embeddings[i]
                v = c[0] + c[1] * th + c[2] * th * th
                logs[i] += k * mp.log(abs(v))
                if v < 0 and k % 2:
                    signs[i] = -signs[i]
        mags = [mp.e**l for l in logs]
        return cls(logs, signs, mags, tuple(expvec))

    def times(self, other, k=1):
        logs = [a + k * b for a, b in zip(self.logs, other.logs)]
        signs = [
            s * (t if k % 2 else 1) for s, t in zip(self.signs, other.signs)
        ]
        ev = None
        if self.expvec is not None and other.expvec is not None:
            ev = tuple(x + k * y for x, y in zip(self.expvec, other.expvec))
        return UnitVal(logs, signs, [mp.e**l for l in logs], ev)

    def values(self):
        return [s * m for s, m in zip(self.signs, self.mags)]

    def nrm2(self):
        return sum(l * l for l in self.logs)


def lagrange_reduce(units):
    units = sorted(units, key=lambda u: u.nrm2())
    a = None
    for u in units:
        if u.nrm2() > mp.mpf("1e-40"):
            a = u
            break
    if a is None:
        raise ComputationError("no nontrivial unit found in the kernel")
    b = None
    for u in units:
        cross = a.logs[0] * u.logs[1] - a.logs[1] * u.logs[0]
        cross2 = a.logs[0] * u.logs[2] - a.logs[2] * u.logs[0]
        if abs(cross) + abs(cross2) > mp.mpf("1e-30"):
            b = u
            break
    if b is None:
        raise ComputationError("rank-2 direction missing from the unit search")
    while True:
        if b.nrm2() < a.nrm2():
            a, b = b, a
        dot = sum(x * y for x, y in zip(a.logs, b.logs))
        k = int(mp.nint(dot / a.nrm2()))
        if k == 0:
            break
        b = b.times(a, -k)
    return a, b


def regulator(a, b):
    return abs(a.logs[0] * b.logs[1] - a.logs[1] * b.logs[0])


def pth_root_value_test(vals, p):
    """vals: signed real values at the 3 embeddings. Is there a p-th root in L?

    Checks whether some choice of real p-th roots has near-integer elementary
    symmetric functions (then it is an algebraic integer of degree <= 3 lying
    in L since its exact powers lie in L -- good enough as a detector here).
    Returns the chosen root values or None.
    """
    choices = []
    for v in vals:
        r = mp.root(abs(v), p)
        if p % 2 == 1:
            choices.append([mp.sign(v) * r])
        else:
            if v < 0:
                return None
            choices.append([r, -r])
    for signs in product(*choices):
        e1 = signs[0] + signs[1] + signs[2]
        e2 = signs[0] * signs[1] + signs[0] * signs[2] + signs[1] * signs[2]
        e3 = signs[0] * signs[1] * signs[2]
        if all(abs(e - mp.nint(e)) < mp.mpf("1e-40") for e in (e1, e2, e3)):
            return list(signs)
    return None


def saturate(a, b, pmax=SAT_PMAX):
    """Enlarge the pair by any p-th roots found; returns saturated pair."""
    changed = True
    while changed:
        changed = False
        for p in sympy.primerange(2, pmax + 1):
            found = None
            for ea, eb in product(range(p), repeat=2):
                if (ea, eb) == (0, 0):
                    continue
                cand = UnitVal([0, 0, 0], [1, 1, 1], [mp.mpf(1)] * 3)
                cand = cand.times(a, ea).times(b, eb)
                for tors in (1, -1):
                    vals = [tors * v for v in cand.values()]
                    roots = pth_root_value_test(vals, p)
                    if roots is not None:
                        found = roots
                        break
                if found:
                    break
            if found:
                logs = [mp.log(abs(v)) for v in found]
                signs = [1 if v > 0 else -1 for v in found]
                mags = [abs(v) for v in found]
                newu = UnitVal(logs, signs, mags, None)
                a, b = lagrange_reduce([a, b, newu])
                changed = True
    return a, b


# ------------------------------------------------------------- analytic part

def count_roots_mod(p, coeffs):
    """Number of distinct roots of f mod p (p unramified), via gcd(x^p - x, f)."""
    a2, a1, a0 = coeffs[1] % p, coeffs[2] % p, coeffs[3] % p
    r3 = ((-a0) % p, (-a1) % p, (-a2) % p)  # theta^3 coordinates
    r4 = (  # theta^4 = theta * theta^3
        (r3[2] * r3[0]) % p,
        (r3[0] + r3[2] * r3[1]) % p,
        (r3[1] + r3[2] * r3[2]) % p,
    )

    def pmul(u, v):
        c = [0] * 5
        for i in range(3):
            if u[i]:
                for j in range(3):
                    c[i + j] = (c[i + j] + u[i] * v[j]) % p
        return (
            (c[0] + c[3] * r3[0] + c[4] * r4[0]) % p,
            (c[1] + c[3] * r3[1] + c[4] * r4[1]) % p,
            (c[2] + c[3] * r3[2] + c[4] * r4[2]) % p,
        )

    xp = (1, 0, 0)
    base = (0, 1, 0)
    n = p
    while n:
        if n & 1:
            xp = pmul(xp, base)
        base = pmul(base, base)
        n >>= 1
    g = [xp[0] % p, (xp[1] - 1) % p, xp[2] % p]
    fpoly = [a0, a1, a2, 1]

    def deg(u):
        d = len(u) - 1
        while d >= 0 and u[d] % p == 0:
            d -= 1
        return d

    def polymod(u, v):
        u = u[:]
        dv = deg(v)
        inv = pow(v[dv], p - 2, p)
        while deg(u) >= dv:
            du = deg(u)
            coef = (u[du] * inv) % p
            for i in range(dv + 1):
                u[du - dv + i] = (u[du - dv + i] - coef * v[i]) % p
        return u

    A, B = fpoly, g
    while deg(B) >= 0:
        A, B = B, polymod(A, B)
    d = deg(A)
    return d if d > 0 else 0


def prime_splitting(p, coeffs, disc):
    """(e, f) list of the primes of L above p (assuming Z[theta] maximal)."""
    if disc % p == 0:
        if is_triple_root_pattern(p, coeffs) is not None:
            return [(3, 1)]
        return [(2, 1), (1, 1)]
    r = count_roots_mod(p, coeffs)
    if r == 3:
        return [(1, 1), (1, 1), (1, 1)]
    if r == 1:
        return [(1, 1), (1, 2)]
    return [(1, 3)]


def _local_ideal_counts(split, kmax):
    """Number of ideals of norm p^k above p, for k = 0..kmax."""
    c = [0] * (kmax + 1)
    c[0] = 1
    for (e, f) in split:
        newc = [0] * (kmax + 1)
        for k in range(kmax + 1):
            if c[k]:
                j = 0
                while k + j * f <= kmax:
                    newc[k + j * f] += c[k]
                    j += 1
        c = newc
    return c


def _spf_sieve(N):
    """Smallest prime factor table 0..N via numpy slicing."""
    spf = np.zeros(N + 1, dtype=np.int64)
    limit = int(math.isqrt(N))
    for p in range(2, limit + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    return spf


def dirichlet_quotient_coeffs(N, coeffs, disc):
    """Coefficients b(n) of zeta_L/zeta as a Dirichlet series, n <= N.

    b is multiplicative with b(p^k) = a(p^k) - a(p^(k-1)) where a counts
    ideals of L; it is filled in one pass with a smallest-prime-factor sieve.
    """
    spf = _spf_sieve(N)
    local = {}
    for p in sympy.primerange(2, N + 1):
        kmax = int(math.log(N, p) + 1e-9)
        a_loc = _local_ideal_counts(prime_splitting(p, coeffs, disc), kmax)
        local[p] = [1] + [a_loc[k] - a_loc[k - 1] for k in range(1, kmax + 1)]
    b = [0] * (N + 1)
    b[1] = 1
    for n in range(2, N + 1):
        p = int(spf[n])
        m = n
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        b[n] = b[m] * local[p][k]
    return b


def analytic_hR(coeffs, disc, N=200000):
    """Smoothed estimates of h*R via res zeta_L = 4 h R / sqrt(d_L)."""
    b = dirichlet_quotient_coeffs(N, coeffs, disc)
    bn = np.array(b[1:], dtype=np.float64)
    n = np.arange(1, N + 1, dtype=np.float64)
    ests = []
    for X in (N / 6.0, N / 3.0, N / 1.5):
        s = float(np.sum(bn / n * np.exp(-((n / X) ** 2))))
        ests.append(s * math.sqrt(disc) / 4.0)
    return ests


# --------------------------------------------------------------------- field

@dataclass(frozen=True)
class CubicUnit:
    """A fundamental unit: embedding values (110 digits) and an exact
    representation as a power product of ring elements."""

    values: tuple[str, str, str]
    elements: tuple[tuple[int, int, int], ...]
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class CubicField:
    """Invariants of the cubic field, decimal fields as 110-digit strings."""

    coeffs: tuple[int, int, int, int]
    disc: int
    d_resolvent: int
    h: int
    regulator: str
    roots: tuple[str, str, str]
    unit1: CubicUnit
    unit2: CubicUnit


def _squarefree_kernel(n: int) -> int:
    s = 1
    for p, e in sympy.factorint(n).items():
        if e % 2:
            s *= p
    return s


def check_preconditions(coeffs) -> tuple[int, int]:
    """Validate the cubic job; returns (disc, d_resolvent)."""
    disc = poly_disc(coeffs)
    if disc <= 0:
        raise ComputationError(
            f"disc(f) = {disc} <= 0: the cubic is not totally real"
        )
    if sympy.integer_nthroot(disc, 2)[1]:
        raise ComputationError(
            f"disc(f) = {disc} is a perfect square: Galois closure is C3, not S3"
        )
    for p, e in sympy.factorint(disc).items():
        if e >= 2 and not dedekind_p_maximal(coeffs, p):
            raise ComputationError(
                f"Z[theta] is not maximal at p = {p}; non-monogenic cubic "
                "rings are unsupported"
            )
    d_res = _squarefree_kernel(disc)
    if d_res % 4 != 1:
        raise ComputationError(
            f"quadratic resolvent discriminant {d_res} is not ≡ 1 (mod 4); "
            "this configuration is unsupported"
        )
    return disc, d_res


@lru_cache(maxsize=4)
def compute_cubic_field(coeffs) -> CubicField:
    """Full invariant computation for the cubic field defined by coeffs."""
    disc, d_res = check_preconditions(coeffs)
    with mp.workdps(WORK_DPS):
        rts = mp.polyroots(list(coeffs), maxsteps=200, extraprec=300)
        if any(abs(mp.im(r)) > mp.mpf("1e-100") for r in rts):
            raise ComputationError("cubic roots are not all real")
        roots = sorted([mp.re(r) for r in rts])

        fb = FactorBase(coeffs, disc, 200)
        elements, rows = collect_elements(fb)
        if len(elements) < 4 * len(fb.cols):
            raise ComputationError(
                f"only {len(elements)} smooth elements found over "
                f"{len(fb.cols)} columns; search box too small for this field"
            )

        M = sympy.Matrix([[r.get(j, 0) for j in range(len(fb.cols))] for r in rows])
        ns = M.T.nullspace()  # left kernel: exponent vectors of units
        units = []
        for v in ns:
            den = sympy.lcm([sympy.fraction(x)[1] for x in v])
            ivec = [int(x * den) for x in v]
            g = 0
            for x in ivec:
                g = math.gcd(g, abs(x))
            if g:
                ivec = [x // g for x in ivec]
            u = UnitVal.from_exponents(elements, ivec, roots)
            if u.nrm2() > mp.mpf("1e-40"):
                units.append(u)

        a, b = lagrange_reduce(units)
        a, b = saturate(a, b)
        R = regulator(a, b)

        ests = analytic_hR(coeffs, disc)
        h_ests = [v / float(R) for v in ests]
        h = round(h_ests[-1])
        if h < 1 or abs(h_ests[-1] - h) >= 0.25:
            raise ComputationError(
                f"class number not pinned by the analytic estimate: {h_ests}"
            )

        if a.expvec is None or b.expvec is None:
            raise ComputationError(
                "saturation replaced a generator; exact exponent bookkeeping "
                "lost — enlarge the element search instead"
            )
        used = sorted(
            i for i in range(len(elements)) if a.expvec[i] or b.expvec[i]
        )
        unit1 = CubicUnit(
            values=tuple(mp.nstr(v, 110) for v in a.values()),
            elements=tuple(elements[i] for i in used),
            exponents=tuple(a.expvec[i] for i in used),
        )
        unit2 = CubicUnit(
            values=tuple(mp.nstr(v, 110) for v in b.values()),
            elements=tuple(elements[i] for i in used),
            exponents=tuple(b.expvec[i] for i in used),
        )
        return CubicField(
            coeffs=tuple(coeffs),
            disc=disc,
            d_resolvent=d_res,
            h=h,
            regulator=mp.nstr(R, 110),
            roots=tuple(mp.nstr(r, 110) for r in roots),
            unit1=unit1,
            unit2=unit2,
        )


def resolvent_data(coeffs) -> RealQuadraticData:
    """Fundamental unit and class number of the quadratic resolvent of f."""
    _, d_res = check_preconditions(coeffs)
    return compute_real_quadratic(d_res)
