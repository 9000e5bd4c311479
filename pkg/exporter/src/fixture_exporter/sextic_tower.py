"""Galois closure F (degree 6, totally real, group S3) of a cubic field L.

Consumes the exact outputs of the cubic stage (fundamental units of L as
power products, regulator to 110 digits) and the quadratic stage (fundamental
unit and class number of the resolvent K) and computes, at 250 dps:

* the 6 real embeddings of F indexed by S3 (root permutation + sign of the
  Vandermonde square root of the discriminant);
* the subgroup lattice Gamma = <eps_K, u1, u2, u1', u2'> of U(F), its
  regulator, LLL reduction, and saturation at p in {2, 3, 5, 7} ->
  fundamental units of F, R(F), the unit index [U(F):Gamma], h(F);
* Galois action matrices of the reflection a and rotation b on the
  fundamental basis (exact integers, sign-verified);
* for each supported S-prime p (totally ramified in L, inert in K, with a
  principal generator of norm ±p): S-logs, S-regulators of all four fields,
  the S-unit index, and S-action matrices.

h(F) is pinned by the residue identity h_F * R_F = h_K * h_L^2 * R_K * R_L^2:
zeta_F = zeta * L(chi_K) * L(rho)^2 with zeta_L = zeta * L(rho), so
res zeta_F = res zeta_K * (res zeta_L)^2 / (res zeta)^2; expanding each
residue as 2^r1 (2 pi)^r2 h R / (w sqrt|d|) and using the
conductor-discriminant relation |d_F| = |d_K| |d_L|^2 cancels every
non-(h, R) factor because all three fields are totally real with w = 2.

The index [U(F):Gamma] is certified exactly: Gamma's coordinates in the
fundamental basis are integers whose determinant must reproduce the
regulator quotient.  (For any unit u of F, the norm-coset identity
(1+a) + (1+ab) + (1+ab^2) + (1+b+b^2) = 3 + sum over S3 in the group ring
shows u^3 * N_{F/Q}(u) is a product of subfield norms of u, hence lies in
Gamma up to sign whenever the subfield unit groups are fundamental; the
index is then a power of 3, and 3-saturation of the basis pins the
fundamental lattice.)
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

import mpmath as mp
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from .cubics import CubicField, compute_cubic_field, find_norm_generator, \
    is_triple_root_pattern, norm_exact, resolvent_data
from .errors import ComputationError
from .quadratics import RealQuadraticData

WORK_DPS = 250

S3 = [p for p in permutations((0, 1, 2))]

IDP = (0, 1, 2)
BP = (1, 2, 0)   # rotation: th_i -> th_{i+1 mod 3}; moves th_0, generates C3
AP = (0, 2, 1)   # reflection fixing th_0 (so fixing L = Q(th_0) pointwise)


def sgn(perm):
    s = 1
    for i in range(3):
        for j in range(i + 1, 3):
            if perm[i] > perm[j]:
                s = -s
    return s


def compose(h, g):
    """(h o g)(i) = h(g(i))"""
    return tuple(h[g[i]] for i in range(3))


# canonical embedding order (columns of all log matrices)
EMBED = [IDP, BP, compose(BP, BP), AP, compose(AP, BP), compose(AP, compose(BP, BP))]
EMB_INDEX = {g: i for i, g in enumerate(EMBED)}


class UnitF:
    """A nonzero element of F known by its values at the 6 embeddings."""

    __slots__ = ("logs", "signs")

    def __init__(self, logs, signs):
        self.logs = list(logs)
        self.signs = list(signs)

    @classmethod
    def from_values(cls, vals):
        return cls([mp.log(abs(v)) for v in vals],
                   [1 if v > 0 else -1 for v in vals])

    def values(self):
        return [s * mp.e**l for s, l in zip(self.signs, self.logs)]

    def times(self, other, k=1):
        logs = [a + k * b for a, b in zip(self.logs, other.logs)]
        signs = [s * (t if k % 2 else 1)
                 for s, t in zip(self.signs, other.signs)]
        return UnitF(logs, signs)

    def power(self, k):
        return UnitF([k * l for l in self.logs],
                     [s if k % 2 else 1 for s in self.signs])

    def conjugate(self, g):
        """Image under the automorphism g: value at h of g(x) is value at h o g."""
        order = [EMB_INDEX[compose(h, g)] for h in EMBED]
        return UnitF([self.logs[i] for i in order], [self.signs[i] for i in order])

    def nrm2(self):
        return sum(l * l for l in self.logs)


# --------------------------------------------------------------- LLL (rank r)

def gram_schmidt(basis):
    r = len(basis)
    mu = [[mp.mpf(0)] * r for _ in range(r)]
    ortho = []
    for i, b in enumerate(basis):
        v = list(b.logs)
        for j in range(i):
            denom = sum(x * x for x in ortho[j])
            mu[i][j] = sum(x * y for x, y in zip(b.logs, ortho[j])) / denom
            v = [x - mu[i][j] * y for x, y in zip(v, ortho[j])]
        ortho.append(v)
    return ortho, mu


def lll_reduce(basis, delta="0.99"):
    basis = list(basis)
    d = mp.mpf(delta)
    k = 1
    while k < len(basis):
        ortho, mu = gram_schmidt(basis)
        for j in range(k - 1, -1, -1):
            q = int(mp.nint(mu[k][j]))
            if q:
                basis[k] = basis[k].times(basis[j], -q)
                ortho, mu = gram_schmidt(basis)
        nk = sum(x * x for x in ortho[k])
        nk1 = sum(x * x for x in ortho[k - 1])
        if nk >= (d - mu[k][k - 1] ** 2) * nk1:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            k = max(k - 1, 1)
    return basis


def lattice_det(basis):
    """|det| of the rank-r log lattice (first r columns)."""
    r = len(basis)
    m = mp.matrix([[basis[i].logs[j] for j in range(r)] for i in range(r)])
    return abs(mp.det(m))


# ----------------------------------------------------------------- saturation

def sym_funcs(vals):
    """Non-leading coefficients of the monic polynomial with the given roots."""
    poly = [mp.mpf(1)]
    for v in vals:
        nxt = [mp.mpf(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i] += c
            nxt[i + 1] -= c * v
        poly = nxt
    return poly[1:]


def near_integers(xs, tol="1e-30"):
    t = mp.mpf(tol)
    return all(abs(x - mp.nint(x)) < t for x in xs)


# --------------------------------------------------- integer coordinate solve

def solve_coords(basis, target_logs, tol="1e-50"):
    """Integer x with sum x_i basis_i.logs == target_logs, else None."""
    r = len(basis)
    ncols = len(target_logs)
    B = mp.matrix(r, r)
    rhs = mp.matrix(r, 1)
    for i in range(r):
        for j in range(r):
            B[i, j] = sum(basis[j].logs[c] * basis[i].logs[c] for c in range(ncols))
        rhs[i] = sum(target_logs[c] * basis[i].logs[c] for c in range(ncols))
    x = mp.lu_solve(B, rhs)
    ints = [int(mp.nint(v)) for v in x]
    # verify
    for c in range(ncols):
        acc = sum(ints[j] * basis[j].logs[c] for j in range(r))
        if abs(acc - target_logs[c]) > mp.mpf(tol):
            return None
    return ints


class S3Closure:
    """Embedding tables and unit lattices of the closure of one cubic field."""

    def __init__(self, cubic: CubicField, quad: RealQuadraticData):
        self.cubic = cubic
        self.quad = quad
        self.roots = sorted(
            mp.re(r) for r in mp.polyroots(list(cubic.coeffs), maxsteps=400,
                                           extraprec=400)
        )
        self.sqrt_d = mp.sqrt(mp.mpf(quad.d))
        self._basis_matrix = None

    # ------------------------------------------------------------ elements

    def eval_cubic(self, c, i):
        th = self.roots[i]
        return c[0] + c[1] * th + c[2] * th * th

    def lift_L(self, c):
        """Element of L = Q(th_0) into F: value at embedding h is c(th_{h(0)})."""
        vals = [self.eval_cubic(c, h[0]) for h in EMBED]
        return UnitF.from_values(vals)

    def lift_L_exponents(self, unit):
        """Unit of L from its exact power-product representation."""
        u = UnitF([mp.mpf(0)] * 6, [1] * 6)
        for elem, k in zip(unit.elements, unit.exponents):
            if k:
                u = u.times(self.lift_L(tuple(elem)), k)
        return u

    def eps_unit(self):
        """eps_K as an element of F (value eps at the identity embedding)."""
        vals = []
        for h in EMBED:
            v = (self.quad.unit_a + sgn(h) * self.quad.unit_b * self.sqrt_d) / 2
            vals.append(v)
        return UnitF.from_values(vals)

    # ---------------------------------------------------------- saturation

    def field_basis_matrix(self):
        """6x6 matrix of the Q-basis th^i * sqrtD^j of F at the 6 embeddings."""
        if self._basis_matrix is None:
            rows = []
            for h in EMBED:
                th = self.roots[h[0]]
                sq = sgn(h) * self.sqrt_d
                rows.append([th**i * sq**j for j in range(2) for i in range(3)])
            self._basis_matrix = mp.matrix(rows)
        return self._basis_matrix

    def in_field(self, vals, max_den=10**30, tol=None):
        """Do the 6 embedding values come from a single element of F?

        Solves for Q-basis coordinates and demands that each coordinate
        rationally reconstructs with a moderate denominator.
        """
        if tol is None:
            tol = mp.mpf(10) ** (-(mp.mp.dps - 80))
        V = self.field_basis_matrix()
        rhs = mp.matrix([[v] for v in vals])
        try:
            x = mp.lu_solve(V, rhs)
        except ZeroDivisionError:
            return False
        for c in x:
            fr = Fraction(mp.nstr(c, 60)).limit_denominator(max_den)
            if abs(c - mp.mpf(fr.numerator) / fr.denominator) > tol * max(1, abs(c)):
                return False
        return True

    def find_pth_root(self, unit, p):
        """Real p-th root values of `unit` when the root is a genuine element
        of F: near-integer characteristic polynomial AND F-membership."""
        vals = unit.values()
        if p % 2 == 1:
            roots = [mp.sign(v) * mp.root(abs(v), p) for v in vals]
            if near_integers(sym_funcs(roots)) and self.in_field(roots):
                return roots
            return None
        # p = 2: need a totally positive candidate (or its negative)
        for tors in (1, -1):
            w = [tors * v for v in vals]
            if any(v < 0 for v in w):
                continue
            base = [mp.sqrt(v) for v in w]
            # try sign patterns, first root positive WLOG
            for signs in product((1, -1), repeat=5):
                roots = [base[0]] + [s * b for s, b in zip(signs, base[1:])]
                if near_integers(sym_funcs(roots)) and self.in_field(roots):
                    return roots
        return None

    def saturate(self, basis, primes=(2, 3, 5, 7)):
        events = []
        changed = True
        while changed:
            changed = False
            for p in primes:
                found = None
                vecs = []
                r = len(basis)
                for vec in product(range(p), repeat=r):
                    if all(v == 0 for v in vec):
                        continue
                    first = next(v for v in vec if v)
                    if first != 1:  # up to scalar for odd p; harmless for p=2
                        continue
                    vecs.append(vec)
                for vec in vecs:
                    cand = basis[0].power(0)
                    for u, e in zip(basis, vec):
                        if e:
                            cand = cand.times(u, e)
                    roots = self.find_pth_root(cand, p)
                    if roots is not None:
                        found = (vec, roots)
                        break
                if found:
                    vec, roots = found
                    gamma = UnitF.from_values(roots)
                    j = next(i for i, e in enumerate(vec) if e % p != 0)
                    events.append({"p": p, "class": list(vec)})
                    basis[j] = gamma
                    basis = lll_reduce(basis)
                    changed = True
                    break
        return basis, events

    def action_matrix(self, basis, g):
        """Columns = coordinates of g(basis_j) in the basis; verifies signs."""
        r = len(basis)
        cols = []
        for j in range(r):
            img = basis[j].conjugate(g)
            x = solve_coords(basis, img.logs)
            if x is None:
                raise ComputationError(
                    f"conjugate of basis[{j}] not in the unit lattice"
                )
            # sign check: product of basis^x must equal img up to a global -1
            acc = basis[0].power(0)
            for u, e in zip(basis, x):
                if e:
                    acc = acc.times(u, e)
            ratios = {s * t for s, t in zip(acc.signs, img.signs)}
            if len(ratios) != 1:
                raise ComputationError(
                    "sign mismatch is not a global torsion unit"
                )
            cols.append(x)
        return [[cols[j][i] for j in range(r)] for i in range(r)]  # mat[i][j]


def _check_s_prime(p: int, cubic: CubicField, quad: RealQuadraticData):
    """Validate the supported decomposition type for an S-prime.

    Supported: p totally ramified in L (f a perfect cube mod p) and inert in
    the resolvent K.  Then the closure has a single prime P over p with
    e = 3, f = 2 and full decomposition group (class "G"), and P is
    principal, generated by the norm ±p element of L.
    """
    if quad.d % p == 0:
        raise ComputationError(
            f"S-prime {p} ramifies in the quadratic resolvent; unsupported"
        )
    if is_triple_root_pattern(p, cubic.coeffs) is None:
        raise ComputationError(
            f"S-prime {p} is not totally ramified in the cubic field; "
            "only the totally-ramified/inert decomposition type is supported"
        )
    if p == 2:
        chi = 1 if quad.d % 8 == 1 else -1
    else:
        chi = int(sympy.jacobi_symbol(quad.d, p))
    if chi != -1:
        raise ComputationError(
            f"S-prime {p} is not inert in the quadratic resolvent; "
            "only the totally-ramified/inert decomposition type is supported"
        )
    gen = find_norm_generator(cubic.coeffs, p)
    if gen is None:
        raise ComputationError(
            f"no generator of norm ±{p} found on the search grid; the prime "
            f"over {p} may be non-principal"
        )
    if abs(norm_exact(gen, cubic.coeffs)) != p:
        raise ComputationError(f"generator search for {p} returned a bad element")
    return gen


@lru_cache(maxsize=4)
def compute_s3_closure(coeffs: tuple, s_primes: tuple = ()) -> dict:
    """Unit and S-unit lattices of the S3 closure; decimals as 60-digit strings.

    The returned dict carries the closure's class numbers, regulators, unit
    logs, action matrices and indices (plus the S-counterparts when s_primes
    is nonempty), together with per-prime decomposition metadata under
    "s_meta" for the fixture assembler.
    """
    cubic = compute_cubic_field(coeffs)
    quad = resolvent_data(coeffs)
    h_k, h_l = quad.h, cubic.h
    gens_p = {p: _check_s_prime(p, cubic, quad) for p in s_primes}

    with mp.workdps(WORK_DPS):
        cl = S3Closure(cubic, quad)

        E = cl.eps_unit()
        u1 = cl.lift_L_exponents(cubic.unit1)
        u2 = cl.lift_L_exponents(cubic.unit2)
        u1p = u1.conjugate(BP)
        u2p = u2.conjugate(BP)
        gamma = [E, u1, u2, u1p, u2p]
        for name, u in zip(("eps", "u1", "u2", "u1'", "u2'"), gamma):
            if abs(sum(u.logs)) >= mp.mpf("1e-200"):
                raise ComputationError(f"product formula violated for {name}")
        R_gamma = lattice_det(gamma)

        basis = lll_reduce(list(gamma))
        basis, events = cl.saturate(basis)
        R_F = lattice_det(basis)
        idx = R_gamma / R_F
        index = int(mp.nint(idx))
        if abs(idx - index) >= mp.mpf("1e-40"):
            raise ComputationError("unit index not integral")

        # residue pin (see module docstring): h_F R_F = h_K h_L^2 R_K R_L^2,
        # with R_L taken from the cubic stage's 110-digit decimal record
        R_L = mp.mpf(cubic.regulator)
        log_eps = mp.log((quad.unit_a + quad.unit_b * cl.sqrt_d) / 2)
        hR_F = (h_k * h_l**2) * log_eps * R_L**2
        h_F_est = hR_F / R_F
        h_F = int(mp.nint(h_F_est))
        if h_F < 1 or abs(h_F_est - h_F) >= mp.mpf("1e-6"):
            raise ComputationError(
                f"h(F) not pinned by the residue identity: {mp.nstr(h_F_est, 30)}"
            )

        # Galois action on the fundamental basis
        A_mat = cl.action_matrix(basis, AP)
        B_mat = cl.action_matrix(basis, BP)

        # Gamma coordinates in the fundamental basis -> exact index check
        coord_rows = []
        for u in gamma:
            x = solve_coords(basis, u.logs)
            if x is None:
                raise ComputationError("Gamma generator outside the basis lattice")
            coord_rows.append(x)
        exact_index = abs(sympy.Matrix(coord_rows).det())
        if exact_index != index:
            raise ComputationError(
                f"regulator-quotient index {index} disagrees with exact "
                f"coordinate determinant {exact_index}"
            )

        def dec(x, nd=60):
            return mp.nstr(x, nd)

        out = {
            "h": {"F": h_F, "L": h_l, "K": h_k, "Q": 1},
            "index_arch": int(exact_index),
            "saturation_events": events,
            "regulators_arch": {
                "F": dec(R_F),
                "L": dec(R_L),
                "K": dec(log_eps),
                "Q": "1",
            },
            "unit_logs_arch": {
                "matrix": [[dec(l) for l in u.logs] for u in basis],
                "places": [{"e": 1, "f": 1} for _ in range(6)],
            },
            "unit_action_arch": [A_mat, B_mat],
            "gamma_coords": [list(map(int, r)) for r in coord_rows],
            "s_meta": [],
        }

        if not s_primes:
            return out

        # ---------------- S = {infinity} u {primes above each p} ----------
        pis = {}
        for p in s_primes:
            pi = cl.lift_L(gens_p[p])
            # single prime P over p in F with e = 3, f = 2, N(P) = p^2,
            # v_P(pi) = 1; the sum of arch logs is log N_F(pi) = log p^2
            if abs(sum(pi.logs) - mp.log(mp.mpf(p * p))) >= mp.mpf("1e-200"):
                raise ComputationError(f"norm of the {p}-generator is not {p}^2 in F")
            pis[p] = pi

        s_basis = basis + [pis[p] for p in s_primes]
        nfin = len(s_primes)

        def s_action_matrix(g):
            r = len(s_basis)
            cols = []
            for j in range(r):
                img = s_basis[j].conjugate(g)
                if j < len(basis):
                    x = solve_coords(basis, img.logs)
                    if x is None:
                        raise ComputationError("unit conjugate left the lattice")
                    cols.append(x + [0] * nfin)
                else:
                    # img = g(pi_p): v_P = 1; img/pi_p is an archimedean unit
                    pi = s_basis[j]
                    diff = [a - b for a, b in zip(img.logs, pi.logs)]
                    x = solve_coords(basis, diff)
                    if x is None:
                        raise ComputationError("g(pi)/pi is not in U(F)")
                    vrow = [0] * nfin
                    vrow[j - len(basis)] = 1
                    cols.append(x + vrow)
            return [[cols[j][i] for j in range(r)] for i in range(r)]

        A_mat_S = s_action_matrix(AP)
        B_mat_S = s_action_matrix(BP)

        # S-regulator of F: 6 arch columns + one finite column per prime
        # (entry -v_P log N(P)); drop arch column 0
        logn = {p: mp.log(mp.mpf(p * p)) for p in s_primes}

        def s_logvec(u, vvec):
            return u.logs + [-v * logn[p] for p, v in zip(s_primes, vvec)]

        zero_v = [0] * nfin
        s_rows = [s_logvec(u, zero_v) for u in basis]
        for i, p in enumerate(s_primes):
            v = [0] * nfin
            v[i] = 1
            s_rows.append(s_logvec(pis[p], v))
        dim = 5 + nfin
        m = mp.matrix([[row[j] for j in range(1, dim + 1)] for row in s_rows])
        R_S_F = abs(mp.det(m))

        # S-index: Gamma_S = U_S(K) U_S(L) U_S(L') generated by
        # {eps, p...} u {u1, u2, pi...} u {u1', u2', pi'...}
        rationals = [UnitF([mp.log(mp.mpf(p))] * 6, [1] * 6) for p in s_primes]
        pi_list = [pis[p] for p in s_primes]
        pip_list = [pi.conjugate(BP) for pi in pi_list]
        gens = [E] + rationals + [u1, u2] + pi_list + [u1p, u2p] + pip_list
        # structural finite valuations: rational p has v = e = 3 at its own
        # prime, pi_p and its conjugates have v = 1 there, units have v = 0
        gen_vs = (
            [zero_v]
            + [[3 if q == p else 0 for q in s_primes] for p in s_primes]
            + [zero_v, zero_v]
            + [[1 if q == p else 0 for q in s_primes] for p in s_primes]
            + [zero_v, zero_v]
            + [[1 if q == p else 0 for q in s_primes] for p in s_primes]
        )
        grows = []
        for u, vvec in zip(gens, gen_vs):
            expect = sum(v * logn[p] for p, v in zip(s_primes, vvec))
            if abs(sum(u.logs) - expect) >= mp.mpf("1e-200"):
                raise ComputationError("S-generator valuation bookkeeping failed")
            diff = list(u.logs)
            for v, p in zip(vvec, s_primes):
                if v:
                    diff = [a - v * b for a, b in zip(diff, pis[p].logs)]
            x = solve_coords(basis, diff)
            if x is None:
                raise ComputationError("S-generator outside the S-unit lattice")
            grows.append(x + list(vvec))
        G = sympy.Matrix(grows)
        # index of the row lattice of G inside Z^(5+nfin): HNF pivot product
        H = hermite_normal_form(G.T)  # columns span; HNF of the column lattice
        s_index = abs(H.det())

        # S-regulators of the subfields (one inert prime of K, one totally
        # ramified prime of L, and the rational prime itself per S-prime)
        logp = {p: mp.log(mp.mpf(p)) for p in s_primes}
        # K: rows eps then each rational prime; columns: both arch places
        # and all but the last finite place
        krows = [[log_eps, -log_eps] + [mp.mpf(0)] * (nfin - 1)]
        for p in s_primes:
            row = [logp[p], logp[p]]
            for q in s_primes[:-1]:
                row.append(-2 * logp[p] if q == p else mp.mpf(0))
            krows.append(row)
        R_S_K = abs(mp.det(mp.matrix(krows)))
        # L: rows u1, u2 then each pi; columns: arch 1, arch 2, finite places
        lrows = []
        for rec in (cubic.unit1, cubic.unit2):
            vals = [mp.mpf(v) for v in rec.values]
            lrows.append([mp.log(abs(v)) for v in vals] + [mp.mpf(0)] * nfin)
        for p in s_primes:
            pvals = [cl.eval_cubic(gens_p[p], i) for i in range(3)]
            fin = [-logp[p] if q == p else mp.mpf(0) for q in s_primes]
            lrows.append([mp.log(abs(v)) for v in pvals] + fin)
        cols = list(range(1, 3 + nfin))
        R_S_L = abs(mp.det(mp.matrix([[row[j] for j in cols] for row in lrows])))
        # Q: drop the arch place; the valuation matrix of the primes is
        # diagonal, so the S-regulator is the product of the log p
        R_S_Q = mp.mpf(1)
        for p in s_primes:
            R_S_Q *= logp[p]

        out.update({
            "index_S": int(s_index),
            "regulators_S": {
                "F": dec(R_S_F),
                "L": dec(R_S_L),
                "K": dec(R_S_K),
                "Q": dec(R_S_Q),
            },
            "unit_logs_S": {
                "matrix": [[dec(l) for l in row] for row in s_rows],
                "places": [{"e": 1, "f": 1} for _ in range(6)]
                + [{"e": 3, "f": 2} for _ in s_primes],
            },
            "unit_action_S": [A_mat_S, B_mat_S],
            "s_meta": [
                {
                    "p": p,
                    "e": 3,
                    "f": 2,
                    "decomposition_class": "G",
                    "generator": list(gens_p[p]),
                }
                for p in s_primes
            ],
        })
        return out
