"""Exact integer and rational linear algebra.

Every other module builds on these helpers.  Matrices are plain lists of
row lists; entries are Python ``int`` or ``fractions.Fraction``.  Nothing
here touches floating point, so all results are exact.

Conventions:

- Lattices are row spans: a basis is a list of row vectors.
- ``hnf`` returns the unique row-style Hermite normal form of the row
  span (pivots positive, entries above each pivot reduced into
  ``[0, pivot)``, zero rows dropped), so equal lattices give equal bases.
- Kernels are returned as canonical (HNF) bases and are automatically
  saturated, because the integer kernel of an integer matrix is.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple, Union

Scalar = Union[int, Fraction]
Vec = List[int]
Mat = List[List[int]]
FracVec = List[Fraction]
FracMat = List[List[Fraction]]

__all__ = [
    "identity_matrix",
    "mat_transpose",
    "mat_mul",
    "mat_vec_mul",
    "vec_add",
    "vec_sub",
    "vec_scale",
    "vec_dot",
    "is_zero_vector",
    "det",
    "hnf",
    "hnf_with_transform",
    "left_kernel",
    "right_kernel",
    "rank",
    "saturate",
    "in_zspan",
    "solve_linear",
    "mat_inverse",
    "index_in",
    "rref_mod_p",
    "random_unimodular",
    "clear_denominators",
    "is_prime",
    "factor_int",
    "factor_fraction",
    "format_scalar",
]


def identity_matrix(n: int) -> Mat:
    """n-by-n identity matrix."""
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_transpose(mat: Sequence[Sequence[Scalar]]) -> List[List[Scalar]]:
    """Transpose of a rectangular matrix."""
    if not mat:
        return []
    return [list(col) for col in zip(*mat)]


def mat_mul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> List[List[Scalar]]:
    """Matrix product ``a @ b``."""
    if a and b and len(a[0]) != len(b):
        raise ValueError("incompatible shapes for matrix product")
    bt = mat_transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec_mul(mat: Sequence[Sequence[Scalar]], vec: Sequence[Scalar]) -> List[Scalar]:
    """Matrix-vector product ``mat @ vec``."""
    return [sum(x * y for x, y in zip(row, vec)) for row in mat]


def vec_add(u: Sequence[Scalar], v: Sequence[Scalar]) -> List[Scalar]:
    """Componentwise sum."""
    return [x + y for x, y in zip(u, v)]


def vec_sub(u: Sequence[Scalar], v: Sequence[Scalar]) -> List[Scalar]:
    """Componentwise difference."""
    return [x - y for x, y in zip(u, v)]


def vec_scale(v: Sequence[Scalar], c: Scalar) -> List[Scalar]:
    """Scalar multiple of a vector."""
    return [c * x for x in v]


def vec_dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    """Standard dot product."""
    if len(u) != len(v):
        raise ValueError("dot product of vectors of unequal length")
    return sum(x * y for x, y in zip(u, v))


def is_zero_vector(v: Sequence[Scalar]) -> bool:
    """True iff every entry is zero."""
    return all(x == 0 for x in v)


def _require_square(mat: Sequence[Sequence[Scalar]]) -> int:
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix is not square")
    return n


def det(mat: Sequence[Sequence[Scalar]]) -> Scalar:
    """Exact determinant of a square matrix (empty matrix has det 1).

    Integer matrices use fraction-free Bareiss elimination; matrices with
    Fraction entries use exact Gaussian elimination.
    """
    n = _require_square(mat)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in mat for x in row):
        return _det_bareiss([list(row) for row in mat])
    return _det_fraction([[Fraction(x) for x in row] for row in mat])


def _det_bareiss(a: Mat) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot_row is None:
                return 0
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_fraction(a: FracMat) -> Fraction:
    n = len(a)
    result = Fraction(1)
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            result = -result
        result *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] != 0:
                factor = a[i][k] * inv
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return result


def _as_int_matrix(mat: Sequence[Sequence[Scalar]]) -> Mat:
    out: Mat = []
    for row in mat:
        int_row: Vec = []
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError("integer matrix required")
                x = x.numerator
            int_row.append(int(x))
        out.append(int_row)
    return out


def hnf_with_transform(mat: Sequence[Sequence[int]]) -> Tuple[Mat, Mat]:
    """Row Hermite normal form with transform.

    Returns ``(h, u)`` where ``u`` is unimodular of size ``len(mat)``,
    ``h`` holds the nonzero rows of ``u @ mat`` in canonical HNF, and the
    remaining rows of ``u @ mat`` are zero (so ``u[len(h):]`` spans the
    left kernel of ``mat``).
    """
    a = _as_int_matrix(mat)
    m = len(a)
    u = identity_matrix(m)
    if m == 0:
        return [], []
    n = len(a[0])
    if any(len(row) != n for row in a):
        raise ValueError("matrix rows have unequal lengths")
    r = 0
    for col in range(n):
        live = [i for i in range(r, m) if a[i][col] != 0]
        while len(live) > 1:
            live.sort(key=lambda i: abs(a[i][col]))
            base = live[0]
            for i in live[1:]:
                q = a[i][col] // a[base][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[base])]
                u[i] = [x - q * y for x, y in zip(u[i], u[base])]
            live = [i for i in live if a[i][col] != 0]
        if not live:
            continue
        pivot_row = live[0]
        a[r], a[pivot_row] = a[pivot_row], a[r]
        u[r], u[pivot_row] = u[pivot_row], u[r]
        if a[r][col] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for j in range(r):
            q = a[j][col] // a[r][col]
            if q != 0:
                a[j] = [x - q * y for x, y in zip(a[j], a[r])]
                u[j] = [x - q * y for x, y in zip(u[j], u[r])]
        r += 1
    return [a[i] for i in range(r)], u


def hnf(mat: Sequence[Sequence[int]]) -> Mat:
    """Canonical row HNF basis of the row span; zero rows dropped."""
    h, _ = hnf_with_transform(mat)
    return h


def rank(mat: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals (= number of HNF rows)."""
    return len(hnf(mat))


def left_kernel(mat: Sequence[Sequence[int]]) -> Mat:
    """Canonical basis of ``{x : x @ mat = 0}`` (saturated by nature)."""
    h, u = hnf_with_transform(mat)
    return hnf(u[len(h):])


def right_kernel(mat: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Mat:
    """Canonical basis of ``{x : mat @ x = 0}``, rows of length ``ncols``."""
    if not mat:
        if ncols is None:
            raise ValueError("right_kernel of an empty matrix needs ncols")
        return identity_matrix(ncols)
    return left_kernel(mat_transpose(mat))


def saturate(mat: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Mat:
    """Canonical basis of the saturation of the row span inside Z^n.

    The saturation is the set of integer vectors lying in the rational row
    span; it contains the row span with finite index.
    """
    if not mat:
        return []
    perp = right_kernel(mat, ncols=ncols)
    return right_kernel(perp, ncols=len(mat[0]))


def in_zspan(hnf_rows: Sequence[Sequence[int]], v: Sequence[int]) -> Optional[Vec]:
    """Coefficients of ``v`` in an HNF basis, or None if outside the span.

    ``hnf_rows`` must already be in row HNF (as produced by :func:`hnf`).
    """
    x = list(v)
    coeffs: Vec = []
    for row in hnf_rows:
        pivot_col = next(j for j, val in enumerate(row) if val != 0)
        q, rem = divmod(x[pivot_col], row[pivot_col])
        if rem != 0:
            return None
        if q != 0:
            x = [a - q * b for a, b in zip(x, row)]
        coeffs.append(q)
    if not is_zero_vector(x):
        return None
    return coeffs


def solve_linear(mat: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> Optional[FracVec]:
    """One exact solution ``x`` of ``mat @ x = rhs``, or None if inconsistent.

    Works for general rectangular systems; free variables are set to zero.
    """
    rows = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    ncols = len(mat[0]) if mat else 0
    pivots: List[Tuple[int, int]] = []
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        rows[r] = [x / rows[r][col] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, col))
        r += 1
    for i in range(r, len(rows)):
        if rows[i][ncols] != 0:
            return None
    solution = [Fraction(0)] * ncols
    for row_idx, col in pivots:
        solution[col] = rows[row_idx][ncols]
    return solution


def mat_inverse(mat: Sequence[Sequence[Scalar]]) -> FracMat:
    """Exact inverse of a nonsingular square matrix."""
    n = _require_square(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        pivot_row = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot_row is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        aug[col] = [x / aug[col][col] for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def index_in(ambient: Sequence[Sequence[int]], sub: Sequence[Sequence[int]]) -> int:
    """Index ``[span(ambient) : span(sub)]`` for a finite-index sublattice.

    Raises ValueError if ``sub`` is not contained in ``ambient`` or the
    index is infinite (unequal ranks).
    """
    ambient_h = hnf(ambient)
    coeff_rows: Mat = []
    for v in sub:
        coeffs = in_zspan(ambient_h, v)
        if coeffs is None:
            raise ValueError("sub is not contained in ambient lattice")
        coeff_rows.append(coeffs)
    sub_rank = rank(coeff_rows)
    if sub_rank < len(ambient_h):
        raise ValueError("sublattice has infinite index")
    square = hnf(coeff_rows)
    value = det(square)
    return abs(int(value))


def rref_mod_p(mat: Sequence[Sequence[int]], p: int) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form over the field with p elements.

    Returns ``(rows, pivot_columns)`` with zero rows dropped and all
    entries normalized into ``[0, p)``.
    """
    rows = [[x % p for x in row] for row in mat]
    ncols = len(rows[0]) if rows else 0
    pivot_cols: List[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][col] % p != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = pow(rows[r][col], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] % p != 0:
                factor = rows[i][col]
                rows[i] = [(x - factor * y) % p for x, y in zip(rows[i], rows[r])]
        pivot_cols.append(col)
        r += 1
    return rows[:r], pivot_cols


def random_unimodular(n: int, rng, steps: Optional[int] = None) -> Mat:
    """Random unimodular integer matrix built from elementary operations.

    ``rng`` is a ``random.Random`` instance, so results are reproducible
    from a seed.  Determinant is always +1 or -1.
    """
    mat = identity_matrix(n)
    if n <= 1:
        return mat
    if steps is None:
        steps = 2 * n
    for _ in range(steps):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        mat[i] = [x + c * y for x, y in zip(mat[i], mat[j])]
    order = list(range(n))
    rng.shuffle(order)
    mat = [mat[i] for i in order]
    for i in range(n):
        if rng.random() < 0.5:
            mat[i] = [-x for x in mat[i]]
    return mat


def clear_denominators(mat: Sequence[Sequence[Scalar]]) -> Tuple[Mat, int]:
    """Scale a rational matrix to an integer one; returns (scaled, multiplier)."""
    multiplier = 1
    for row in mat:
        for x in row:
            if isinstance(x, Fraction):
                multiplier = multiplier * x.denominator // gcd(multiplier, x.denominator)
    scaled = [[int(x * multiplier) for x in row] for row in mat]
    return scaled, multiplier


def is_prime(n: int) -> bool:
    """Deterministic primality test by trial division (fine at this scale)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_int(n: int) -> Dict[int, int]:
    """Prime factorization of a positive integer as {prime: exponent}."""
    if n <= 0:
        raise ValueError("factor_int needs a positive integer")
    factors: Dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                factors[p] = factors.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return dict(sorted(factors.items()))


def factor_fraction(q: Union[int, Fraction]) -> Dict[int, int]:
    """Factorization of a positive rational; denominators get negative exponents."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("factor_fraction needs a positive rational")
    factors = factor_int(q.numerator)
    for p, e in factor_int(q.denominator).items():
        factors[p] = factors.get(p, 0) - e
    return dict(sorted((p, e) for p, e in factors.items() if e != 0))


def format_scalar(q: Union[int, Fraction]) -> str:
    """Render an exact scalar as 'a' or 'a/b'."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
