"""Integer lattices with a verified action of a finite group.

Vectors are columns: the matrix for a group element g sends the column
vector v to action(g)·v, and action is a group homomorphism.  The module
provides the permutation lattices, algebra on lattices (sums, tensor
products, sign twists, stable spans), fixed sublattices, invariant
pairings and their Gram determinants, fixed-sum indices, sampling of
stable sub- and overlattices, and rational multiplicities for dihedral
groups of order 2p.  Everything is exact; no floating point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .exactla import (
    det,
    hnf,
    identity_matrix,
    is_prime,
    mat_inverse,
    mat_mul,
    mat_transpose,
    right_kernel,
    rref_mod_p,
    solve_linear,
)
from .groups import (
    FiniteGroup,
    SubgroupClass,
    build_group,
    left_cosets,
    subgroup_class_by_label,
)

__all__ = [
    "ZGLattice",
    "InvariantPairing",
    "Sublattice",
    "permutation_lattice",
    "lattice_from_generators",
    "lattice_algebra",
    "direct_sum",
    "tensor_product",
    "twist_sign",
    "span_sublattice",
    "fixed_sublattice",
    "averaged_pairing",
    "standard_pairing",
    "inherited_pairing",
    "gram_determinant",
    "sum_of_fixed_index",
    "random_stable_sublattice",
    "overlattices_mod_p",
    "restrict_lattice",
    "induce_lattice",
    "rational_multiplicities_d2p",
    "isotypic_sublattice_d2p",
    "isotypic_sum_index_d2p",
    "lattice_to_json",
    "lattice_from_json",
]

Matrix = Tuple[Tuple[int, ...], ...]


def _freeze(mat: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in mat)


class ZGLattice:
    """Free integer lattice of finite rank with a verified group action.

    Construction takes the full element → matrix map and checks that the
    identity maps to the identity matrix, that every Cayley edge along
    the declared generators is respected (which forces the homomorphism
    property on all pairs, by induction on word length), and that the
    generator matrices are unimodular (so all matrices are, by
    multiplicativity).
    """

    def __init__(self, group: FiniteGroup, matrices: Mapping[int, Sequence[Sequence[int]]]) -> None:
        if set(matrices) != set(range(group.order)):
            raise ValueError("need exactly one action matrix per group element")
        cache = [_freeze(matrices[g]) for g in range(group.order)]
        rank = len(cache[0])
        for mat in cache:
            if len(mat) != rank or any(len(row) != rank for row in mat):
                raise ValueError("action matrices must be square and equal-sized")
        if cache[group.identity] != _freeze(identity_matrix(rank)):
            raise ValueError("identity element must act as the identity matrix")
        for s in group.generator_indices:
            if det(cache[s]) not in (1, -1):
                raise ValueError(
                    f"action matrix for generator {group.element_labels[s]!r} "
                    "is not unimodular"
                )
        for x in range(group.order):
            for s in group.generator_indices:
                if _freeze(mat_mul(cache[x], cache[s])) != cache[group.mul[x][s]]:
                    raise ValueError(
                        "action matrices violate the multiplication table at "
                        f"({group.element_labels[x]!r}, {group.element_labels[s]!r})"
                    )
        self.group = group
        self.rank = rank
        self._action = tuple(cache)

    def action(self, g: int) -> Matrix:
        """The matrix of a group element."""
        return self._action[g]

    def trace(self, g: int) -> int:
        """Trace of the element's matrix."""
        mat = self._action[g]
        return sum(mat[i][i] for i in range(self.rank))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ZGLattice({self.group.name}, rank={self.rank})"


@dataclass(frozen=True)
class InvariantPairing:
    """A G-invariant symmetric bilinear form on a lattice."""

    lattice: ZGLattice
    gram: Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Sublattice:
    """A saturated sublattice, columns of ``basis`` being a ℤ-basis."""

    ambient: ZGLattice
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        """Number of basis columns."""
        return len(self.basis[0]) if self.basis else 0

    def column_vectors(self) -> Tuple[Tuple[int, ...], ...]:
        """Basis vectors, one tuple per column."""
        if not self.basis:
            return ()
        return tuple(zip(*self.basis))


def _same_group(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a is b or (a.mul == b.mul and a.element_labels == b.element_labels)


def _subgroup_elements(
    group: FiniteGroup, subgroup: Union[SubgroupClass, str, Sequence[int]]
) -> Tuple[int, ...]:
    """Element tuple for a subgroup given as class, label, or raw elements."""
    if isinstance(subgroup, str):
        return subgroup_class_by_label(group, subgroup).representative
    if isinstance(subgroup, SubgroupClass):
        return subgroup.representative
    elements = frozenset(int(x) for x in subgroup)
    if not group.is_subgroup(elements):
        raise ValueError("element set is not a subgroup")
    return tuple(sorted(elements))


def permutation_lattice(
    group: FiniteGroup, subgroup: Union[SubgroupClass, str, Sequence[int]]
) -> ZGLattice:
    """The free lattice on the left cosets of a subgroup.

    Basis columns follow the deterministic coset enumeration; the matrix
    of g permutes them by left translation.
    """
    from .groups import coset_action, left_cosets

    elements = _subgroup_elements(group, subgroup)
    cosets = left_cosets(group, elements)
    action = coset_action(group, cosets)
    n = len(cosets)
    matrices: Dict[int, List[List[int]]] = {}
    for g in range(group.order):
        mat = [[0] * n for _ in range(n)]
        for j in range(n):
            mat[action[g][j]][j] = 1
        matrices[g] = mat
    return ZGLattice(group, matrices)


def lattice_from_generators(
    group: FiniteGroup,
    matrices: Sequence[Sequence[Sequence[int]]],
    rank: Optional[int] = None,
) -> ZGLattice:
    """Lattice from one integer matrix per declared group generator.

    The matrices are expanded to all elements along generator words; the
    construction fails if they violate the group's multiplication table
    or are not unimodular.  ``rank`` is only needed when the group has
    no generators (the trivial group).
    """
    gens = group.generator_indices
    if len(matrices) != len(gens):
        raise ValueError(
            f"need {len(gens)} generator matrices for {group.name}, "
            f"got {len(matrices)}"
        )
    if gens:
        n = len(matrices[0])
    elif rank is not None:
        n = rank
    else:
        raise ValueError("rank is required for a group with no generators")
    cache: Dict[int, Matrix] = {group.identity: _freeze(identity_matrix(n))}
    provided = {s: _freeze(m) for s, m in zip(gens, matrices)}
    frontier = [group.identity]
    while frontier:
        x = frontier.pop()
        for s in gens:
            y = group.mul[x][s]
            if y not in cache:
                cache[y] = _freeze(mat_mul(cache[x], provided[s]))
                frontier.append(y)
    for s, mat in provided.items():
        if cache[s] != mat:
            raise ValueError(
                "generator matrices violate the group's multiplication table"
            )
    return ZGLattice(group, cache)


def _rebased_action(
    lattice: ZGLattice, columns: Sequence[Sequence[Fraction]]
) -> Dict[int, List[List[int]]]:
    """Action matrices in the basis given by full-rank rational columns.

    The columns span a lattice in the rational span; the result must be
    integral, otherwise the span is not stable as a lattice.
    """
    n = lattice.rank
    k = len(columns[0]) if columns else 0
    matrices: Dict[int, List[List[int]]] = {}
    for g in range(lattice.group.order):
        acted = mat_mul(lattice.action(g), columns)
        new = [[0] * k for _ in range(k)]
        for j in range(k):
            rhs = [acted[i][j] for i in range(n)]
            solution = solve_linear(columns, rhs)
            if solution is None:
                raise ValueError("span is not stable under the group action")
            for i, value in enumerate(solution):
                if value.denominator != 1:
                    raise ValueError("span is not stable under the group action")
                new[i][j] = int(value)
        matrices[g] = new
    return matrices


def direct_sum(a: ZGLattice, b: ZGLattice) -> ZGLattice:
    """Block-diagonal sum of two lattices over the same group."""
    if not _same_group(a.group, b.group):
        raise ValueError("direct sum needs lattices over the same group")
    n, m = a.rank, b.rank
    matrices: Dict[int, List[List[int]]] = {}
    for g in range(a.group.order):
        left, right = a.action(g), b.action(g)
        mat = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                mat[i][j] = left[i][j]
        for i in range(m):
            for j in range(m):
                mat[n + i][n + j] = right[i][j]
        matrices[g] = mat
    return ZGLattice(a.group, matrices)


def tensor_product(a: ZGLattice, b: ZGLattice) -> ZGLattice:
    """Tensor product with the diagonal action (Kronecker matrices)."""
    if not _same_group(a.group, b.group):
        raise ValueError("tensor product needs lattices over the same group")
    n, m = a.rank, b.rank
    matrices: Dict[int, List[List[int]]] = {}
    for g in range(a.group.order):
        left, right = a.action(g), b.action(g)
        mat = [[0] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for j in range(n):
                if left[i][j] == 0:
                    continue
                for r in range(m):
                    for s in range(m):
                        mat[i * m + r][j * m + s] = left[i][j] * right[r][s]
        matrices[g] = mat
    return ZGLattice(a.group, matrices)


def _rotation_subgroup(group: FiniteGroup) -> Tuple[int, frozenset]:
    """The unique index-2 cyclic subgroup (q, its element set).

    This is the rotation subgroup of a dihedral group of order 2q for
    odd q; groups without a unique such subgroup are rejected.
    """
    from .groups import subgroup_classes

    if group.order % 2 != 0:
        raise ValueError("group order is odd; no index-2 subgroup exists")
    q = group.order // 2
    candidates = [
        cls
        for cls in subgroup_classes(group)
        if cls.order == q and cls.is_cyclic and cls.class_size == 1
    ]
    if len(candidates) != 1:
        raise ValueError(
            "need a unique index-2 cyclic subgroup (dihedral rotations) "
            f"in {group.name}"
        )
    rotations = frozenset(candidates[0].representative)
    mul, inv = group.mul, group.inv
    for g in range(group.order):
        if g in rotations:
            continue
        if any(mul[mul[g][r]][inv[g]] != inv[r] for r in rotations):
            raise ValueError(
                "need a unique index-2 cyclic subgroup (dihedral rotations) "
                f"in {group.name}: outside elements must invert rotations"
            )
    return q, rotations


def twist_sign(lattice: ZGLattice) -> ZGLattice:
    """Tensor with the sign character of a dihedral-type group.

    Matrices of elements outside the rotation subgroup are negated.
    """
    _, rotations = _rotation_subgroup(lattice.group)
    matrices: Dict[int, Sequence[Sequence[int]]] = {}
    for g in range(lattice.group.order):
        mat = lattice.action(g)
        if g in rotations:
            matrices[g] = mat
        else:
            matrices[g] = [[-x for x in row] for row in mat]
    return ZGLattice(lattice.group, matrices)


def span_sublattice(
    lattice: ZGLattice, columns: Sequence[Sequence[int]]
) -> ZGLattice:
    """The span of integer column vectors as a lattice in its own right.

    The columns must be independent and their span stable under the
    action; the action is re-expressed in the new basis (integrally, by
    stability).
    """
    vectors = [list(v) for v in columns]
    if not vectors:
        raise ValueError("need at least one column vector")
    if any(len(v) != lattice.rank for v in vectors):
        raise ValueError("column length must equal the ambient rank")
    matrix = mat_transpose(vectors)
    if len(hnf(vectors)) != len(vectors):
        raise ValueError("columns are not independent")
    return ZGLattice(lattice.group, _rebased_action(lattice, matrix))


def lattice_algebra(op: str, *args, **kwargs) -> ZGLattice:
    """Dispatch to the lattice constructions by operation name."""
    table = {
        "direct_sum": direct_sum,
        "tensor": tensor_product,
        "twist_sign": twist_sign,
        "span_sublattice": span_sublattice,
    }
    if op not in table:
        raise ValueError(f"unknown lattice operation {op!r}")
    return table[op](*args, **kwargs)


def _sublattice_from_rows(lattice: ZGLattice, rows: Sequence[Sequence[int]]) -> Sublattice:
    """Package kernel rows (one vector per row) as a column-basis sublattice."""
    if rows:
        basis = _freeze(mat_transpose(rows))
    else:
        basis = tuple(tuple() for _ in range(lattice.rank))
    return Sublattice(ambient=lattice, basis=basis)


def fixed_sublattice(
    lattice: ZGLattice, subgroup: Union[SubgroupClass, str, Sequence[int]]
) -> Sublattice:
    """Saturated sublattice of vectors fixed by every subgroup element.

    Computed as the integral kernel of the stacked matrices
    action(h) − identity; the basis is in column normal form.
    """
    elements = _subgroup_elements(lattice.group, subgroup)
    n = lattice.rank
    stacked: List[List[int]] = []
    for h in elements:
        if h == lattice.group.identity:
            continue
        mat = lattice.action(h)
        for i in range(n):
            row = list(mat[i])
            row[i] -= 1
            stacked.append(row)
    return _sublattice_from_rows(lattice, right_kernel(stacked, ncols=n))


def averaged_pairing(lattice: ZGLattice, seed: Optional[int] = None) -> InvariantPairing:
    """Group-averaged positive-definite invariant pairing.

    Averages gᵀ·S·g over the group, with S the identity by default or a
    random positive-definite symmetric matrix drawn from the seed.  The
    result is verified invariant and positive definite.
    """
    n = lattice.rank
    if seed is None:
        start = identity_matrix(n)
    else:
        rng = random.Random(seed)
        raw = [[rng.randrange(-2, 3) for _ in range(n)] for _ in range(n)]
        start = mat_mul(mat_transpose(raw), raw)
        for i in range(n):
            start[i][i] += 1
    total = [[0] * n for _ in range(n)]
    for g in range(lattice.group.order):
        mat = lattice.action(g)
        contribution = mat_mul(mat_mul(mat_transpose(mat), start), mat)
        for i in range(n):
            for j in range(n):
                total[i][j] += contribution[i][j]
    gram = tuple(tuple(Fraction(x) for x in row) for row in total)
    for i in range(n):
        for j in range(n):
            if gram[i][j] != gram[j][i]:
                raise AssertionError("averaged pairing is not symmetric")
    for g in range(lattice.group.order):
        mat = lattice.action(g)
        moved = mat_mul(mat_mul(mat_transpose(mat), gram), mat)
        if any(
            Fraction(moved[i][j]) != gram[i][j] for i in range(n) for j in range(n)
        ):
            raise AssertionError("averaged pairing is not invariant")
    for k in range(1, n + 1):
        minor = [row[:k] for row in gram[:k]]
        if det(minor) <= 0:
            raise AssertionError("averaged pairing is not positive definite")
    return InvariantPairing(lattice=lattice, gram=gram)


def standard_pairing(lattice: ZGLattice) -> InvariantPairing:
    """The identity form, verified invariant (true for signed permutations).

    Permutation lattices and their sign twists preserve the standard
    inner product; lattices that do not are rejected.
    """
    n = lattice.rank
    gram = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )
    for g in range(lattice.group.order):
        mat = lattice.action(g)
        moved = mat_mul(mat_transpose(mat), mat)
        if _freeze(moved) != _freeze(identity_matrix(n)):
            raise ValueError(
                "standard form is not invariant for this lattice; use "
                "averaged_pairing instead"
            )
    return InvariantPairing(lattice=lattice, gram=gram)


def inherited_pairing(
    ambient: InvariantPairing,
    columns: Sequence[Sequence[int]],
    lattice: ZGLattice,
) -> InvariantPairing:
    """Pairing pulled back through an embedding given by ambient columns.

    ``columns`` are the images of the lattice's basis vectors inside the
    ambient pairing's lattice (the same columns handed to
    span_sublattice).  Invariance under the new lattice's action is
    verified.
    """
    matrix = mat_transpose([list(v) for v in columns])
    gram_raw = mat_mul(mat_mul(mat_transpose(matrix), ambient.gram), matrix)
    gram = tuple(tuple(Fraction(x) for x in row) for row in gram_raw)
    n = lattice.rank
    if len(gram) != n:
        raise ValueError("column count must equal the sublattice rank")
    for g in range(lattice.group.order):
        mat = lattice.action(g)
        moved = mat_mul(mat_mul(mat_transpose(mat), gram), mat)
        if any(
            Fraction(moved[i][j]) != gram[i][j] for i in range(n) for j in range(n)
        ):
            raise ValueError("pairing is not invariant under the sublattice action")
    return InvariantPairing(lattice=lattice, gram=gram)


def gram_determinant(
    pairing: InvariantPairing, sub: Sublattice, scale: Fraction = Fraction(1)
) -> Fraction:
    """det(scale · Bᵀ·gram·B) for the sublattice basis B, exactly.

    The empty (rank-0) sublattice has determinant 1.
    """
    if sub.ambient is not pairing.lattice and not (
        _same_group(sub.ambient.group, pairing.lattice.group)
        and sub.ambient.rank == pairing.lattice.rank
        and sub.ambient._action == pairing.lattice._action
    ):
        raise ValueError("sublattice does not live in the pairing's lattice")
    k = sub.dimension
    if k == 0:
        return Fraction(1)
    basis = sub.basis
    inner = mat_mul(mat_mul(mat_transpose(basis), pairing.gram), basis)
    return Fraction(scale) ** k * Fraction(det(inner))


def _stacked_span_index(rank: int, vector_groups: Sequence[Sequence[Sequence[int]]]) -> Optional[int]:
    """Index of the span of the given vectors in ℤ^rank, or None if not full."""
    rows: List[List[int]] = []
    for vectors in vector_groups:
        rows.extend(list(v) for v in vectors)
    if not rows:
        return None
    reduced = hnf(rows)
    if len(reduced) < rank:
        return None
    value = det(reduced)
    return abs(int(value))


def sum_of_fixed_index(
    lattice: ZGLattice,
    subgroups: Sequence[Union[SubgroupClass, str, Sequence[int]]],
) -> Optional[int]:
    """Index of the sum of fixed sublattices, or None when not full rank."""
    groups_vectors = [
        fixed_sublattice(lattice, subgroup).column_vectors()
        for subgroup in subgroups
    ]
    return _stacked_span_index(lattice.rank, groups_vectors)


def random_stable_sublattice(
    lattice: ZGLattice, seed: int, index_bound: int
) -> Tuple[ZGLattice, int]:
    """A full-rank stable sublattice with index ≤ bound, and its index.

    Samples the span of m·(standard basis) together with the orbit of a
    few random vectors, for small moduli m; falls back to the lattice
    itself (index 1) if nothing below the bound turns up.
    """
    if index_bound < 1:
        raise ValueError("index bound must be at least 1")
    n = lattice.rank
    group = lattice.group
    moduli = sorted(
        {2, 3} | {p for p in range(3, group.order + 1) if is_prime(p) and group.order % p == 0}
    )
    rng = random.Random(seed)
    for _ in range(200):
        if index_bound == 1:
            break
        m = rng.choice(moduli)
        count = rng.choice((1, 2))
        rows: List[List[int]] = [
            [m if i == j else 0 for j in range(n)] for i in range(n)
        ]
        for _ in range(count):
            vector = [rng.randrange(m) for _ in range(n)]
            for g in range(group.order):
                mat = lattice.action(g)
                rows.append(
                    [sum(mat[i][j] * vector[j] for j in range(n)) for i in range(n)]
                )
        reduced = hnf(rows)
        index = abs(int(det(reduced)))
        if 1 <= index <= index_bound:
            columns = mat_transpose(reduced)
            rebased = ZGLattice(group, _rebased_action(lattice, columns))
            return rebased, index
    return lattice, 1


def _invariant_subspaces_mod_p(lattice: ZGLattice, p: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """All action-invariant subspaces of (ℤ/p)^rank, as canonical rref rows.

    Every invariant subspace is a sum of the closures of single points
    under the generator matrices, so those closures are enumerated over
    all projective points and then closed under pairwise sums.
    """
    n = lattice.rank
    group = lattice.group
    generator_mats = [
        [[x % p for x in row] for row in lattice.action(s)]
        for s in group.generator_indices
    ]

    def point_closure(vector: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        rows: List[List[int]] = []
        frontier = [list(vector)]
        while frontier:
            candidate = frontier.pop()
            reduced, _ = rref_mod_p(rows + [candidate], p)
            if len(reduced) == len(rows):
                continue
            rows = [list(r) for r in reduced]
            for mat in generator_mats:
                frontier.append(
                    [sum(mat[i][j] * candidate[j] for j in range(n)) % p for i in range(n)]
                )
        return tuple(tuple(row) for row in rows)

    def projective_points():
        for lead in range(n):
            tail = n - lead - 1
            for code in range(p ** tail):
                vector = [0] * lead + [1]
                rest = code
                for _ in range(tail):
                    vector.append(rest % p)
                    rest //= p
                yield vector

    found = set()
    ordered: List[Tuple[Tuple[int, ...], ...]] = []

    def note(space: Tuple[Tuple[int, ...], ...]) -> bool:
        if space not in found:
            found.add(space)
            ordered.append(space)
            return True
        return False

    note(())
    cyclic: List[Tuple[Tuple[int, ...], ...]] = []
    for point in projective_points():
        space = point_closure(point)
        if note(space):
            cyclic.append(space)
    changed = True
    while changed:
        changed = False
        for first in list(ordered):
            for second in cyclic:
                rows = [list(r) for r in first] + [list(r) for r in second]
                summed, _ = rref_mod_p(rows, p)
                space = tuple(tuple(row) for row in summed)
                if note(space):
                    changed = True
    ordered.sort(key=lambda space: (len(space), space))
    return ordered


def overlattices_mod_p(lattice: ZGLattice, p: int) -> List[ZGLattice]:
    """All stable lattices M with L ⊆ M ⊆ (1/p)L, including both ends.

    Found through the action-invariant subspaces of (1/p)L / L.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = lattice.rank
    results: List[ZGLattice] = []
    for space in _invariant_subspaces_mod_p(lattice, p):
        rows = [[p if i == j else 0 for j in range(n)] for i in range(n)]
        rows.extend(list(row) for row in space)
        reduced = hnf(rows)
        columns = [
            [Fraction(reduced[j][i], p) for j in range(n)] for i in range(n)
        ]
        results.append(ZGLattice(lattice.group, _rebased_action(lattice, columns)))
    return results


def _check_embedding(
    sub: FiniteGroup, big: FiniteGroup, embedding: Sequence[int]
) -> Tuple[int, ...]:
    """Validate an injective homomorphism given by an image table."""
    images = tuple(int(x) for x in embedding)
    if len(images) != sub.order:
        raise ValueError("embedding must list one image per subgroup element")
    if len(set(images)) != sub.order:
        raise ValueError("embedding is not injective")
    if any(not 0 <= x < big.order for x in images):
        raise ValueError("embedding image out of range")
    for a in range(sub.order):
        for b in range(sub.order):
            if big.mul[images[a]][images[b]] != images[sub.mul[a][b]]:
                raise ValueError("embedding is not a group homomorphism")
    return images


def restrict_lattice(
    lattice: ZGLattice, subgroup: FiniteGroup, embedding: Sequence[int]
) -> ZGLattice:
    """View a lattice as a lattice over an embedded subgroup.

    The subgroup is given as its own group together with the embedding
    table into the lattice's group; each subgroup element acts by the
    matrix of its image.
    """
    images = _check_embedding(subgroup, lattice.group, embedding)
    matrices = {h: lattice.action(images[h]) for h in range(subgroup.order)}
    return ZGLattice(subgroup, matrices)


def induce_lattice(
    lattice: ZGLattice, supergroup: FiniteGroup, embedding: Sequence[int]
) -> ZGLattice:
    """Induce a lattice along an embedding into a larger group.

    The result is a block lattice with one copy of the original per left
    coset of the embedded image; an element permutes the blocks and acts
    inside each through the coset-stabilizing factor it leaves behind.
    """
    images = _check_embedding(lattice.group, supergroup, embedding)
    cosets = left_cosets(supergroup, tuple(sorted(images)))
    reps = tuple(c[0] for c in cosets)
    coset_of = {g: i for i, coset in enumerate(cosets) for g in coset}
    preimage = {img: h for h, img in enumerate(images)}
    k = lattice.rank
    n = len(cosets) * k
    mul, inv = supergroup.mul, supergroup.inv
    matrices: Dict[int, Matrix] = {}
    for g in range(supergroup.order):
        mat = [[0] * n for _ in range(n)]
        for i, x in enumerate(reps):
            y = mul[g][x]
            j = coset_of[y]
            factor = preimage[mul[inv[reps[j]]][y]]
            block = lattice.action(factor)
            for r in range(k):
                row = mat[j * k + r]
                brow = block[r]
                for c in range(k):
                    if brow[c]:
                        row[i * k + c] = brow[c]
        matrices[g] = _freeze(mat)
    return ZGLattice(supergroup, matrices)


def _dihedral_split(group: FiniteGroup) -> Tuple[int, frozenset]:
    """(p, rotation elements) for a dihedral group of order 2p, p odd prime."""
    p, rotations = _rotation_subgroup(group)
    if p < 3 or not is_prime(p):
        raise ValueError(
            f"{group.name} is not dihedral of order 2p for an odd prime p"
        )
    return p, rotations


def rational_multiplicities_d2p(lattice: ZGLattice) -> Tuple[int, int, int]:
    """Multiplicities (m_triv, m_sign, m_plane) of the rational pieces.

    For a dihedral group of order 2p the rational irreducibles are the
    trivial character, the sign character of the rotation subgroup, and
    a (p−1)-dimensional piece; the multiplicities come from averaged
    traces and must be non-negative integers.
    """
    p, rotations = _dihedral_split(lattice.group)
    order = lattice.group.order
    total = 0
    signed = 0
    for g in range(order):
        t = lattice.trace(g)
        total += t
        signed += t if g in rotations else -t
    if total % order or signed % order:
        raise RuntimeError("trace averages are not integers; corrupted action")
    m_triv = total // order
    m_sign = signed // order
    remainder = lattice.rank - m_triv - m_sign
    if remainder % (p - 1):
        raise RuntimeError("rank decomposition failed; corrupted action")
    m_plane = remainder // (p - 1)
    if m_triv < 0 or m_sign < 0 or m_plane < 0:
        raise RuntimeError("negative multiplicity; corrupted action")
    return m_triv, m_sign, m_plane


def isotypic_sublattice_d2p(lattice: ZGLattice, part: str) -> Sublattice:
    """Saturated sublattice meeting one rational isotypic piece.

    ``part`` is "triv" (all of G fixes), "sign" (rotations fix, a
    reflection negates), or "plane" (zero average over rotations).
    """
    p, rotations = _dihedral_split(lattice.group)
    group = lattice.group
    n = lattice.rank
    rotation_gen = next(
        x for x in sorted(rotations) if group.element_order(x) == p
    )
    reflection = next(g for g in range(group.order) if g not in rotations)
    if part == "triv":
        return fixed_sublattice(lattice, sorted(range(group.order)))
    if part == "sign":
        stacked: List[List[int]] = []
        mat = lattice.action(rotation_gen)
        for i in range(n):
            row = list(mat[i])
            row[i] -= 1
            stacked.append(row)
        mat = lattice.action(reflection)
        for i in range(n):
            row = list(mat[i])
            row[i] += 1
            stacked.append(row)
        return _sublattice_from_rows(lattice, right_kernel(stacked, ncols=n))
    if part == "plane":
        norm = [[0] * n for _ in range(n)]
        for r in rotations:
            mat = lattice.action(r)
            for i in range(n):
                for j in range(n):
                    norm[i][j] += mat[i][j]
        return _sublattice_from_rows(lattice, right_kernel(norm, ncols=n))
    raise ValueError(f"unknown isotypic part {part!r}")


def isotypic_sum_index_d2p(lattice: ZGLattice) -> Optional[int]:
    """Index of the sum of the three isotypic sublattices, or None."""
    parts = [
        isotypic_sublattice_d2p(lattice, part).column_vectors()
        for part in ("triv", "sign", "plane")
    ]
    return _stacked_span_index(lattice.rank, parts)


def lattice_to_json(lattice: ZGLattice) -> Dict[str, object]:
    """JSON-ready form: group descriptor, rank, generator matrices.

    Matrix entries are decimal strings so arbitrarily large integers
    survive any JSON reader.
    """
    descriptor = lattice.group.descriptor
    if not descriptor:
        raise ValueError(
            "lattice serialization needs a group built from a descriptor"
        )
    return {
        "group": descriptor,
        "rank": lattice.rank,
        "generators": [
            [[str(x) for x in row] for row in lattice.action(s)]
            for s in lattice.group.generator_indices
        ],
    }


def lattice_from_json(data: Mapping[str, object]) -> ZGLattice:
    """Rebuild a lattice serialized by lattice_to_json."""
    group = build_group(str(data["group"]))
    matrices = [
        [[int(x) for x in row] for row in mat]
        for mat in data["generators"]  # type: ignore[union-attr]
    ]
    lattice = lattice_from_generators(group, matrices, rank=int(str(data["rank"])))
    if lattice.rank != int(str(data["rank"])):
        raise ValueError("rank field does not match the generator matrices")
    return lattice
