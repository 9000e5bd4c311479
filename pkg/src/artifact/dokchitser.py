"""Regulator constants of integer lattices against permutation relations.

Two independent definitions are implemented and cross-checked:

* a *pairing* form — a product of scaled Gram determinants of fixed
  sublattices, one factor per subgroup class appearing in the relation;
* an *injection* form — a ratio of two determinants obtained from an
  explicit equivariant injection between the two sides of the relation.

The module also produces structural certificates: primes at which every
constant of a group is trivial, and an index-corrected invariant for
dihedral groups of order 2p that depends only on the rational span of
the lattice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .burnside import Relation
from .exactla import det, is_prime, solve_linear
from .groups import (
    FiniteGroup,
    SubgroupClass,
    coset_action,
    left_cosets,
    quotient_by_normal,
    subgroup_classes,
)
from .lattices import (
    InvariantPairing,
    ZGLattice,
    _dihedral_split,
    _same_group,
    averaged_pairing,
    fixed_sublattice,
    gram_determinant,
    sum_of_fixed_index,
)

__all__ = [
    "DokchitserConstant",
    "InjectionPhi",
    "InjectionSearchExhausted",
    "TrivialPrimeCertificate",
    "I_invariant",
    "dok_injection",
    "dok_pairing",
    "find_injection",
    "trivial_prime_certificate",
]

IntMatrix = Tuple[Tuple[int, ...], ...]


class InjectionSearchExhausted(RuntimeError):
    """Raised when the randomized injection search runs out of budget."""


@dataclass(frozen=True)
class DokchitserConstant:
    """An exact constant attached to a (relation, lattice) pair.

    ``value`` is a nonzero rational; ``factored`` lists (prime, exponent)
    pairs of its factorization (with a leading ``(-1, 1)`` for negative
    values); ``method`` records which definition produced it.
    """

    value: Fraction
    factored: Tuple[Tuple[int, int], ...]
    method: str
    relation: Relation
    lattice: ZGLattice

    def factored_dict(self) -> Dict[int, int]:
        return dict(self.factored)


@dataclass(frozen=True)
class _CosetBlock:
    """One copy of a coset space inside a side of a relation."""

    label: str
    subgroup: Tuple[int, ...]
    coset_reps: Tuple[int, ...]
    offset: int


@dataclass(frozen=True)
class InjectionPhi:
    """An equivariant injection between the two sides of a relation.

    ``matrix`` maps the block sum of coset modules with positive
    coefficients (source, columns) to the one with negative coefficients
    (target, rows), written in the coset bases; ``determinant`` is its
    nonzero determinant.
    """

    relation: Relation
    matrix: IntMatrix
    determinant: int
    source_blocks: Tuple[_CosetBlock, ...]
    target_blocks: Tuple[_CosetBlock, ...]


@dataclass(frozen=True)
class TrivialPrimeCertificate:
    """Primes p where every constant of the group has trivial p-part.

    A prime is certified by a normal subgroup of order prime to p whose
    quotient is cyclic. ``primes`` holds the certified primes up to the
    group order; every prime beyond the group order is certified by
    ``all_larger_witness`` (its order is automatically prime to p).
    """

    group: FiniteGroup
    primes: frozenset
    witnesses: Mapping[int, str]
    all_larger_witness: str


def _factored(value: Fraction) -> Tuple[Tuple[int, int], ...]:
    """Factor a nonzero rational into sorted (prime, exponent) pairs."""
    factors: Dict[int, int] = {}
    if value < 0:
        factors[-1] = 1
    for number, sign in ((value.numerator, 1), (value.denominator, -1)):
        n = abs(number)
        d = 2
        while d * d <= n:
            while n % d == 0:
                factors[d] = factors.get(d, 0) + sign
                n //= d
            d += 1
        if n > 1:
            factors[n] = factors.get(n, 0) + sign
    return tuple(sorted((p, e) for p, e in factors.items() if e != 0))


def _require_usable(lattice: ZGLattice, relation: Relation) -> None:
    if not relation.verified:
        raise ValueError("relation must be verified")
    if not _same_group(lattice.group, relation.element.group):
        raise ValueError("lattice and relation live over different groups")


def dok_pairing(
    lattice: ZGLattice,
    relation: Relation,
    pairing: Optional[InvariantPairing] = None,
) -> DokchitserConstant:
    """Constant of a lattice against a relation, via Gram determinants.

    For each subgroup class H with nonzero coefficient, the factor is the
    Gram determinant of the H-fixed sublattice under the pairing scaled
    by 1/|H|, raised to the coefficient. The default pairing is the
    deterministic averaged one; the value is independent of the choice.
    """
    _require_usable(lattice, relation)
    if pairing is None:
        pairing = averaged_pairing(lattice)
    elif pairing.lattice is not lattice and pairing.lattice._action != lattice._action:
        raise ValueError("pairing does not belong to this lattice")
    value = Fraction(1)
    for cls in subgroup_classes(lattice.group):
        coeff = relation.element.coefficients[cls.label]
        if coeff == 0:
            continue
        fixed = fixed_sublattice(lattice, cls)
        factor = gram_determinant(pairing, fixed, Fraction(1, cls.order))
        assert factor != 0, "degenerate pairing on a fixed sublattice"
        value *= factor ** coeff
    return DokchitserConstant(
        value=value,
        factored=_factored(value),
        method="pairing",
        relation=relation,
        lattice=lattice,
    )


def _relation_sides(
    relation: Relation,
) -> Tuple[List[SubgroupClass], List[SubgroupClass]]:
    """Subgroup classes with positive / negative coefficients, with
    multiplicity (one entry per copy of the coset module)."""
    group = relation.element.group
    positives: List[SubgroupClass] = []
    negatives: List[SubgroupClass] = []
    for cls in subgroup_classes(group):
        c = relation.element.coefficients[cls.label]
        if c > 0:
            positives.extend([cls] * c)
        elif c < 0:
            negatives.extend([cls] * (-c))
    return positives, negatives


def _blocks(
    group: FiniteGroup, classes: Sequence[SubgroupClass]
) -> Tuple[Tuple[_CosetBlock, ...], int]:
    blocks: List[_CosetBlock] = []
    offset = 0
    for cls in classes:
        cosets = left_cosets(group, cls.representative)
        blocks.append(
            _CosetBlock(
                label=cls.label,
                subgroup=tuple(cls.representative),
                coset_reps=tuple(c[0] for c in cosets),
                offset=offset,
            )
        )
        offset += len(cosets)
    return tuple(blocks), offset


def _orbit_sum_maps(
    group: FiniteGroup, source: _CosetBlock, target: _CosetBlock
) -> List[IntMatrix]:
    """Basis of the equivariant maps from one coset module to another.

    A map is determined by the image of the identity coset, which must
    be fixed by the source subgroup; the fixed vectors of a permutation
    module are spanned by orbit sums.
    """
    target_cosets = left_cosets(group, target.subgroup)
    action = coset_action(group, target_cosets)
    n_target = len(target_cosets)
    n_source = len(source.coset_reps)
    seen: set = set()
    orbits: List[List[int]] = []
    for start in range(n_target):
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for h in source.subgroup:
                y = action[h][x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        seen |= orbit
        orbits.append(sorted(orbit))
    maps: List[IntMatrix] = []
    for orbit in orbits:
        mat = [[0] * n_source for _ in range(n_target)]
        for col, rep in enumerate(source.coset_reps):
            for member in orbit:
                mat[action[rep][member]][col] = 1
        maps.append(tuple(tuple(row) for row in mat))
    return maps


def _block_action(
    group: FiniteGroup, blocks: Tuple[_CosetBlock, ...], g: int
) -> Tuple[int, ...]:
    """The permutation of the stacked coset basis induced by one element."""
    images: List[int] = []
    for block in blocks:
        cosets = left_cosets(group, block.subgroup)
        action = coset_action(group, cosets)
        images.extend(block.offset + action[g][k] for k in range(len(cosets)))
    return tuple(images)


def _check_equivariance(
    group: FiniteGroup,
    matrix: Sequence[Sequence[int]],
    source_blocks: Tuple[_CosetBlock, ...],
    target_blocks: Tuple[_CosetBlock, ...],
) -> None:
    generators = group.generator_indices or tuple(range(group.order))
    for g in generators:
        source_perm = _block_action(group, source_blocks, g)
        target_perm = _block_action(group, target_blocks, g)
        for r, row in enumerate(matrix):
            tr = target_perm[r]
            for c, entry in enumerate(row):
                if matrix[tr][source_perm[c]] != entry:
                    raise AssertionError("assembled map is not equivariant")


def find_injection(
    relation: Relation,
    *,
    coprime_to: Optional[int] = None,
    seed: int = 0,
    budget: int = 10000,
) -> InjectionPhi:
    """Search for an equivariant injection between a relation's sides.

    Samples small integer combinations of the orbit-sum basis of the
    equivariant maps until the determinant is nonzero (and, when
    ``coprime_to`` is given, prime to that prime). Deterministic for a
    given seed; raises InjectionSearchExhausted when the budget runs out.
    """
    if not relation.verified:
        raise ValueError("relation must be verified")
    if relation.element.is_zero():
        raise ValueError("the zero relation admits no injection between its sides")
    if coprime_to is not None and not is_prime(coprime_to):
        raise ValueError(f"{coprime_to} is not prime")
    group = relation.element.group
    positives, negatives = _relation_sides(relation)
    source_blocks, source_total = _blocks(group, positives)
    target_blocks, target_total = _blocks(group, negatives)
    assert source_total == target_total, "relation sides have different ranks"
    basis: List[Tuple[_CosetBlock, _CosetBlock, IntMatrix]] = []
    for src in source_blocks:
        for tgt in target_blocks:
            for mat in _orbit_sum_maps(group, src, tgt):
                basis.append((src, tgt, mat))
    rng = random.Random(seed)
    size = source_total
    for attempt in range(budget):
        box = 3 + attempt // 500
        coeffs = [rng.randint(-box, box) for _ in basis]
        matrix = [[0] * size for _ in range(size)]
        for (src, tgt, mat), c in zip(basis, coeffs):
            if c == 0:
                continue
            for r, row in enumerate(mat):
                out = matrix[tgt.offset + r]
                for k, entry in enumerate(row):
                    if entry:
                        out[src.offset + k] += c * entry
        d = det(matrix)
        if d == 0:
            continue
        if coprime_to is not None and d % coprime_to == 0:
            continue
        _check_equivariance(group, matrix, source_blocks, target_blocks)
        return InjectionPhi(
            relation=relation,
            matrix=tuple(tuple(row) for row in matrix),
            determinant=d,
            source_blocks=source_blocks,
            target_blocks=target_blocks,
        )
    raise InjectionSearchExhausted(
        f"no injection found within {budget} attempts"
        + (f" with determinant prime to {coprime_to}" if coprime_to else "")
    )


def _matvec(mat: IntMatrix, vec: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(row[k] * vec[k] for k in range(len(vec))) for row in mat)


def _coordinates(
    basis_matrix: Tuple[Tuple[int, ...], ...], vector: Sequence[int]
) -> Tuple[Fraction, ...]:
    """Coordinates of a vector in a sublattice basis (columns)."""
    coords = solve_linear(basis_matrix, tuple(vector))
    assert coords is not None, "image vector escapes the fixed sublattice"
    return coords


def dok_injection(
    lattice: ZGLattice,
    relation: Relation,
    phi: Optional[InjectionPhi] = None,
) -> DokchitserConstant:
    """Constant of a lattice against a relation, via an injection.

    Composition with the injection (and with its transpose) defines two
    square matrices on the spaces of equivariant maps into the lattice,
    written in bases of fixed vectors of the blocks; the constant is the
    ratio of their determinants, computed in the same pair of bases.
    """
    _require_usable(lattice, relation)
    if phi is None:
        phi = find_injection(relation, seed=0)
    elif phi.relation.element.coefficients != relation.element.coefficients or not _same_group(
        phi.relation.element.group, relation.element.group
    ):
        raise ValueError("injection does not belong to this relation")
    source_bases = [
        fixed_sublattice(lattice, block.subgroup).basis
        for block in phi.source_blocks
    ]
    target_bases = [
        fixed_sublattice(lattice, block.subgroup).basis
        for block in phi.target_blocks
    ]
    source_dims = [len(b[0]) if b else 0 for b in source_bases]
    target_dims = [len(b[0]) if b else 0 for b in target_bases]
    assert sum(source_dims) == sum(target_dims), "map spaces have different ranks"
    size = sum(source_dims)
    if size == 0:
        value = Fraction(1)
    else:
        forward = _maps_matrix(
            lattice, phi.matrix, phi.source_blocks, phi.target_blocks,
            source_bases, target_bases, transpose=False,
        )
        backward = _maps_matrix(
            lattice, phi.matrix, phi.source_blocks, phi.target_blocks,
            source_bases, target_bases, transpose=True,
        )
        denominator = det(forward)
        assert denominator != 0, "injection induced a singular map of sections"
        value = det(backward) / denominator
    return DokchitserConstant(
        value=value,
        factored=_factored(value),
        method="injection",
        relation=relation,
        lattice=lattice,
    )


def _maps_matrix(
    lattice: ZGLattice,
    phi_matrix: IntMatrix,
    source_blocks: Tuple[_CosetBlock, ...],
    target_blocks: Tuple[_CosetBlock, ...],
    source_bases: Sequence[Tuple[Tuple[int, ...], ...]],
    target_bases: Sequence[Tuple[Tuple[int, ...], ...]],
    transpose: bool,
) -> List[List[Fraction]]:
    """Matrix of composition with the injection on equivariant maps.

    An equivariant map out of a coset module is identified with its
    value at the identity coset, a fixed vector of the block's subgroup;
    a general coset evaluates through the action of its representative.
    With ``transpose=False`` the result maps target-side sections to
    source-side sections (composition with the injection); with
    ``transpose=True`` it maps source-side to target-side (composition
    with the transposed matrix).
    """
    in_blocks = target_blocks if not transpose else source_blocks
    out_blocks = source_blocks if not transpose else target_blocks
    in_bases = target_bases if not transpose else source_bases
    out_bases = source_bases if not transpose else target_bases

    columns: List[List[Fraction]] = []
    for j, block in enumerate(in_blocks):
        basis = in_bases[j]
        dim = len(basis[0]) if basis else 0
        for b in range(dim):
            w = tuple(row[b] for row in basis)
            column: List[Fraction] = []
            for i, out_block in enumerate(out_blocks):
                out_basis = out_bases[i]
                out_dim = len(out_basis[0]) if out_basis else 0
                if out_dim == 0:
                    continue
                total = [0] * lattice.rank
                for k, rep in enumerate(block.coset_reps):
                    if not transpose:
                        entry = phi_matrix[block.offset + k][out_block.offset]
                    else:
                        entry = phi_matrix[out_block.offset][block.offset + k]
                    if entry == 0:
                        continue
                    image = _matvec(lattice.action(rep), w)
                    for t in range(lattice.rank):
                        total[t] += entry * image[t]
                column.extend(_coordinates(out_basis, total))
            columns.append(column)
    size = len(columns)
    assert all(len(col) == size for col in columns), "section matrix is not square"
    return [[columns[c][r] for c in range(size)] for r in range(size)]


def _is_cyclic_group(group: FiniteGroup) -> bool:
    identity = next(
        e for e in range(group.order)
        if all(group.mul[e][x] == x for x in range(group.order))
    )
    for g in range(group.order):
        k, x = 1, g
        while x != identity:
            x = group.mul[x][g]
            k += 1
        if k == group.order:
            return True
    return False


def trivial_prime_certificate(group: FiniteGroup) -> TrivialPrimeCertificate:
    """Certify primes where every constant of the group is trivial.

    A normal subgroup of order prime to p with cyclic quotient forces
    the p-part of every constant to vanish; the certificate records one
    witness per certified prime up to the group order, plus a single
    witness that covers every larger prime.
    """
    cyclic_quotient_normals: List[SubgroupClass] = []
    for cls in subgroup_classes(group):
        if cls.class_size != 1:
            continue
        quotient, _, _ = quotient_by_normal(group, cls)
        if _is_cyclic_group(quotient):
            cyclic_quotient_normals.append(cls)
    assert cyclic_quotient_normals, "the whole group always qualifies"
    witnesses: Dict[int, str] = {}
    for p in range(2, group.order + 1):
        if not is_prime(p):
            continue
        for cls in cyclic_quotient_normals:
            if cls.order % p != 0:
                witnesses[p] = cls.label
                break
    return TrivialPrimeCertificate(
        group=group,
        primes=frozenset(witnesses),
        witnesses=witnesses,
        all_larger_witness=cyclic_quotient_normals[0].label,
    )


def I_invariant(lattice: ZGLattice, relation: Relation) -> Fraction:
    """Index-corrected constant for dihedral groups of order 2p.

    The constant of the standard relation times the squared index of the
    sum of the fixed sublattices of two distinct reflections and the
    rotation subgroup. Depends only on the rational span of the lattice:
    it equals p to the power (sign + plane − trivial multiplicities).
    """
    p, rotations = _dihedral_split(lattice.group)
    _require_usable(lattice, relation)
    expected = {"1": 1, "C2": -2, f"C{p}": -1, "G": 2}
    actual = {
        label: c for label, c in relation.element.coefficients.items() if c != 0
    }
    if actual != expected:
        raise ValueError(
            "the index-corrected invariant needs the standard dihedral relation"
        )
    group = lattice.group
    identity = 0
    reflections = sorted(set(range(group.order)) - set(rotations))
    first = reflections[0]
    rotation_gen = min(r for r in rotations if r != identity)
    second = group.mul[first][rotation_gen]
    subgroups = [
        tuple(sorted((identity, first))),
        tuple(sorted((identity, second))),
        tuple(sorted(rotations)),
    ]
    index = sum_of_fixed_index(lattice, subgroups)
    assert index is not None, "reflection and rotation fixed spaces must span"
    return dok_pairing(lattice, relation).value * index * index
