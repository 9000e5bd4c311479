"""Identify the Galois module of S-units from class-number data.

For a dihedral extension of odd prime degree times two, the S-unit
lattice modulo torsion decomposes into copies of ten indecomposable
genera.  The identification proceeds in three exact steps:

1. the S-unit ranks of the four fixed fields pin the multiplicities of
   the three rational characters (trivial, sign, faithful);
2. the class-number quotient pins the regulator constant of the lattice,
   through the unit-index and regulator-constant identities;
3. the multisets of genera with the right character decomposition are
   enumerated and filtered by their product of constants.

A second fixture over a larger set of places can refine the answer:
the original lattice sits inside the larger one as the saturated
sublattice complementary to the extra trivial-character directions, so
each surviving multiset for the larger fixture restricts the candidates
for the original one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian_product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .ledger import FieldFixture, structural_invariants
from .zoo import zoo_table

__all__ = [
    "GENUS_NAMES",
    "GENUS_CHARACTERS",
    "GaloisModuleCandidate",
    "genus_constants",
    "rational_multiplicities_from_ranks",
    "target_constant",
    "identify_galois_module",
]

# The ten indecomposable genera, in display order.  The three numbers
# are the multiplicities of the rational characters (trivial, sign,
# faithful) in each genus; the rank-2 coset lattice on the rotation
# subgroup is an extension of the trivial lattice by the sign lattice,
# so it contributes one of each.
GENUS_NAMES: Tuple[str, ...] = (
    "triv",
    "eps",
    "rho",
    "A",
    "Aprime",
    "ext_Aprime_1",
    "ext_A_eps",
    "ext_A_rho",
    "ext_Aprime_rho",
    "regular",
)

GENUS_CHARACTERS: Mapping[str, Tuple[int, int, int]] = {
    "triv": (1, 0, 0),
    "eps": (0, 1, 0),
    "rho": (1, 1, 0),
    "A": (0, 0, 1),
    "Aprime": (0, 0, 1),
    "ext_Aprime_1": (1, 0, 1),
    "ext_A_eps": (0, 1, 1),
    "ext_A_rho": (1, 1, 1),
    "ext_Aprime_rho": (1, 1, 1),
    "regular": (1, 1, 2),
}

# What remains of each genus after passing to the saturated piece with
# no trivial-character constituents.  Saturation can split a glued
# extension, so some genera admit more than one outcome; the faithful
# extension of the sign lattice by the twisted difference lattice is the
# one gluing that does not exist, which forces its ambient genus to
# split completely.
_SLICE_DROP_TRIVIAL: Mapping[str, Tuple[Tuple[str, ...], ...]] = {
    "triv": ((),),
    "eps": (("eps",),),
    "rho": (("eps",),),
    "A": (("A",),),
    "Aprime": (("Aprime",),),
    "ext_Aprime_1": (("Aprime",),),
    "ext_A_eps": (("ext_A_eps",),),
    "ext_A_rho": (("ext_A_eps",), ("A", "eps")),
    "ext_Aprime_rho": (("Aprime", "eps"),),
    "regular": (("ext_A_eps", "Aprime"), ("A", "Aprime", "eps")),
}

# Published numbering of the five multisets with character profile
# (0, 1, 2): one sign constituent and two faithful ones.
_NUMBERED_MULTISETS: Mapping[Tuple[str, ...], int] = {
    ("eps", "A", "A"): 1,
    ("eps", "A", "Aprime"): 2,
    ("eps", "Aprime", "Aprime"): 3,
    ("A", "ext_A_eps"): 4,
    ("Aprime", "ext_A_eps"): 5,
}


@dataclass(frozen=True)
class GaloisModuleCandidate:
    """A multiset of genera consistent with one fixture's data."""

    names: Tuple[str, ...]
    constant: Fraction
    number: Optional[int]

    def display(self) -> str:
        label = " + ".join(self.names)
        if self.number is not None:
            return f"({self.number}) {label}"
        return label


def genus_constants(p: int) -> Dict[str, Fraction]:
    """The regulator constant of each genus, from the recomputed table."""
    return {row.name: row.constant for row in zoo_table(p)}


def _sorted_names(names: Sequence[str]) -> Tuple[str, ...]:
    order = {name: i for i, name in enumerate(GENUS_NAMES)}
    for name in names:
        if name not in order:
            raise ValueError(f"unknown genus name {name!r}")
    return tuple(sorted(names, key=lambda n: order[n]))


def rational_multiplicities_from_ranks(fixture: FieldFixture) -> Tuple[int, int, int]:
    """Multiplicities (trivial, sign, faithful) from the four S-unit ranks.

    The base-field rank counts trivial constituents, the quadratic field
    adds the sign constituents, and the top field adds p - 1 per faithful
    constituent.
    """
    if fixture.is_chain:
        raise ValueError("identification runs on prime-degree fixtures, not chains")
    p = fixture.q
    rec = fixture.records
    m_trivial = rec["G"].r_s
    m_sign = rec[f"C{p}"].r_s - rec["G"].r_s
    spread = rec["1"].r_s - rec[f"C{p}"].r_s
    if m_sign < 0 or spread < 0 or spread % (p - 1) != 0:
        raise ValueError(
            "corrupt ranks: the four S-unit ranks are not the ranks of any module "
            f"(got {rec['G'].r_s}, {rec[f'C{p}'].r_s}, {rec['1'].r_s})"
        )
    return (m_trivial, m_sign, spread // (p - 1))


def target_constant(fixture: FieldFixture) -> Fraction:
    """The regulator constant the S-unit lattice must have.

    Combining the class-number relation with the regulator-constant
    identity expresses the squared class-number quotient as p^(a-1)
    times the squared lambda quotient divided by the lattice constant,
    so the constant is determined exactly by integer data.
    """
    p = fixture.q
    inv = structural_invariants(fixture)
    rec = fixture.records
    quotient = Fraction(
        rec["1"].h_s * rec["G"].h_s ** 2,
        rec[f"C{p}"].h_s * rec["C2"].h_s ** 2,
    )
    lam = inv.lambda_profile
    lambda_quotient = Fraction(lam[f"C{p}"] * lam["C2"] ** 2, lam["1"] * lam["G"] ** 2)
    return Fraction(p) ** (inv.a - 1) * lambda_quotient**2 / quotient**2


def _multisets_with_character(
    m: Tuple[int, int, int], names: Sequence[str]
) -> List[Tuple[str, ...]]:
    """All multisets of genera whose characters sum to ``m``."""
    results: List[Tuple[str, ...]] = []

    def extend(i: int, remaining: Tuple[int, int, int], chosen: List[str]) -> None:
        if remaining == (0, 0, 0):
            results.append(tuple(chosen))
            return
        if i == len(names):
            return
        name = names[i]
        char = GENUS_CHARACTERS[name]
        max_copies = min(remaining[k] // char[k] for k in range(3) if char[k])
        for copies in range(max_copies, -1, -1):
            rest = tuple(remaining[k] - copies * char[k] for k in range(3))
            if min(rest) < 0:
                continue
            extend(i + 1, rest, chosen + [name] * copies)  # type: ignore[arg-type]

    extend(0, m, [])
    return [_sorted_names(names_tuple) for names_tuple in results]


def _candidates(fixture: FieldFixture) -> List[GaloisModuleCandidate]:
    p = fixture.q
    m = rational_multiplicities_from_ranks(fixture)
    constants = genus_constants(p)
    target = target_constant(fixture)
    numbered = m == (0, 1, 2)
    found: List[GaloisModuleCandidate] = []
    for names in _multisets_with_character(m, GENUS_NAMES):
        total = Fraction(1)
        for name in names:
            total *= constants[name]
        if total != target:
            continue
        number = _NUMBERED_MULTISETS.get(names) if numbered else None
        found.append(GaloisModuleCandidate(names=names, constant=total, number=number))
    return found


def _drop_trivial_slices(names: Tuple[str, ...]) -> List[Tuple[str, ...]]:
    """Possible genera multisets after removing all trivial constituents."""
    per_component = [_SLICE_DROP_TRIVIAL[name] for name in names]
    slices = set()
    for choice in cartesian_product(*per_component):
        merged: List[str] = []
        for part in choice:
            merged.extend(part)
        slices.add(_sorted_names(merged))
    return sorted(slices)


def identify_galois_module(
    fixture: FieldFixture, refinement: Optional[FieldFixture] = None
) -> Tuple[GaloisModuleCandidate, ...]:
    """Candidates for the S-unit module of a fixture, optionally refined.

    Without a refinement, returns every multiset of genera whose
    character multiplicities match the fixture's ranks and whose product
    of constants matches the constant forced by the class-number
    quotient; an empty answer means the fixture data is inconsistent,
    so it is raised as an error.

    With a refinement fixture over a larger set of places of the same
    extension, the extra places may only add trivial-character rank.
    The original lattice is then the saturated piece of the larger one
    complementary to the trivial directions, so only candidates that
    occur among the trivial-free slices of some surviving candidate of
    the refinement are kept.
    """
    base = _candidates(fixture)
    if not base:
        raise ValueError(
            "no module matches the observed quotient and ranks; fixture data inconsistent"
        )
    if refinement is None:
        return tuple(base)

    if refinement.descriptor != fixture.descriptor:
        raise ValueError("refinement fixture describes a different group")
    m = rational_multiplicities_from_ranks(fixture)
    m_ref = rational_multiplicities_from_ranks(refinement)
    if m[0] != 0:
        raise ValueError(
            "refinement requires a base fixture with no trivial constituents "
            f"(base multiplicities {m})"
        )
    if m_ref[1] != m[1] or m_ref[2] != m[2] or m_ref[0] < m[0]:
        raise ValueError(
            "refinement must add only trivial-character rank: base multiplicities "
            f"{m}, refinement {m_ref}"
        )
    refined = _candidates(refinement)
    if not refined:
        raise ValueError(
            "no module matches the refinement fixture; fixture data inconsistent"
        )
    allowed = set()
    for candidate in refined:
        allowed.update(_drop_trivial_slices(candidate.names))
    survivors = tuple(c for c in base if c.names in allowed)
    if not survivors:
        raise ValueError(
            "refinement eliminates every candidate; the two fixtures are inconsistent"
        )
    return survivors
