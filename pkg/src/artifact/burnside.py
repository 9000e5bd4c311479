"""Virtual permutation modules and Brauer relations of a finite group.

A virtual sum of transitive G-sets is stored as an integer coefficient
per subgroup class.  Such a sum is a *relation* when its virtual
permutation character vanishes identically, i.e. when the two sides of
the sum give isomorphic rational permutation representations.  The
relations form an integer lattice whose rank equals the number of
non-cyclic subgroup classes; this module computes that lattice and
transports relations along restriction, induction, and inflation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from .exactla import is_prime, left_kernel
from .groups import (
    FiniteGroup,
    SubgroupClass,
    class_of_subgroup,
    coset_action,
    double_cosets,
    left_cosets,
    quotient_by_normal,
    subgroup_as_group,
    subgroup_class_by_label,
    subgroup_classes,
)

__all__ = [
    "BurnsideElement",
    "Relation",
    "RelationBasis",
    "burnside_element",
    "zero_element",
    "element_sum",
    "permutation_character",
    "virtual_character",
    "is_relation",
    "verified_relation",
    "relation_lattice",
    "transport_relation",
    "is_zp_relation",
    "format_element",
    "element_to_json",
    "element_from_json",
]


@dataclass(frozen=True)
class BurnsideElement:
    """Integer combination of transitive G-sets, one coefficient per class.

    ``coefficients`` maps every subgroup-class label of ``group`` to an
    integer (zeros included); use :func:`burnside_element` to build one
    from a sparse mapping.
    """

    group: FiniteGroup
    coefficients: Mapping[str, int]

    def __post_init__(self) -> None:
        labels = [cls.label for cls in subgroup_classes(self.group)]
        if set(self.coefficients) != set(labels):
            raise ValueError(
                "coefficient keys must be exactly the subgroup-class labels "
                f"of {self.group.name}"
            )

    def is_zero(self) -> bool:
        """True iff every coefficient vanishes."""
        return all(c == 0 for c in self.coefficients.values())


@dataclass(frozen=True)
class Relation:
    """A Burnside element whose virtual permutation character vanishes."""

    element: BurnsideElement
    verified: bool


@dataclass(frozen=True)
class RelationBasis:
    """Canonical basis of the relation lattice of a group."""

    group: FiniteGroup
    basis: Tuple[Relation, ...]
    rank: int


def _resolve_class(
    group: FiniteGroup, which: Union[SubgroupClass, str]
) -> SubgroupClass:
    """A subgroup class of the group, from a label or a class object."""
    if isinstance(which, str):
        return subgroup_class_by_label(group, which)
    # re-anchor a class object in this group, catching cross-group mix-ups
    return class_of_subgroup(group, which.representative)


def burnside_element(
    group: FiniteGroup, coefficients: Mapping[str, int]
) -> BurnsideElement:
    """Build an element from a sparse label → coefficient mapping."""
    labels = [cls.label for cls in subgroup_classes(group)]
    unknown = sorted(set(coefficients) - set(labels))
    if unknown:
        raise ValueError(
            f"unknown subgroup-class labels for {group.name}: {', '.join(unknown)}"
        )
    coeffs = {label: int(coefficients.get(label, 0)) for label in labels}
    return BurnsideElement(group=group, coefficients=coeffs)


def zero_element(group: FiniteGroup) -> BurnsideElement:
    """The zero combination."""
    return burnside_element(group, {})


def element_sum(a: BurnsideElement, b: BurnsideElement) -> BurnsideElement:
    """Coefficient-wise sum of two elements over the same group."""
    if a.group.mul != b.group.mul or a.group.element_labels != b.group.element_labels:
        raise ValueError("cannot add elements over different groups")
    return burnside_element(
        a.group,
        {label: a.coefficients[label] + b.coefficients[label] for label in a.coefficients},
    )


def permutation_character(
    group: FiniteGroup, subgroup: Union[SubgroupClass, str]
) -> Tuple[int, ...]:
    """Fixed-point counts of the coset action, one per element class.

    Entry for the class of g is the number of cosets xH with gxH = xH;
    the tuple is aligned with ``group.conjugacy_classes()``.
    """
    cls = _resolve_class(group, subgroup)
    cosets = left_cosets(group, cls.representative)
    action = coset_action(group, cosets)
    return tuple(
        sum(1 for i in range(len(cosets)) if action[c[0]][i] == i)
        for c in group.conjugacy_classes()
    )


def virtual_character(element: BurnsideElement) -> Tuple[int, ...]:
    """Coefficient-weighted sum of coset-action characters."""
    classes = subgroup_classes(element.group)
    n = len(element.group.conjugacy_classes())
    total = [0] * n
    for cls in classes:
        c = element.coefficients[cls.label]
        if c == 0:
            continue
        char = permutation_character(element.group, cls)
        for i in range(n):
            total[i] += c * char[i]
    return tuple(total)


def is_relation(element: BurnsideElement) -> bool:
    """True iff the virtual permutation character vanishes identically."""
    return all(v == 0 for v in virtual_character(element))


def verified_relation(element: BurnsideElement) -> Relation:
    """Wrap an element as a verified relation; error if it is not one."""
    if not is_relation(element):
        raise ValueError(
            "element is not a relation: its virtual permutation character "
            "does not vanish"
        )
    return Relation(element=element, verified=True)


def relation_lattice(group: FiniteGroup) -> RelationBasis:
    """Canonical integral basis of the lattice of relations.

    The basis is the normal-form kernel of the fixed-point matrix
    (rows = subgroup classes, columns = element classes), so it is
    saturated: no basis vector is divisible by an integer > 1.  The rank
    always equals the number of non-cyclic subgroup classes; a mismatch
    would mean a bug and raises.
    """
    classes = subgroup_classes(group)
    matrix = [list(permutation_character(group, cls)) for cls in classes]
    kernel = left_kernel(matrix)
    basis: List[Relation] = []
    for row in kernel:
        coeffs = list(row)
        lead = next((x for x in coeffs if x != 0), 0)
        if lead < 0:
            coeffs = [-x for x in coeffs]
        element = burnside_element(
            group, {cls.label: c for cls, c in zip(classes, coeffs)}
        )
        basis.append(verified_relation(element))
    non_cyclic = sum(1 for cls in classes if not cls.is_cyclic)
    if len(basis) != non_cyclic:
        raise RuntimeError(
            f"relation lattice of {group.name} has rank {len(basis)}, "
            f"expected {non_cyclic} (one per non-cyclic subgroup class)"
        )
    return RelationBasis(group=group, basis=tuple(basis), rank=len(basis))


def _restrict(relation: Relation, subgroup: Union[SubgroupClass, str]) -> Relation:
    """Mackey restriction of a relation to a subgroup (as its own group)."""
    group = relation.element.group
    target = _resolve_class(group, subgroup)
    sub_group, embedding = subgroup_as_group(group, target.representative)
    position = {x: i for i, x in enumerate(embedding)}
    coeffs: Dict[str, int] = {}
    for cls in subgroup_classes(group):
        c = relation.element.coefficients[cls.label]
        if c == 0:
            continue
        blocks = double_cosets(group, target, cls)
        for d in blocks.representatives:
            conj = {
                group.mul[group.mul[d][h]][group.inv[d]]
                for h in cls.representative
            }
            meet = sorted(position[x] for x in conj if x in position)
            label = class_of_subgroup(sub_group, meet).label
            coeffs[label] = coeffs.get(label, 0) + c
    return burnside_element(sub_group, coeffs)


def _induce(
    relation: Relation, supergroup: FiniteGroup, embedding: Sequence[int]
) -> BurnsideElement:
    """Relabel subgroup classes through an injective homomorphism."""
    group = relation.element.group
    emb = tuple(embedding)
    if len(emb) != group.order or len(set(emb)) != group.order:
        raise ValueError("embedding must be an injective map on all elements")
    if any(x < 0 or x >= supergroup.order for x in emb):
        raise ValueError("embedding image out of range in the supergroup")
    for x in range(group.order):
        for y in range(group.order):
            if emb[group.mul[x][y]] != supergroup.mul[emb[x]][emb[y]]:
                raise ValueError("embedding is not a group homomorphism")
    coeffs: Dict[str, int] = {}
    for cls in subgroup_classes(group):
        c = relation.element.coefficients[cls.label]
        if c == 0:
            continue
        image = sorted(emb[u] for u in cls.representative)
        label = class_of_subgroup(supergroup, image).label
        coeffs[label] = coeffs.get(label, 0) + c
    return burnside_element(supergroup, coeffs)


def _inflate(
    relation: Relation, cover: FiniteGroup, normal: Union[SubgroupClass, str]
) -> BurnsideElement:
    """Pull a relation on a quotient group back to the covering group."""
    normal_cls = _resolve_class(cover, normal)
    quotient, _, correspondence = quotient_by_normal(cover, normal_cls)
    group = relation.element.group
    if group.mul != quotient.mul:
        raise ValueError(
            "inflate needs a relation living on the quotient of the cover "
            "by the given normal subgroup (same multiplication table)"
        )
    coeffs: Dict[str, int] = {}
    for label, c in relation.element.coefficients.items():
        if c == 0:
            continue
        parent = correspondence[label]
        coeffs[parent] = coeffs.get(parent, 0) + c
    return burnside_element(cover, coeffs)


def transport_relation(
    relation: Relation,
    mode: str,
    *,
    subgroup: Union[SubgroupClass, str, None] = None,
    supergroup: FiniteGroup | None = None,
    embedding: Sequence[int] | None = None,
    cover: FiniteGroup | None = None,
    normal: Union[SubgroupClass, str, None] = None,
) -> Relation:
    """Move a verified relation along restriction, induction, or inflation.

    ``mode="restrict"`` needs ``subgroup`` and returns a relation on the
    subgroup as a standalone group (Mackey double-coset formula).
    ``mode="induce"`` needs ``supergroup`` and ``embedding`` (element map
    into it) and relabels each subgroup class by its image class.
    ``mode="inflate"`` needs ``cover`` and ``normal`` with the relation
    living on cover/normal, and relabels through the subgroup
    correspondence of the quotient.  The result is re-verified; failure
    aborts, since it would mean an implementation bug.
    """
    if not relation.verified:
        raise ValueError("transport requires a verified relation")
    if mode == "restrict":
        if subgroup is None:
            raise ValueError("restrict needs subgroup=...")
        element = _restrict(relation, subgroup)
    elif mode == "induce":
        if supergroup is None or embedding is None:
            raise ValueError("induce needs supergroup=... and embedding=...")
        element = _induce(relation, supergroup, embedding)
    elif mode == "inflate":
        if cover is None or normal is None:
            raise ValueError("inflate needs cover=... and normal=...")
        element = _inflate(relation, cover, normal)
    else:
        raise ValueError(f"unknown transport mode {mode!r}")
    if not is_relation(element):
        raise RuntimeError(
            f"transported element failed re-verification in mode {mode!r}; "
            "this is an internal error"
        )
    return Relation(element=element, verified=True)


def is_zp_relation(
    relation: Relation, p: int, effort: int = 200, seed: int = 0
) -> str:
    """One-sided test for being a relation over the p-local integers.

    Returns ``"yes"`` when an explicit injective homomorphism between the
    two sides of the relation with cokernel of order prime to p is found,
    and ``"unknown"`` when the randomized search exhausts its budget.
    A ``"yes"`` is certified by the found map; ``"unknown"`` is not a no.
    """
    if not relation.verified:
        raise ValueError("is_zp_relation requires a verified relation")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if relation.element.is_zero():
        return "yes"
    from .dokchitser import InjectionSearchExhausted, find_injection

    try:
        find_injection(relation, coprime_to=p, seed=seed, budget=effort)
    except InjectionSearchExhausted:
        return "unknown"
    return "yes"


def format_element(element: BurnsideElement) -> str:
    """Render as a signed sum of class labels, e.g. ``1 - 2*C2 - C3 + 2*G``."""
    parts: List[str] = []
    for cls in subgroup_classes(element.group):
        c = element.coefficients[cls.label]
        if c == 0:
            continue
        mag = abs(c)
        term = cls.label if mag == 1 else f"{mag}*{cls.label}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


def element_to_json(element: BurnsideElement) -> Dict[str, int]:
    """JSON-ready label → coefficient mapping, zero entries omitted."""
    return {
        cls.label: element.coefficients[cls.label]
        for cls in subgroup_classes(element.group)
        if element.coefficients[cls.label] != 0
    }


def element_from_json(group: FiniteGroup, data: Mapping[str, int]) -> BurnsideElement:
    """Rebuild an element from its JSON mapping."""
    return burnside_element(group, data)
