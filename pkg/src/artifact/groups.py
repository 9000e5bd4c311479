"""Small finite groups: construction, subgroup classes, cosets, quotients.

Groups are explicit multiplication tables over element indices
``0 .. order-1`` with the identity at index 0.  A descriptor
mini-language builds the stock families:

- ``D2q:15``  dihedral group of order 30 (presentation
  ``<a, b | a^2 = b^15 = (ab)^2 = 1>``, ``a`` a reflection, ``b`` the
  rotation),
- ``C:6``     cyclic of order 6,
- ``S:4``     symmetric group on 4 letters (n <= 5),
- ``prod(D2q:3,C:2)``  direct products,
- ``table:<path>``     explicit multiplication table from a JSON file.

Everything is validated at construction: associativity (Light's test
over a generating set), identity/inverse consistency, and the order
bound.  All objects are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

MAX_GROUP_ORDER = 200

__all__ = [
    "MAX_GROUP_ORDER",
    "FiniteGroup",
    "SubgroupClass",
    "DoubleCosetDecomposition",
    "build_group",
    "subgroup_classes",
    "subgroup_class_by_label",
    "class_of_subgroup",
    "quotient_by_normal",
    "double_cosets",
    "is_p_hypo_elementary",
    "subgroup_as_group",
    "left_cosets",
    "coset_action",
    "dihedral_group",
    "cyclic_group",
    "symmetric_group",
    "direct_product",
]


class FiniteGroup:
    """A finite group given by its multiplication table.

    Element 0 is the identity.  ``mul[x][y]`` is the product ``x * y``.
    """

    def __init__(
        self,
        mul: Sequence[Sequence[int]],
        element_labels: Optional[Sequence[str]] = None,
        generator_indices: Optional[Sequence[int]] = None,
        name: str = "G",
        descriptor: Optional[str] = None,
    ) -> None:
        order = len(mul)
        if order == 0:
            raise ValueError("a group needs at least the identity element")
        if order > MAX_GROUP_ORDER:
            raise ValueError(
                f"group order {order} exceeds the implementation bound {MAX_GROUP_ORDER}"
            )
        table: Tuple[Tuple[int, ...], ...] = tuple(tuple(row) for row in mul)
        for x, row in enumerate(table):
            if len(row) != order:
                raise ValueError(f"multiplication table row {x} has wrong length")
            for y in row:
                if not (0 <= y < order):
                    raise ValueError("multiplication table entry out of range")
        identity = None
        for e in range(order):
            if all(table[e][x] == x and table[x][e] == x for x in range(order)):
                identity = e
                break
        if identity is None:
            raise ValueError("multiplication table has no identity element")
        if identity != 0:
            raise ValueError("identity element must sit at index 0")
        inv: List[int] = [-1] * order
        for x in range(order):
            for y in range(order):
                if table[x][y] == identity:
                    if table[y][x] != identity:
                        raise ValueError("one-sided inverse found; table is not a group")
                    inv[x] = y
                    break
            if inv[x] < 0:
                raise ValueError(f"element {x} has no inverse")
        self.order = order
        self.mul = table
        self.inv = tuple(inv)
        self.identity = identity
        if generator_indices is None:
            generator_indices = tuple(range(order))
        self.generator_indices = tuple(generator_indices)
        if element_labels is None:
            element_labels = tuple(f"g{x}" for x in range(order))
        if len(element_labels) != order:
            raise ValueError("element_labels length mismatch")
        self.element_labels = tuple(element_labels)
        self.name = name
        # a build_group() string that reconstructs this exact table, if known
        self.descriptor = descriptor
        self._check_associativity()
        if not self._generates(set(self.generator_indices)):
            raise ValueError("declared generators do not generate the group")
        self._subgroup_classes: Optional[Tuple[SubgroupClass, ...]] = None
        self._conjugacy_classes: Optional[Tuple[Tuple[int, ...], ...]] = None

    def _check_associativity(self) -> None:
        # Light's test: checking a(xy) = (ax)y for all a in a generating
        # set and all x, y suffices because the maps x -> ax generate the
        # left-translation representation.
        mul = self.mul
        n = self.order
        for a in self.generator_indices:
            row = mul[a]
            for x in range(n):
                ax = row[x]
                mul_ax = mul[ax]
                mul_x = mul[x]
                for y in range(n):
                    if row[mul_x[y]] != mul_ax[y]:
                        raise ValueError("multiplication table is not associative")

    def _generates(self, gens: set) -> bool:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                for y in (self.mul[x][g], self.mul[g][x]):
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return len(seen) == self.order

    def multiply(self, x: int, y: int) -> int:
        """Product of two elements."""
        return self.mul[x][y]

    def inverse(self, x: int) -> int:
        """Inverse of an element."""
        return self.inv[x]

    def conjugate(self, g: int, x: int) -> int:
        """Conjugate ``g x g^-1``."""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def element_order(self, x: int) -> int:
        """Multiplicative order of an element."""
        n = 1
        y = x
        while y != self.identity:
            y = self.mul[y][x]
            n += 1
        return n

    def conjugacy_classes(self) -> Tuple[Tuple[int, ...], ...]:
        """Element conjugacy classes, sorted by element order then least index."""
        if self._conjugacy_classes is None:
            seen = [False] * self.order
            classes: List[Tuple[int, ...]] = []
            for x in range(self.order):
                if seen[x]:
                    continue
                orbit = sorted({self.conjugate(g, x) for g in range(self.order)})
                for y in orbit:
                    seen[y] = True
                classes.append(tuple(orbit))
            classes.sort(key=lambda cls: (self.element_order(cls[0]), cls[0]))
            self._conjugacy_classes = tuple(classes)
        return self._conjugacy_classes

    def closure(self, elements: Sequence[int]) -> FrozenSet[int]:
        """Subgroup generated by the given elements.

        Orbit of the identity under right multiplication by the
        generators; a finite submonoid containing the identity is a
        subgroup, so no explicit inverses are needed.
        """
        gens = {x for x in elements if x != self.identity}
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    def is_subgroup(self, elements: FrozenSet[int]) -> bool:
        """True iff the element set is closed under products and inverses."""
        if self.identity not in elements:
            return False
        return all(
            self.mul[x][y] in elements for x in elements for y in elements
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"FiniteGroup({self.name}, order={self.order})"


@dataclass(frozen=True)
class SubgroupClass:
    """A conjugacy class of subgroups.

    ``representative`` is the lexicographically least sorted element tuple
    in the class; ``members`` lists every subgroup in the class.
    """

    representative: Tuple[int, ...]
    order: int
    is_cyclic: bool
    class_size: int
    label: str
    members: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class DoubleCosetDecomposition:
    """Decomposition of a group into H-g-K double cosets."""

    left: SubgroupClass
    right: SubgroupClass
    representatives: Tuple[int, ...]
    block_sizes: Tuple[int, ...]


def dihedral_group(q: int) -> FiniteGroup:
    """Dihedral group of order 2q: <a, b | a^2 = b^q = (ab)^2 = 1>.

    Index encoding: ``i*q + j`` is ``a^i b^j``.  ``a`` is a reflection,
    ``b`` the rotation of order q.
    """
    if q < 1:
        raise ValueError("dihedral parameter must be positive")
    order = 2 * q

    def idx(i: int, j: int) -> int:
        return (i % 2) * q + (j % q)

    mul = [[0] * order for _ in range(order)]
    for i1 in range(2):
        for j1 in range(q):
            for i2 in range(2):
                for j2 in range(q):
                    # a^i1 b^j1 * a^i2 b^j2 = a^(i1+i2) b^(j1*(-1)^i2 + j2)
                    j = (-j1 if i2 else j1) + j2
                    mul[idx(i1, j1)][idx(i2, j2)] = idx(i1 + i2, j)
    labels = []
    for i in range(2):
        for j in range(q):
            if i == 0 and j == 0:
                labels.append("e")
            elif i == 0:
                labels.append("b" if j == 1 else f"b^{j}")
            elif j == 0:
                labels.append("a")
            else:
                labels.append(f"a*b^{j}" if j > 1 else "a*b")
    gens = [q] if q == 1 else [q, 1]
    return FiniteGroup(mul, labels, gens, name=f"D{order}", descriptor=f"D2q:{q}")


def cyclic_group(n: int) -> FiniteGroup:
    """Cyclic group of order n."""
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    mul = [[(x + y) % n for y in range(n)] for x in range(n)]
    labels = ["e"] + ["g" if j == 1 else f"g^{j}" for j in range(1, n)]
    gens = [] if n == 1 else [1]
    return FiniteGroup(mul, labels, gens, name=f"C{n}", descriptor=f"C:{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """Symmetric group on n letters (n <= 5), elements in lexicographic order."""
    if not (1 <= n <= 5):
        raise ValueError("symmetric group supported only for 1 <= n <= 5")
    elements = sorted(permutations(range(n)))
    index = {perm: i for i, perm in enumerate(elements)}
    mul = [
        [index[tuple(s[t[k]] for k in range(n))] for t in elements]
        for s in elements
    ]

    def cycle_label(perm: Tuple[int, ...]) -> str:
        seen = set()
        cycles = []
        for start in range(n):
            if start in seen or perm[start] == start:
                seen.add(start)
                continue
            cycle = [start]
            seen.add(start)
            nxt = perm[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = perm[nxt]
            cycles.append("(" + " ".join(str(c + 1) for c in cycle) + ")")
        return "".join(cycles) if cycles else "e"

    labels = [cycle_label(p) for p in elements]
    gens = []
    if n >= 2:
        transposition = tuple([1, 0] + list(range(2, n)))
        gens.append(index[transposition])
    if n >= 3:
        n_cycle = tuple(list(range(1, n)) + [0])
        gens.append(index[n_cycle])
    return FiniteGroup(mul, labels, gens, name=f"S{n}", descriptor=f"S:{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product with index encoding ``x*|b| + y``."""
    order = a.order * b.order
    if order > MAX_GROUP_ORDER:
        raise ValueError(
            f"group order {order} exceeds the implementation bound {MAX_GROUP_ORDER}"
        )
    nb = b.order
    mul = [
        [a.mul[x1][x2] * nb + b.mul[y1][y2] for x2 in range(a.order) for y2 in range(nb)]
        for x1 in range(a.order)
        for y1 in range(nb)
    ]
    labels = [
        f"{la}|{lb}" for la in a.element_labels for lb in b.element_labels
    ]
    gens = [g * nb for g in a.generator_indices] + list(b.generator_indices)
    gens = [g for g in dict.fromkeys(gens) if g != 0] or [0]
    descriptor = (
        f"prod({a.descriptor},{b.descriptor})"
        if a.descriptor and b.descriptor
        else None
    )
    return FiniteGroup(
        mul, labels, gens, name=f"{a.name}x{b.name}", descriptor=descriptor
    )


def _split_product_args(body: str) -> List[str]:
    parts: List[str] = []
    depth = 0
    current = ""
    for ch in body:
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        current += ch
    parts.append(current)
    return [p.strip() for p in parts if p.strip()]


def build_group(descriptor: str) -> FiniteGroup:
    """Build a verified group from a descriptor string.

    Accepted forms: ``D2q:<q>``, ``C:<n>``, ``S:<n>``,
    ``prod(<desc>,<desc>,...)``, ``table:<path>``.
    """
    descriptor = descriptor.strip()
    if descriptor.startswith("prod(") and descriptor.endswith(")"):
        parts = _split_product_args(descriptor[len("prod(") : -1])
        if len(parts) < 2:
            raise ValueError("prod(...) needs at least two factors")
        group = build_group(parts[0])
        for part in parts[1:]:
            group = direct_product(group, build_group(part))
        return group
    if descriptor.startswith("table:"):
        path = descriptor[len("table:") :]
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        if isinstance(data, dict):
            mul = data["mul"]
            labels = data.get("labels")
        else:
            mul = data
            labels = None
        return FiniteGroup(mul, element_labels=labels, name="table")
    if ":" not in descriptor:
        raise ValueError(f"malformed group descriptor: {descriptor!r}")
    kind, _, arg = descriptor.partition(":")
    try:
        value = int(arg)
    except ValueError as exc:
        raise ValueError(f"malformed group descriptor: {descriptor!r}") from exc
    if kind == "D2q":
        return dihedral_group(value)
    if kind == "C":
        return cyclic_group(value)
    if kind == "S":
        return symmetric_group(value)
    raise ValueError(f"unknown group descriptor kind: {kind!r}")


def _enumerate_subgroups(group: FiniteGroup) -> List[FrozenSet[int]]:
    """All subgroups, by closure BFS starting from cyclic subgroups."""
    found: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    trivial = frozenset({group.identity})
    found[trivial] = ()
    queue: List[FrozenSet[int]] = []
    for x in range(group.order):
        sub = group.closure([x])
        if sub not in found:
            found[sub] = (x,)
            queue.append(sub)
    queue.append(trivial)
    while queue:
        sub = queue.pop()
        gens = found[sub]
        for x in range(group.order):
            if x in sub:
                continue
            new_gens = gens + (x,)
            new_sub = group.closure(new_gens)
            if new_sub not in found:
                found[new_sub] = new_gens
                queue.append(new_sub)
    return list(found.keys())


def _conjugate_set(group: FiniteGroup, elements: FrozenSet[int], g: int) -> FrozenSet[int]:
    return frozenset(group.conjugate(g, x) for x in elements)


def subgroup_classes(group: FiniteGroup) -> Tuple[SubgroupClass, ...]:
    """Conjugacy classes of subgroups, sorted by order then label.

    Labels: "1" for the trivial subgroup, "G" for the whole group,
    "C<n>" for cyclic, "D<n>" for non-cyclic of order n, with "#k"
    suffixes distinguishing classes of equal order and shape.
    """
    if group._subgroup_classes is not None:
        return group._subgroup_classes
    subgroups = _enumerate_subgroups(group)
    remaining = set(subgroups)
    raw_classes: List[List[FrozenSet[int]]] = []
    while remaining:
        sub = min(remaining, key=lambda s: tuple(sorted(s)))
        orbit = {sub}
        for g in range(group.order):
            orbit.add(_conjugate_set(group, sub, g))
        raw_classes.append(sorted(orbit, key=lambda s: tuple(sorted(s))))
        remaining -= orbit
    records = []
    for members in raw_classes:
        rep = tuple(sorted(members[0]))
        order = len(rep)
        is_cyclic = any(group.element_order(x) == order for x in rep)
        records.append((rep, order, is_cyclic, members))
    records.sort(key=lambda rec: (rec[1], not rec[2], rec[0]))
    base_labels: List[str] = []
    for rep, order, is_cyclic, _ in records:
        if order == group.order:
            base_labels.append("G")
        elif order == 1:
            base_labels.append("1")
        elif is_cyclic:
            base_labels.append(f"C{order}")
        else:
            base_labels.append(f"D{order}")
    counts: Dict[str, int] = {}
    for label in base_labels:
        counts[label] = counts.get(label, 0) + 1
    seen: Dict[str, int] = {}
    classes: List[SubgroupClass] = []
    for (rep, order, is_cyclic, members), base in zip(records, base_labels):
        if counts[base] > 1:
            seen[base] = seen.get(base, 0) + 1
            label = f"{base}#{seen[base]}"
        else:
            label = base
        classes.append(
            SubgroupClass(
                representative=rep,
                order=order,
                is_cyclic=is_cyclic,
                class_size=len(members),
                label=label,
                members=tuple(tuple(sorted(m)) for m in members),
            )
        )
    classes.sort(key=lambda cls: (cls.order, cls.label))
    result = tuple(classes)
    group._subgroup_classes = result
    return result


def subgroup_class_by_label(group: FiniteGroup, label: str) -> SubgroupClass:
    """Look up a subgroup class by its label."""
    for cls in subgroup_classes(group):
        if cls.label == label:
            return cls
    raise ValueError(f"no subgroup class labelled {label!r} in {group.name}")


def class_of_subgroup(group: FiniteGroup, elements: Sequence[int]) -> SubgroupClass:
    """The conjugacy class a given subgroup belongs to."""
    target = tuple(sorted(elements))
    for cls in subgroup_classes(group):
        if target in cls.members:
            return cls
    raise ValueError("element set is not a subgroup of the group")


def left_cosets(group: FiniteGroup, subgroup: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Left cosets of a subgroup, each sorted, ordered by least element."""
    sub = frozenset(subgroup)
    seen = [False] * group.order
    cosets: List[Tuple[int, ...]] = []
    for g in range(group.order):
        if seen[g]:
            continue
        coset = tuple(sorted(group.mul[g][h] for h in sub))
        for x in coset:
            seen[x] = True
        cosets.append(coset)
    return tuple(cosets)


def coset_action(
    group: FiniteGroup, cosets: Sequence[Tuple[int, ...]]
) -> Tuple[Tuple[int, ...], ...]:
    """Permutation action of each group element on the left-coset list.

    ``result[g][i]`` is the index of the coset ``g * cosets[i]``.
    """
    coset_of = [0] * group.order
    for i, coset in enumerate(cosets):
        for x in coset:
            coset_of[x] = i
    return tuple(
        tuple(coset_of[group.mul[g][coset[0]]] for coset in cosets)
        for g in range(group.order)
    )


def subgroup_as_group(
    group: FiniteGroup, elements: Sequence[int]
) -> Tuple[FiniteGroup, Tuple[int, ...]]:
    """A subgroup as a standalone group plus the embedding into the parent.

    Returns ``(H, embedding)`` where ``embedding[i]`` is the parent index
    of H's element i.  Elements keep their parent order, so the identity
    stays at index 0.
    """
    elems = sorted(set(elements))
    if elems[0] != group.identity:
        raise ValueError("subgroup must contain the identity")
    position = {x: i for i, x in enumerate(elems)}
    try:
        mul = [[position[group.mul[x][y]] for y in elems] for x in elems]
    except KeyError as exc:
        raise ValueError("element set is not closed under multiplication") from exc
    labels = [group.element_labels[x] for x in elems]
    sub = FiniteGroup(mul, labels, name=f"{group.name}-sub{len(elems)}")
    return sub, tuple(elems)


def quotient_by_normal(
    group: FiniteGroup, normal: SubgroupClass
) -> Tuple[FiniteGroup, Tuple[int, ...], Dict[str, str]]:
    """Quotient by a normal subgroup.

    Returns ``(Q, projection, correspondence)``: the quotient group, the
    element map ``g -> coset index``, and a dict sending each subgroup-class
    label of Q to the label of the class of its preimage in the parent
    (a bijection onto classes of subgroups containing the normal subgroup).
    """
    n_elems = frozenset(normal.representative)
    for g in range(group.order):
        if _conjugate_set(group, n_elems, g) != n_elems:
            raise ValueError(f"subgroup {normal.label} is not normal")
    cosets = left_cosets(group, n_elems)
    coset_of = [0] * group.order
    for i, coset in enumerate(cosets):
        for x in coset:
            coset_of[x] = i
    mul = [
        [coset_of[group.mul[a[0]][b[0]]] for b in cosets]
        for a in cosets
    ]
    labels = [f"{group.element_labels[coset[0]]}·N" for coset in cosets]
    quotient = FiniteGroup(mul, labels, name=f"{group.name}/{normal.label}")
    projection = tuple(coset_of)
    correspondence: Dict[str, str] = {}
    for qcls in subgroup_classes(quotient):
        preimage = sorted(
            g for g in range(group.order) if projection[g] in qcls.representative
        )
        correspondence[qcls.label] = class_of_subgroup(group, preimage).label
    return quotient, projection, correspondence


def double_cosets(
    group: FiniteGroup, left: SubgroupClass, right: SubgroupClass
) -> DoubleCosetDecomposition:
    """H-g-K double cosets using the class representatives.

    Deterministic: blocks are reported by their lowest element index,
    in increasing order.
    """
    h_elems = left.representative
    k_elems = right.representative
    seen = [False] * group.order
    reps: List[int] = []
    sizes: List[int] = []
    for g in range(group.order):
        if seen[g]:
            continue
        block = {group.mul[group.mul[h][g]][k] for h in h_elems for k in k_elems}
        for x in block:
            seen[x] = True
        reps.append(g)
        sizes.append(len(block))
    return DoubleCosetDecomposition(
        left=left, right=right, representatives=tuple(reps), block_sizes=tuple(sizes)
    )


def is_p_hypo_elementary(group: FiniteGroup, subgroup: SubgroupClass, p: int) -> bool:
    """True iff the subgroup has a normal Sylow p-subgroup with cyclic quotient."""
    from .exactla import is_prime

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    elems = subgroup.representative
    order = subgroup.order
    p_part = 1
    n = order
    while n % p == 0:
        p_part *= p
        n //= p
    sylow = [x for x in elems if _is_p_power_order(group, x, p)]
    if len(sylow) != p_part:
        return False
    sylow_set = frozenset(sylow)
    if not all(group.mul[x][y] in sylow_set for x in sylow for y in sylow):
        return False
    # the set of all p-power-order elements is conjugation-stable, so once
    # it is a subgroup it is the unique (hence normal) Sylow p-subgroup
    quotient_order = order // p_part
    for x in elems:
        m = 1
        y = x
        while y not in sylow_set:
            y = group.mul[y][x]
            m += 1
        if m == quotient_order:
            return True
    return quotient_order == 1


def _is_p_power_order(group: FiniteGroup, x: int, p: int) -> bool:
    n = group.element_order(x)
    while n % p == 0:
        n //= p
    return n == 1
