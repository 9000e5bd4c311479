"""Randomized invariant suites for the regulator-constant machinery.

Each suite replays one algebraic identity on freshly sampled inputs:
lattices drawn from the dihedral zoo, their direct sums, sign twists,
stable sublattices and overlattices, and relations drawn from the
relation lattices of the sampled groups.  Every trial derives its own
seed from (suite name, master seed, trial number), so a run is
reproducible end to end and trials can be sharded without sharing
state.  A report carries the trial counts and the first few failure
descriptions; suites never raise on a failed identity.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from .burnside import (
    BurnsideElement,
    Relation,
    burnside_element,
    relation_lattice,
    transport_relation,
    verified_relation,
)
from .dokchitser import I_invariant, dok_pairing, trivial_prime_certificate
from .groups import (
    FiniteGroup,
    build_group,
    dihedral_group,
    subgroup_class_by_label,
    subgroup_as_group,
    subgroup_classes,
)
from .lattices import (
    ZGLattice,
    direct_sum,
    fixed_sublattice,
    induce_lattice,
    permutation_lattice,
    random_stable_sublattice,
    rational_multiplicities_d2p,
    restrict_lattice,
    span_sublattice,
    tensor_product,
    twist_sign,
)
from .zoo import standard_relation, zoo_lattice

__all__ = [
    "SUITE_NAMES",
    "SuiteReport",
    "run_suite",
    "run_all_suites",
]


@dataclass(frozen=True)
class SuiteReport:
    """Outcome of one suite run: counts plus the first failure messages."""

    name: str
    trials: int
    failures: int
    seed: int
    failure_notes: Tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: {self.trials - self.failures}/{self.trials} {verdict}"
        )


def _trial_seed(name: str, seed: int, trial: int) -> int:
    digest = hashlib.sha256(f"{name}:{seed}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Samplers


_ZOO_RANKS = {
    "triv": lambda p: 1,
    "eps": lambda p: 1,
    "rho": lambda p: 2,
    "A": lambda p: p - 1,
    "Aprime": lambda p: p - 1,
    "ext_Aprime_1": lambda p: p,
    "ext_A_eps": lambda p: p,
    "regular": lambda p: 2 * p,
}


def _random_d2p_lattice(
    rng: random.Random, p: int, max_rank: int, sublattice: bool = True
) -> ZGLattice:
    """A random dihedral lattice: zoo summands, optional twist/sublattice."""
    parts: List[ZGLattice] = []
    budget = max_rank
    for _ in range(rng.choice((1, 1, 2, 2, 3))):
        pool = [n for n, r in _ZOO_RANKS.items() if r(p) <= budget]
        if not pool:
            break
        name = rng.choice(pool)
        parts.append(zoo_lattice(p, name).lattice)
        budget -= _ZOO_RANKS[name](p)
    if not parts:
        parts.append(zoo_lattice(p, "triv").lattice)
    lattice = parts[0]
    for part in parts[1:]:
        lattice = direct_sum(lattice, part)
    if rng.random() < 0.3:
        lattice = twist_sign(lattice)
    if sublattice and rng.random() < 0.3:
        lattice, _ = random_stable_sublattice(lattice, rng.randrange(2**30), 64)
    return lattice


def _scaled_standard(p: int, k: int) -> Relation:
    group = dihedral_group(p)
    return verified_relation(
        burnside_element(group, {"1": k, "C2": -2 * k, f"C{p}": -k, "G": 2 * k})
    )


def _combine(group: FiniteGroup, basis: Sequence[Relation], coeffs: Sequence[int]) -> Relation:
    total: Dict[str, int] = {}
    for relation, c in zip(basis, coeffs):
        for label, value in relation.element.coefficients.items():
            total[label] = total.get(label, 0) + c * value
    return verified_relation(burnside_element(group, total))


class _D30Setting:
    """Cached D_6 <= D_30 embedding and relation data shared by suites."""

    def __init__(self) -> None:
        self.d30 = dihedral_group(15)
        cls = subgroup_class_by_label(self.d30, "D6")
        self.sub, self.embedding = subgroup_as_group(self.d30, cls.representative)
        self.basis = relation_lattice(self.d30).basis
        self.eps30 = _sign_lattice(self.d30)

    def random_relation(self, rng: random.Random) -> Relation:
        coeffs = [rng.randint(-1, 1) for _ in self.basis]
        if not any(coeffs):
            coeffs[rng.randrange(len(coeffs))] = rng.choice((-1, 1))
        return _combine(self.d30, self.basis, coeffs)

    def random_lattice(self, rng: random.Random, max_rank: int = 6) -> ZGLattice:
        pool = [("G", 1), ("D10", 3), ("C15", 2), ("D6", 5), ("C5", 6)]
        label, rank = rng.choice([(l, r) for l, r in pool if r <= max_rank])
        lattice = permutation_lattice(self.d30, label)
        if rng.random() < 0.4:
            lattice = tensor_product(lattice, _sign_lattice(self.d30))
        if rank + 1 <= max_rank and rng.random() < 0.4:
            lattice = direct_sum(lattice, _sign_lattice(self.d30))
        return lattice


def _sign_lattice(group: FiniteGroup) -> ZGLattice:
    """Rank-1 lattice where reflections act by -1.

    Dihedral groups from dihedral_group() put the q rotations at indices
    0..q-1 and the reflections after them.
    """
    q = group.order // 2
    matrices = {g: ((1,),) if g < q else ((-1,),) for g in range(group.order)}
    return ZGLattice(group, matrices)


_D30: List[_D30Setting] = []


def _d30_setting() -> _D30Setting:
    if not _D30:
        _D30.append(_D30Setting())
    return _D30[0]


# ---------------------------------------------------------------------------
# Trial bodies (raise AssertionError on an identity violation)


def _trial_multiplicativity(rng: random.Random) -> None:
    # In the lattice argument, over an order-2p dihedral group.
    p = rng.choice((3, 5))
    theta = _scaled_standard(p, rng.choice((-2, -1, 1, 2)))
    left = _random_d2p_lattice(rng, p, max_rank=4)
    right = _random_d2p_lattice(rng, p, max_rank=4)
    joint = dok_pairing(direct_sum(left, right), theta).value
    split = dok_pairing(left, theta).value * dok_pairing(right, theta).value
    assert joint == split, f"sum lattice gave {joint}, factors give {split}"

    # In the relation argument, over D_30 where the relation rank is 3.
    setting = _d30_setting()
    first = setting.random_relation(rng)
    second = setting.random_relation(rng)
    total = _combine(
        setting.d30,
        (first, second),
        (1, 1),
    )
    lattice = setting.random_lattice(rng)
    joint = dok_pairing(lattice, total).value
    split = dok_pairing(lattice, first).value * dok_pairing(lattice, second).value
    assert joint == split, f"sum relation gave {joint}, factors give {split}"


def _trial_restriction_induction(rng: random.Random) -> None:
    setting = _d30_setting()
    d30, sub, embedding = setting.d30, setting.sub, setting.embedding

    # Restricted lattice against induced relation.
    k = rng.choice((-1, 1, 2))
    theta_h = verified_relation(
        burnside_element(sub, {"1": k, "C2": -2 * k, "C3": -k, "G": 2 * k})
    )
    theta_up = transport_relation(theta_h, "induce", supergroup=d30, embedding=embedding)
    gamma = setting.random_lattice(rng)
    down = restrict_lattice(gamma, sub, embedding)
    lhs = dok_pairing(down, theta_h).value
    rhs = dok_pairing(gamma, theta_up).value
    assert lhs == rhs, f"restricted lattice gave {lhs}, induced relation {rhs}"

    # Induced lattice against restricted relation.
    base = rng.choice(("G", "C3", "eps", "eps_c3"))
    if base == "eps":
        gamma_h = restrict_lattice(setting.eps30, sub, embedding)
    elif base == "eps_c3":
        gamma_h = tensor_product(
            permutation_lattice(sub, "C3"),
            restrict_lattice(setting.eps30, sub, embedding),
        )
    else:
        gamma_h = permutation_lattice(sub, base)
    up = induce_lattice(gamma_h, d30, embedding)
    theta_g = setting.random_relation(rng)
    theta_down = transport_relation(theta_g, "restrict", subgroup="D6")
    lhs = dok_pairing(up, theta_g).value
    rhs = dok_pairing(gamma_h, theta_down).value
    assert lhs == rhs, f"induced lattice gave {lhs}, restricted relation {rhs}"


def _inflated_relation(setting: _D30Setting, normal: str) -> Relation:
    mapping = {
        "C5": {"C5": 1, "D10": -2, "C15": -1, "G": 2},
        "C3": {"C3": 1, "D6": -2, "C15": -1, "G": 2},
    }
    return verified_relation(burnside_element(setting.d30, mapping[normal]))


def _trial_fixed_support(rng: random.Random) -> None:
    setting = _d30_setting()
    normal = rng.choice(("C5", "C3"))
    theta = _inflated_relation(setting, normal)
    gamma = setting.random_lattice(rng)
    full = dok_pairing(gamma, theta).value

    # Common core of every subgroup in the relation's support.
    support = [
        subgroup_class_by_label(setting.d30, label)
        for label, c in theta.element.coefficients.items()
        if c != 0
    ]
    core = set(support[0].representative)
    for cls in support[1:]:
        core &= set(cls.representative)
    core_label = next(
        cls.label
        for cls in subgroup_classes(setting.d30)
        if set(cls.representative) == core
    )
    fixed = fixed_sublattice(gamma, core_label)
    if fixed.dimension == 0:
        assert full == 1, f"no fixed part, yet the constant is {full}"
        return
    fixed_part = span_sublattice(gamma, fixed.column_vectors())
    reduced = dok_pairing(fixed_part, theta).value
    assert full == reduced, f"lattice gave {full}, its fixed part {reduced}"


_CORPUS = ("D2q:3", "D2q:5", "D2q:15", "S:4", "C:6", "prod(D2q:3,C:2)")


def _random_group_lattice(
    rng: random.Random, group: FiniteGroup, max_rank: int = 8
) -> ZGLattice:
    pool = [
        cls.label
        for cls in subgroup_classes(group)
        if group.order // cls.order <= max_rank
    ]
    lattice = permutation_lattice(group, rng.choice(pool))
    remaining = max_rank - lattice.rank
    extras = [
        cls.label
        for cls in subgroup_classes(group)
        if group.order // cls.order <= remaining
    ]
    if extras and rng.random() < 0.5:
        lattice = direct_sum(lattice, permutation_lattice(group, rng.choice(extras)))
    if rng.random() < 0.3:
        lattice, _ = random_stable_sublattice(lattice, rng.randrange(2**30), 64)
    return lattice


def _trial_prime_support(rng: random.Random) -> None:
    descriptor = rng.choice(_CORPUS)
    group = build_group(descriptor)
    basis = relation_lattice(group).basis
    if not basis:
        return
    coeffs = [rng.randint(-1, 1) for _ in basis]
    if not any(coeffs):
        coeffs[rng.randrange(len(coeffs))] = 1
    theta = _combine(group, basis, coeffs)
    lattice = _random_group_lattice(rng, group)
    value = dok_pairing(lattice, theta).value
    certificate = trivial_prime_certificate(group)
    for prime in sorted(certificate.primes):
        assert _ord_at(value, prime) == 0, (
            f"{descriptor}: certified prime {prime} divides constant {value}"
        )
    # Primes beyond the group order are always certified; anything not
    # dividing the group order must therefore be absent as well.
    for prime in _support_primes(value):
        if group.order % prime != 0:
            assert prime in certificate.primes and _ord_at(value, prime) == 0


def _ord_at(value: Fraction, p: int) -> int:
    order = 0
    numerator, denominator = value.numerator, value.denominator
    while numerator % p == 0:
        numerator //= p
        order += 1
    while denominator % p == 0:
        denominator //= p
        order -= 1
    return order


def _support_primes(value: Fraction) -> List[int]:
    primes = []
    for source in (abs(value.numerator), value.denominator):
        n = source
        d = 2
        while d * d <= n:
            if n % d == 0:
                primes.append(d)
                while n % d == 0:
                    n //= d
            d += 1
        if n > 1:
            primes.append(n)
    return sorted(set(primes))


def _trial_power_law(rng: random.Random) -> None:
    p = rng.choice((3, 5, 7))
    theta = _scaled_standard(p, rng.choice((-2, -1, 1, 2, 3)))
    lattice = _random_d2p_lattice(rng, p, max_rank=6)
    value = dok_pairing(lattice, theta).value
    assert _is_power_of(value, p), f"constant {value} is not a power of {p}"


def _is_power_of(value: Fraction, p: int) -> bool:
    if value <= 0:
        return False
    for source in (value.numerator, value.denominator):
        while source % p == 0:
            source //= p
        if source != 1:
            return False
    return True


def _trial_regconstindex(rng: random.Random) -> None:
    p = rng.choice((3, 5))
    lattice = _random_d2p_lattice(rng, p, max_rank=6)
    value = I_invariant(lattice, standard_relation(p))
    m_triv, m_sign, m_plane = rational_multiplicities_d2p(lattice)
    predicted = Fraction(p) ** (m_sign + m_plane - m_triv)
    assert value == predicted, (
        f"index-corrected invariant {value} != p^({m_sign}+{m_plane}-{m_triv})"
    )


def _trial_genus_stability(rng: random.Random) -> None:
    p = rng.choice((3, 5))
    theta = standard_relation(p)
    lattice = _random_d2p_lattice(rng, p, max_rank=5, sublattice=False)
    reference = dok_pairing(lattice, theta).value
    sampled = lattice
    for _ in range(8):
        candidate, index = random_stable_sublattice(
            lattice, rng.randrange(2**30), 400
        )
        if index % p != 0:
            sampled = candidate
            if index > 1:
                break
    value = dok_pairing(sampled, theta).value
    assert value == reference, (
        f"sublattice of index coprime to {p} moved the constant "
        f"{reference} -> {value}"
    )


_SUITES: Dict[str, Callable[[random.Random], None]] = {
    "multiplicativity": _trial_multiplicativity,
    "restrictioninduction": _trial_restriction_induction,
    "fixedsupport": _trial_fixed_support,
    "primesupport": _trial_prime_support,
    "powerlaw": _trial_power_law,
    "regconstindex": _trial_regconstindex,
    "genusstability": _trial_genus_stability,
}

SUITE_NAMES: Tuple[str, ...] = tuple(_SUITES)

_MAX_NOTES = 5


def run_suite(name: str, trials: int = 200, seed: int = 0) -> SuiteReport:
    """Run one named suite and report pass/fail counts."""
    try:
        body = _SUITES[name]
    except KeyError:
        known = ", ".join(SUITE_NAMES)
        raise ValueError(f"unknown suite {name!r}; available: {known}") from None
    if trials < 1:
        raise ValueError("trials must be positive")
    failures = 0
    notes: List[str] = []
    for trial in range(trials):
        rng = random.Random(_trial_seed(name, seed, trial))
        try:
            body(rng)
        except AssertionError as exc:
            failures += 1
            if len(notes) < _MAX_NOTES:
                notes.append(f"trial {trial}: {exc}")
    return SuiteReport(
        name=name,
        trials=trials,
        failures=failures,
        seed=seed,
        failure_notes=tuple(notes),
    )


def run_all_suites(trials: int = 200, seed: int = 0) -> List[SuiteReport]:
    """Run every suite with the same master seed."""
    return [run_suite(name, trials=trials, seed=seed) for name in SUITE_NAMES]
