"""Export job specification and polynomial parsing.

An ``ExportJob`` names the defining polynomial of the base field (a monic
integer polynomial in ``x``), the finite rational primes to adjoin to the
Archimedean places of the S-set (empty for Archimedean-only jobs), and the
output directory for the fixture file.

Supported base fields:

* degree 3 — a totally real cubic whose Galois closure is an S3 sextic;
* degree 5 — a quintic whose Galois closure is a D10 decic (the Hilbert
  class field of an imaginary quadratic field).

Relative job specifications (defining the closure directly over its quadratic
subfield) are not supported; give the absolute polynomial of the cubic or
quintic subfield instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import sympy

from .errors import JobError

SUPPORTED_DEGREES = (3, 5)


def parse_polynomial(text: str) -> tuple[int, ...]:
    """Parse a monic integer polynomial in ``x`` into descending coefficients.

    Accepts caret or double-star powers (``x^3 - 34*x - 6`` and
    ``x**3 - 34*x - 6`` are equivalent) and implicit multiplication signs are
    optional (``34x`` works).  Returns the full coefficient tuple, descending,
    leading coefficient included: ``(1, 0, -34, -6)``.

    Raises ``JobError`` for anything that is not a monic univariate integer
    polynomial in ``x`` of degree at least 2.
    """
    if not isinstance(text, str) or not text.strip():
        raise JobError("empty polynomial specification")
    x = sympy.Symbol("x")
    try:
        expr = sympy.parse_expr(
            text.replace("^", "**"),
            local_dict={"x": x},
            transformations=sympy.parsing.sympy_parser.standard_transformations
            + (sympy.parsing.sympy_parser.implicit_multiplication_application,),
        )
    except Exception as exc:  # sympy raises a zoo of parse-time errors
        raise JobError(f"cannot parse polynomial {text!r}: {exc}") from exc
    if expr.free_symbols - {x}:
        extra = ", ".join(sorted(str(s) for s in expr.free_symbols - {x}))
        raise JobError(f"polynomial must be in x only; found symbol(s) {extra}")
    try:
        poly = sympy.Poly(expr, x)
    except sympy.PolynomialError as exc:
        raise JobError(f"not a polynomial in x: {text!r}") from exc
    coeffs_raw = poly.all_coeffs()
    coeffs: list[int] = []
    for c in coeffs_raw:
        if not (sympy.sympify(c).is_integer):
            raise JobError(f"polynomial has a non-integer coefficient: {c}")
        coeffs.append(int(c))
    if len(coeffs) < 3:
        raise JobError(f"degree {len(coeffs) - 1} polynomial is not a field job")
    if coeffs[0] != 1:
        raise JobError(f"polynomial must be monic; leading coefficient is {coeffs[0]}")
    return tuple(coeffs)


def polynomial_text(coeffs: tuple[int, ...], star: bool = False) -> str:
    """Render descending coefficients back to a compact string.

    ``star=False`` gives the display form ``x^3 - 34x - 6``; ``star=True``
    gives the machine form ``x^3 - 34*x - 6``.
    """
    deg = len(coeffs) - 1
    parts: list[str] = []
    for i, c in enumerate(coeffs):
        k = deg - i
        if c == 0:
            continue
        if k == deg:
            # leading term of a monic polynomial
            head = f"x^{k}" if k > 1 else ("x" if k == 1 else str(c))
            parts.append(head)
            continue
        sign = " - " if c < 0 else " + "
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            xs = f"x^{k}" if k > 1 else "x"
            if mag == 1:
                body = xs
            else:
                body = f"{mag}*{xs}" if star else f"{mag}{xs}"
        parts.append(sign + body)
    return "".join(parts)


def polynomial_slug(coeffs: tuple[int, ...]) -> str:
    """Filename-safe slug of the polynomial: ``(1, 0, -34, -6)`` -> ``x3-34x-6``."""
    deg = len(coeffs) - 1
    parts: list[str] = []
    for i, c in enumerate(coeffs):
        k = deg - i
        if c == 0:
            continue
        if k == deg:
            parts.append(f"x{k}" if k > 1 else "x")
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif mag == 1:
            body = f"x{k}" if k > 1 else "x"
        else:
            body = f"{mag}x{k}" if k > 1 else f"{mag}x"
        parts.append(sign + body)
    slug = "".join(parts)
    return slug.lstrip("+")


@dataclass(frozen=True)
class ExportJob:
    """One export request: base-field polynomial, S-primes, output directory."""

    coefficients: tuple[int, ...]
    s_primes: tuple[int, ...] = ()
    out_dir: Path = field(default_factory=Path)

    @classmethod
    def from_spec(cls, poly: str, s_primes=(), out_dir=".") -> "ExportJob":
        """Build and validate a job from CLI-style inputs."""
        coeffs = parse_polynomial(poly)
        primes: list[int] = []
        for p in s_primes:
            try:
                p_int = int(p)
            except (TypeError, ValueError) as exc:
                raise JobError(f"S-prime {p!r} is not an integer") from exc
            if p_int != p:
                raise JobError(f"S-prime {p!r} is not an integer")
            if p_int < 2 or not sympy.isprime(p_int):
                raise JobError(f"S-prime {p_int} is not a rational prime")
            primes.append(p_int)
        if len(set(primes)) != len(primes):
            raise JobError("duplicate S-primes in job specification")
        job = cls(
            coefficients=coeffs,
            s_primes=tuple(sorted(primes)),
            out_dir=Path(out_dir),
        )
        job.validate()
        return job

    def validate(self) -> None:
        """Check the degenerate-job conditions that need no field computation."""
        degree = len(self.coefficients) - 1
        if degree not in SUPPORTED_DEGREES:
            raise JobError(
                f"degree {degree} is unsupported; supported degrees: "
                + ", ".join(map(str, SUPPORTED_DEGREES))
            )
        x = sympy.Symbol("x")
        poly = sympy.Poly(self.coefficients, x)
        factors = sympy.factor_list(poly)[1]
        if len(factors) != 1 or factors[0][1] != 1:
            raise JobError(
                "reducible polynomial does not define a field: "
                + polynomial_text(self.coefficients, star=True)
            )
        if degree == 5 and self.s_primes:
            raise JobError(
                "S-primes beyond the Archimedean places are not supported "
                "for degree-5 jobs"
            )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1
