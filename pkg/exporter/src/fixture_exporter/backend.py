"""Backend availability probe.

The exporter drives a computer-algebra backend assembled from sympy (exact
polynomial arithmetic, linear algebra over Q, Hermite normal forms), mpmath
(arbitrary-precision numerics), and numpy (bulk integer grids for element
search and Dirichlet-coefficient sieves).  ``require_backend`` verifies all
three are importable and returns their versions; it raises
``BackendUnavailable`` otherwise so callers can distinguish an environment
problem from a computation failure.
"""

from __future__ import annotations

import importlib
import importlib.util

from .errors import BackendUnavailable

REQUIRED_MODULES = ("sympy", "mpmath", "numpy")


def require_backend() -> dict[str, str]:
    """Check that every backend library is importable.

    Returns a ``{module: version}`` mapping on success and raises
    ``BackendUnavailable`` naming the missing modules otherwise.
    """
    missing = [name for name in REQUIRED_MODULES
               if importlib.util.find_spec(name) is None]
    if missing:
        raise BackendUnavailable(
            "computer-algebra backend unavailable: missing "
            + ", ".join(sorted(missing))
        )
    versions: dict[str, str] = {}
    for name in REQUIRED_MODULES:
        module = importlib.import_module(name)
        versions[name] = getattr(module, "__version__", "unknown")
    return versions
