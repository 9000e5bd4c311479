"""Exact computation of Brauer relations and regulator constants.

The package constructs small finite groups, finds the lattice of Brauer
relations in their Burnside rings, evaluates regulator constants of
integral group lattices by exact arithmetic, tabulates the dihedral
lattice zoo, and audits class-number / unit-index identities of bundled
number-field fixtures.
"""

from __future__ import annotations

__version__ = "0.1.0"
