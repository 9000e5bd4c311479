"""Fixture exporter: computes number-field invariants for dihedral fields and
emits fixture JSON files consumable by the ``artifact`` ledger.

Given the defining polynomial of a totally real cubic field (with S3 Galois
closure) or of a quintic field (with D10 closure that is the Hilbert class
field of an imaginary quadratic field), the exporter computes class numbers,
fundamental units, regulators, and — where requested — S-unit lattices with
their Galois action, entirely in exact arithmetic plus certified
high-precision numerics.  Results are written as fixture JSON files that are
self-validated against the ``artifact`` package's loader and audit battery
before the exporter reports success.
"""

__version__ = "0.1.0"
