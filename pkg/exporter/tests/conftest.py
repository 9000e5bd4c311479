"""Shared fixtures: run the three reference exports once per session."""

from __future__ import annotations

from pathlib import Path

import pytest

import artifact
from fixture_exporter.emit import export_fixture
from fixture_exporter.jobs import ExportJob

BUNDLE_DIR = Path(artifact.__file__).parent / "fixtures"

REFERENCE_JOBS = {
    "s3_arch": ("x^3-34*x-6", ()),
    "s3_s2": ("x^3-34*x-6", (2,)),
    "d10": ("x^5-2*x^4+x^3+x^2-x+1", ()),
}


@pytest.fixture(scope="session")
def export_dir(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("exports")


@pytest.fixture(scope="session")
def exported(export_dir) -> dict:
    """ExportResult for each reference job, computed once per session."""
    results = {}
    for key, (poly, primes) in REFERENCE_JOBS.items():
        job = ExportJob.from_spec(poly, s_primes=primes, out_dir=export_dir)
        results[key] = export_fixture(job)
    return results
