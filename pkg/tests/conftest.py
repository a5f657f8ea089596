import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import pytest

from stele.corpus import Post
from stele.manifest import load_manifest
from stele.pipeline import run_pipeline

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

T0 = datetime(2025, 1, 15, 12, 0, 0, tzinfo=timezone.utc)


def make_post(id="p1", author_tag="a1", text="farewell", created_at=T0,
              reposts=0, comments=0, likes=0, is_original=True) -> Post:
    return Post(id=id, author_tag=author_tag, text=text, created_at=created_at,
                reposts=reposts, comments=comments, likes=likes, is_original=is_original)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def sample_manifest_path() -> Path:
    return DATA / "manifest.yaml"


@pytest.fixture(scope="session")
def built_pipeline(tmp_path_factory, sample_manifest_path):
    """One shared full build of the shipped sample corpus."""
    out = tmp_path_factory.mktemp("pipeline-out")
    manifest = replace(load_manifest(sample_manifest_path), out_dir=out)
    result = run_pipeline(manifest)
    return manifest, result


def pytest_runtest_logreport(report):
    # one operator-facing pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        name = report.nodeid.split("::")[-1]
        print(f"ACCEPTANCE {status}: {name}", file=sys.stderr)
