import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from ringlattice.linalg import Matrix  # noqa: E402
from ringlattice.rings import Domain  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_matrix(rng, N, K, domain):
    domain = Domain(domain) if isinstance(domain, str) else domain
    d = np.zeros((N, K, 4))
    d[..., :domain.dim] = rng.standard_normal((N, K, domain.dim))
    return Matrix(d, domain)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
