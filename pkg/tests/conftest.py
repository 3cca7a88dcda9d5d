import numpy as np
import pytest

from tucker_rpcd import DenseTensor


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def t8():
    """2x2x2 tensor holding 1..8 in linearization order."""
    return DenseTensor.from_flat((2, 2, 2), np.arange(1.0, 9.0))


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props and rep.when == "call":
                lines.append((props["criterion"], "PASS" if rep.passed else "FAIL", props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status, detail in sorted(lines, key=lambda t: int(t[0].split()[0])):
            terminalreporter.write_line(f"{status}  criterion {name}  {detail}".rstrip())
