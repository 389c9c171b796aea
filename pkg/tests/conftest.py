import mpmath as mp
import pytest

# criterion number -> list of (part, passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion: int, part: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{name}: {'ok' if p else 'FAILED'} ({d})" for name, p, d in parts)
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(autouse=True)
def _reset_precision():
    """Tests must not leak a changed global precision into each other."""
    prec = mp.mp.prec
    yield
    mp.mp.prec = prec
