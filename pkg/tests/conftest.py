import pytest

_verdicts: dict[int, tuple[str, str, str]] = {}


class Verdict:
    """Records one PASS/FAIL line per acceptance criterion for the end-of-run summary."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title

    def check(self, ok: bool, detail: str) -> None:
        _verdicts[self.number] = ("PASS" if ok else "FAIL", self.title, detail)
        print(f"criterion {self.number} {'PASS' if ok else 'FAIL'}: {self.title}: {detail}")
        assert ok, detail


@pytest.fixture
def verdict(request):
    marker = request.node.get_closest_marker("criterion")
    v = Verdict(*marker.args)
    yield v
    if v.number not in _verdicts:
        _verdicts[v.number] = ("FAIL", v.title, "raised before reaching a verdict")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        status, title, detail = _verdicts[n]
        terminalreporter.write_line(f"[{status}] {n}. {title}: {detail}")
