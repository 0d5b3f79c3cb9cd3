import time

import pytest

_KEY = "_pfgas_acceptance"


class Recorder:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def __init__(self, sink):
        self.sink = sink

    def __call__(self, number, title, ok, detail="", started=None, budget=None):
        elapsed = None if started is None else time.perf_counter() - started
        if budget is not None and elapsed is not None and elapsed > budget:
            ok = False
            detail = f"{detail}; runtime {elapsed:.1f}s over {budget}s budget"
        line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}"
        if detail:
            line += f": {detail}"
        if elapsed is not None:
            line += f" ({elapsed:.1f}s)"
        self.sink.append((number, line))
        print(line)
        return ok


@pytest.fixture
def acceptance(request):
    sink = getattr(request.config, _KEY, None)
    if sink is None:
        sink = []
        setattr(request.config, _KEY, sink)
    return Recorder(sink)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    sink = getattr(config, _KEY, None)
    if not sink:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(sink):
        terminalreporter.write_line(line)
