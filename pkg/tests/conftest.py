import pytest

CRITERIA = {
    1: "adjoint identities",
    2: "subspace-map verdict table",
    3: "lemma suite",
    4: "orthomonotone suite",
    5: "ridge/GP oracle equivalence",
    6: "representer verification",
    7: "l1 sparsity",
    8: "deep net blob rerun",
    9: "gradient checks",
    10: "determinism and round trip",
}

_outcomes: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(mark.args[0], []).append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            continue
        failed = [name for name, ok in runs if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d} {status}  {title}{detail}")
