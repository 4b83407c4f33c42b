import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record ``(number, part, ok, detail)`` for the acceptance summary."""
    store = request.config.stash.setdefault(_RESULTS, {})

    def record(k, ok, detail, part="main"):
        store.setdefault(k, {})[part] = (bool(ok), detail)
        print(f"criterion {k} [{part}]: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(store):
        parts = store[k]
        ok = all(p[0] for p in parts.values())
        detail = "; ".join(p[1] for p in parts.values())
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
