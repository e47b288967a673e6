import contextlib

_CRITERIA: list[tuple[str, str, bool]] = []


@contextlib.contextmanager
def criterion(ident: str, name: str):
    """Record an acceptance criterion outcome for the terminal summary."""
    try:
        yield
    except BaseException:
        _CRITERIA.append((ident, name, False))
        raise
    _CRITERIA.append((ident, name, True))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for ident, name, ok in sorted(_CRITERIA):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"  [{status}] criterion {ident}: {name}")
