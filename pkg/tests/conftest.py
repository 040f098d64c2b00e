import _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_criteria.RESULTS):
        status, title, secs = _criteria.RESULTS[n]
        terminalreporter.write_line(f"AC{n:<3} {status}  {title}  [{secs:.1f}s]")
