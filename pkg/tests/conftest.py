from acceptance_log import RESULTS


def _sort_key(key):
    head = key.split(".")[0]
    return (int(head) if head.isdigit() else 99, key)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=_sort_key):
        status, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {status} | {detail}")
