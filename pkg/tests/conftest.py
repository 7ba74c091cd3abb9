import pytest

_criterion_lines: list[str] = []


def acceptance_line(msg: str) -> None:
    """Record one pass/fail line per acceptance criterion.

    The line is printed immediately (visible under -s and in the captured
    output of failing tests) and replayed in a dedicated section at the end
    of the run, where pytest's capture cannot swallow it.
    """
    _criterion_lines.append(msg)
    print(msg, flush=True)


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.line(line)


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("artifacts")
