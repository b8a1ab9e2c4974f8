def pytest_terminal_summary(terminalreporter):
    """Replay the acceptance verdict lines after the test summary.

    The acceptance tests print one pass/fail line per criterion as they run;
    output capture hides those in default runs, so they are replayed here.
    """
    import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
