import sys

import pytest

from singleswitch.lab import default_language_model


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Surface the acceptance verdict lines past output capture."""
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lm():
    """Bundled-corpus language model, trained once for the whole run."""
    return default_language_model()


@pytest.fixture(scope="session")
def tiny_lm():
    """Small deterministic model for tests that need full control."""
    from singleswitch.lm import train_language_model
    corpus = ("the cat sat on the mat. the dog sat on the rug. "
              "they saw the cat. there was a dog. ") * 20
    return train_language_model(corpus, char_order=3)
