from __future__ import annotations

import pytest

from readgrade.textstats import TextStats, default_word_lists


@pytest.fixture(scope="session")
def lists():
    return default_word_lists()


def make_stats(S=1, W=6, syll=6, chars=17, letters=17, complex_=0, easy=None, hard=None, d=0, u=0.0) -> TextStats:
    """Hand-built stats; easy/hard default to W/complex so the invariants hold."""
    hard = complex_ if hard is None else hard
    easy = W - hard if easy is None else easy
    return TextStats(
        sentence_count=S,
        word_count=W,
        syllable_count=syll,
        character_count=chars,
        letter_count=letters,
        complex_word_count=complex_,
        easy_word_count=easy,
        hard_word_count=hard,
        dc_difficult_count=d,
        dc_difficult_pct=100.0 * d / W if W else 0.0,
        spache_unfamiliar_pct=u,
    )


@pytest.fixture
def cat_stats():
    return make_stats()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
