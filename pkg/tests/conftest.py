import datetime as dt
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the test-side oracles

from eventpol.corpus import TweetRecord
from eventpol.valence import ValenceScorer, default_lexicon

FIXTURE_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def scorer(lexicon):
    return ValenceScorer(lexicon)


@pytest.fixture
def rng():
    return np.random.default_rng(20200301)


def make_records(per_day_counts, group="JP", start=dt.date(2020, 3, 1), text="fine day", label=None):
    """Synthetic corpus: per_day_counts[i] records on start+i days (0 skips the day)."""
    records = []
    k = 0
    for offset, count in enumerate(per_day_counts):
        date = start + dt.timedelta(days=offset)
        for _ in range(count):
            records.append(TweetRecord(id=f"{group}-{k:06d}", date=date, text=text, group=group, label=label))
            k += 1
    return records
