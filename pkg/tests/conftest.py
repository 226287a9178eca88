from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from decaykit.words import Word

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRESENTATIONS = Path(__file__).resolve().parents[1] / "src" / "decaykit" / "data" / "presentations"


def words(alphabet, max_len=8, max_exp=3):
    letter = st.tuples(st.sampled_from(tuple(alphabet)), st.integers(-max_exp, max_exp).filter(bool))
    return st.lists(letter, max_size=max_len).map(Word)


@pytest.fixture
def presentations_dir() -> Path:
    return PRESENTATIONS
