from __future__ import annotations

import pytest

from gamemine.featurize import WindowConfig, featurize_ct, featurize_rps
from gamemine.synthetic import CtResponderRule, RpsSubjectRule, synth_ct, synth_rps


@pytest.fixture(scope="session")
def reference_shaped_episodes():
    """10 subjects x 2 threads x 30 turns, shift rule at adherence 0.9."""
    return synth_rps(10, 2, 30, RpsSubjectRule(adherence=0.9, seed=7))


@pytest.fixture(scope="session")
def reference_shaped_rps(reference_shaped_episodes):
    return featurize_rps(reference_shaped_episodes, WindowConfig(3))


@pytest.fixture(scope="session")
def pure_shift_rps():
    return featurize_rps(synth_rps(10, 2, 30, RpsSubjectRule(adherence=1.0, seed=3)))


@pytest.fixture(scope="session")
def ct_5000():
    return featurize_ct(synth_ct(5000, CtResponderRule(adherence=0.9515, seed=11)))


@pytest.fixture(scope="session")
def shift_5400():
    """Shift rule at adherence 0.9, 100 subjects x 2 threads x 30 turns -> 5400 instances."""
    return featurize_rps(synth_rps(100, 2, 30, RpsSubjectRule(adherence=0.9, seed=21)))
