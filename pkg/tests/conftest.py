import itertools
import random

import pytest

from translitcost import synthetic as sy
from translitcost.ingestion import clean_corpus, split_corpus
from translitcost.model import TransliterationModel
from translitcost.training import TrainConfig, train


def all_pieces(alphabet, lmax):
    """Every string over `alphabet` of length 0..lmax."""
    out = []
    for n in range(lmax + 1):
        out.extend("".join(p) for p in itertools.product(alphabet, repeat=n))
    return out


def random_model(rng, src_alpha, tgt_alpha, lmax=3, fill=0.3, low=0.0):
    """A model storing a random subset of all piece pairs.

    Each stored cost is drawn from ``(low, 1] * (len + len)``, so it never
    exceeds the default.
    """
    costs = {}
    for sp in all_pieces(src_alpha, lmax):
        for tp in all_pieces(tgt_alpha, lmax):
            if not sp and not tp:
                continue
            if rng.random() < fill:
                default = len(sp) + len(tp)
                costs[(sp, tp)] = default * (low + (1.0 - low) * (1.0 - rng.random()))
    return TransliterationModel("src", "tgt", lmax, 1, costs, set(src_alpha), set(tgt_alpha))


def enumerate_segmentations(s, t, lmax):
    """Yield every segmentation of (s, t) as a list of piece pairs."""
    if not s and not t:
        yield []
        return
    for a in range(0, min(lmax, len(s)) + 1):
        for b in range(0, min(lmax, len(t)) + 1):
            if a == 0 and b == 0:
                continue
            for rest in enumerate_segmentations(s[a:], t[b:], lmax):
                yield [(s[:a], t[:b])] + rest


def brute_force_cost(model, s, t):
    """Minimum over all segmentations of the right-folded piece-cost sum."""
    best = float("inf")
    for seg in enumerate_segmentations(s, t, model.lmax):
        total = 0.0
        for pair in reversed(seg):
            total = model.cost_of(pair) + total
        best = min(best, total)
    return best


@pytest.fixture(scope="session")
def cipher():
    return sy.make_cipher(0)


@pytest.fixture(scope="session")
def cipher_corpus(cipher):
    """5,000 cipher name pairs split 80/10/10."""
    names = sy.make_names(5000, seed=1)
    return split_corpus(clean_corpus(sy.cipher_pairs(cipher, names)), seed=42)


@pytest.fixture(scope="session")
def cipher_training(cipher_corpus):
    return train(cipher_corpus, TrainConfig(rounds=10))


@pytest.fixture(scope="session")
def cipher_model(cipher_training):
    return cipher_training[0]


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
