import random

import numpy as np
import pytest

from conftest import random_model
from translitcost.align import align
from translitcost.ingestion import Lexicon
from translitcost.matching import LexiconIndex, _Query, detect_best, rank_of, score_all
from translitcost.model import ContractError, TransliterationModel


def naive_sorted(model, lexicon, word):
    order = lexicon.index
    return sorted(((align(model, word, w).total_cost, order[w], w) for w in lexicon.words))


def random_lexicon(rng, alphabet, n, min_len=1, max_len=7):
    words = set()
    while len(words) < n:
        words.add("".join(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))))
    words = sorted(words)
    rng.shuffle(words)
    return Lexicon(words)


@pytest.mark.parametrize("seed", range(3))
def test_detect_best_equals_full_scan(seed):
    rng = random.Random(seed)
    m = random_model(rng, "abc", "xyzw", fill=0.05, low=0.05)
    lex = random_lexicon(rng, "xyzw", 1000)
    index = LexiconIndex(lex, m.lmax)
    for _ in range(4):
        word = "".join(rng.choice("abc") for _ in range(rng.randint(1, 6)))
        naive = naive_sorted(m, lex, word)
        for k in (1, 7, 50):
            got = detect_best(m, index, word, k)
            assert [w for w, _ in got] == [w for _, _, w in naive[:k]]
            assert [c for _, c in got] == [c for c, _, _ in naive[:k]]
        full = score_all(m, index, word)
        assert [w for w, _ in full] == [w for _, _, w in naive]


def test_pruning_never_drops_a_reachable_word():
    # multi-character source pieces let alignments skip DP rows entirely;
    # pruned runs must still keep every word whose cost is under the threshold
    rng = random.Random(7)
    m = random_model(rng, "ab", "xy", fill=0.15, low=0.02)
    lex = random_lexicon(rng, "xy", 400, 1, 8)
    index = LexiconIndex(lex, m.lmax)
    for _ in range(20):
        word = "".join(rng.choice("ab") for _ in range(rng.randint(2, 8)))
        query = _Query(m, index, word)
        for group in index.groups:
            ids, costs = query.run_group(group)
            full = dict(zip(ids.tolist(), costs.tolist()))
            for threshold in np.quantile(costs, [0.05, 0.3, 0.7]):
                kept_ids, kept_costs = query.run_group(group, threshold)
                kept = dict(zip(kept_ids.tolist(), kept_costs.tolist()))
                for wid, c in full.items():
                    if c <= threshold:
                        assert kept.get(wid) == c


def test_rank_of_matches_detect_best_position():
    rng = random.Random(3)
    m = random_model(rng, "abc", "xyz", fill=0.05, low=0.1)
    lex = random_lexicon(rng, "xyz", 300)
    for _ in range(10):
        word = "".join(rng.choice("abc") for _ in range(rng.randint(1, 5)))
        ranking = [w for w, _ in detect_best(m, lex, word, len(lex))]
        for gold in rng.sample(lex.words, 5):
            assert rank_of(m, lex, word, gold) == ranking.index(gold) + 1


def test_hand_set_costs_rank():
    m = TransliterationModel(costs={("q", "x"): 0.5, ("q", "y"): 1.0})
    lex = Lexicon(["z", "y", "x"])
    assert [c for _, c in detect_best(m, lex, "q", 3)] == [0.5, 1.0, 2.0]
    assert rank_of(m, lex, "q", "y") == 2
    assert rank_of(m, lex, "q", "x") == 1
    assert rank_of(m, lex, "q", "w") is None


def test_ties_follow_lexicon_order():
    lex = Lexicon(["yy", "xx", "zz"])
    got = detect_best(TransliterationModel(), lex, "ab", 3)
    assert [w for w, _ in got] == ["yy", "xx", "zz"]
    assert rank_of(TransliterationModel(), lex, "ab", "zz") == 3


def test_query_itself_under_identity():
    m = TransliterationModel(costs={(c, c): 0.01 for c in "obama"})
    got = detect_best(m, Lexicon(["obama"]), "obama", 1)
    assert got[0][0] == "obama"
    assert got[0][1] == pytest.approx(0.05)


def test_k_beyond_lexicon_returns_everything():
    lex = Lexicon(["abc", "a", "ab"])
    got = detect_best(TransliterationModel(), lex, "a", 10)
    assert [w for w, _ in got] == ["a", "ab", "abc"]


def test_errors():
    with pytest.raises(ValueError):
        detect_best(TransliterationModel(), Lexicon([]), "a")
    with pytest.raises(ContractError):
        detect_best(TransliterationModel(), Lexicon(["a"]), "a", 0)
    with pytest.raises(ContractError):
        detect_best(TransliterationModel(lmax=2), LexiconIndex(Lexicon(["a"]), 3), "a")


def test_cipher_gold_ranks_first(cipher, cipher_corpus, cipher_model):
    test = cipher_corpus.test[:30]
    rng = random.Random(0)
    fillers = {"".join(rng.choice(cipher.target_alphabet) for _ in range(rng.randint(4, 10))) for _ in range(2000)}
    lex = Lexicon(sorted(fillers | {t for _, t in test}))
    index = LexiconIndex(lex, cipher_model.lmax)
    for s, t in test:
        assert detect_best(cipher_model, index, s, 1)[0][0] == t
        assert rank_of(cipher_model, index, s, t) == 1
