import random

import pytest

from translitcost.ingestion import LoadError
from translitcost.model import (
    MAGIC,
    ContractError,
    ObservationTable,
    TransliterationModel,
    cost_of,
    deserialize,
    serialize,
)


def test_fresh_costs_are_total_length():
    m = TransliterationModel()
    assert cost_of(m, ("a", "b")) == 2
    assert cost_of(m, ("ab", "")) == 2
    assert cost_of(m, ("", "xyz")) == 3


def test_stored_cost_lookup():
    m = TransliterationModel(costs={("sh", "ш"): 0.3})
    assert cost_of(m, ("sh", "ш")) == 0.3
    assert cost_of(m, ("s", "ш")) == 2


@pytest.mark.parametrize("pair", [("", ""), ("abcd", "x"), ("a", "wxyz")])
def test_invalid_pairs_rejected(pair):
    with pytest.raises(ContractError):
        cost_of(TransliterationModel(), pair)


@pytest.mark.parametrize("cost", [0.0, -1.0, 2.5])
def test_stored_cost_must_lie_in_range(cost):
    with pytest.raises(ContractError):
        TransliterationModel(costs={("a", "b"): cost})


def test_models_are_directional():
    fwd = TransliterationModel("en", "ru", costs={("a", "а"): 0.1})
    back = TransliterationModel("ru", "en", costs={("а", "a"): 0.1})
    assert fwd != back
    assert cost_of(fwd, ("а", "a")) == 2


def test_observation_table_marginals():
    obs = ObservationTable()
    obs.add(("a", "x"))
    obs.add(("a", "y"), 2)
    obs.add(("b", "x"), 3)
    assert obs.totals["a"] == 3 and obs.totals["b"] == 3
    assert obs.grand_total == sum(obs.counts.values()) == 6
    other = ObservationTable({("a", "x"): 4})
    obs.merge(other)
    assert obs[("a", "x")] == 5
    assert obs.grand_total == 10
    with pytest.raises(ValueError):
        obs.add(("a", "x"), -1)


def test_round_trip_empty(tmp_path):
    m = TransliterationModel("en", "ru")
    serialize(m, tmp_path / "m")
    assert deserialize(tmp_path / "m") == m


def test_round_trip_10k_random_entries(tmp_path):
    rng = random.Random(5)
    src_alpha = "abcdefghij#"
    tgt_alpha = "абвгдежзий"
    costs = {}
    while len(costs) < 10000:
        sp = "".join(rng.choice(src_alpha) for _ in range(rng.randint(0, 3)))
        tp = "".join(rng.choice(tgt_alpha) for _ in range(rng.randint(0 if sp else 1, 3)))
        costs[(sp, tp)] = (len(sp) + len(tp)) * (1.0 - rng.random())
    m = TransliterationModel("xx", "yy", 3, 7, costs, set(src_alpha), set(tgt_alpha))
    serialize(m, tmp_path / "m")
    back = deserialize(tmp_path / "m")
    assert back == m
    # bit-identical costs, not just close ones
    assert all(back.costs[p] == c for p, c in costs.items())


def test_file_layout(tmp_path):
    m = TransliterationModel("en", "ru", 3, 2, {("", "ь"): 0.5, ("sh", "ш"): 0.123456789012})
    serialize(m, tmp_path / "m")
    lines = (tmp_path / "m").read_text(encoding="utf-8").splitlines()
    assert lines[:5] == [MAGIC, "#src en", "#tgt ru", "#lmax 3", "#rounds 2"]
    assert "\tь\t0.5" in lines
    record = next(line for line in lines if line.startswith("sh\t"))
    digits = record.split("\t")[2].replace(".", "").lstrip("0")
    assert len(digits) >= 9


def test_wrong_magic(tmp_path):
    path = tmp_path / "m"
    path.write_text("#translit-model v2\n#src en\n", encoding="utf-8")
    with pytest.raises(LoadError) as err:
        deserialize(path)
    assert err.value.line_no == 1


@pytest.mark.parametrize(
    "record, why",
    [
        ("a\tb", "field count"),
        ("a\tb\tcheap", "bad cost"),
        ("a\tb\t3.5", "above default"),
        ("abcd\tb\t1.0", "piece too long"),
        ("\t\t1.0", "both empty"),
    ],
)
def test_malformed_record_reports_line(tmp_path, record, why):
    path = tmp_path / "m"
    path.write_text(f"{MAGIC}\n#src en\n#tgt ru\n#lmax 3\n#rounds 1\nx\ty\t1.0\n{record}\n", encoding="utf-8")
    with pytest.raises(LoadError) as err:
        deserialize(path)
    assert err.value.line_no == 7, why
