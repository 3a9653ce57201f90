import hashlib
import json

import pytest

from translitcost import synthetic as sy
from translitcost.cli import main
from translitcost.model import deserialize
from translitcost.semantics import EmbeddingTable, save_embeddings


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, cipher):
    d = tmp_path_factory.mktemp("cli")
    names = sy.make_names(600, seed=21)
    lines = [f"{n.capitalize()}\t{cipher.encode(n)}" for n in names]
    lines.insert(3, "bad line without tab")
    lines.append(lines[0])
    (d / "pairs.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return d


@pytest.fixture(scope="module")
def trained(workdir):
    model = workdir / "m.model"
    assert main(["train", "--pairs", str(workdir / "pairs.tsv"), "--rounds", "4", "--out", str(model)]) == 0
    return model


def test_train_writes_model_and_stats(trained):
    assert deserialize(trained).rounds_trained >= 1
    stats = trained.with_name("m.model.stats.csv").read_text().splitlines()
    assert stats[0] == "round,mean_cost,dirtiness,distinct_pairs"
    assert len(stats) >= 2


def test_train_is_byte_deterministic(workdir, trained, tmp_path):
    again = tmp_path / "again.model"
    assert main(["train", "--pairs", str(workdir / "pairs.tsv"), "--rounds", "4", "--out", str(again)]) == 0
    assert digest(again) == digest(trained)
    assert digest(tmp_path / "again.model.stats.csv") == digest(trained.with_name("m.model.stats.csv"))


def test_transliterate_k100(trained, tmp_path, capsys):
    out = tmp_path / "c.tsv"
    assert main(["transliterate", "--model", str(trained), "--word", "obama", "--k", "100", "--out", str(out)]) == 0
    rows = [line.split("\t") for line in out.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 100
    assert [int(r[0]) for r in rows] == list(range(1, 101))
    costs = [float(r[2]) for r in rows]
    assert costs == sorted(costs)
    assert main(["transliterate", "--model", str(trained), "--word", "obama", "--k", "3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_missing_model_is_usage_error(capsys):
    assert main(["transliterate", "--word", "obama"]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err and "--model" in err


@pytest.mark.parametrize("argv", [["frobnicate"], ["train", "--bogus"], [], ["evaluate", "--model", "m", "--test", "t", "--k", "0"]])
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "usage:" in capsys.readouterr().err


def test_data_errors_exit_2(tmp_path, capsys):
    assert main(["transliterate", "--model", str(tmp_path / "nope"), "--word", "x"]) == 2
    bad = tmp_path / "bad.model"
    bad.write_text("#not-a-model\n", encoding="utf-8")
    assert main(["transliterate", "--model", str(bad), "--word", "x"]) == 2
    assert "error" in capsys.readouterr().err


def test_clean_and_split(workdir, tmp_path):
    out = tmp_path / "clean.tsv"
    assert main(["clean", "--pairs", str(workdir / "pairs.tsv"), "--out", str(out), "--split-dir", str(tmp_path / "s")]) == 0
    pairs = out.read_text(encoding="utf-8").splitlines()
    assert len(pairs) == 600  # one malformed line and one duplicate dropped
    assert pairs[0] == pairs[0].lower()
    sizes = [len((tmp_path / "s" / f"{t}.tsv").read_text(encoding="utf-8").splitlines()) for t in ("train", "tune", "test")]
    assert sizes == [480, 60, 60]


def test_evaluate_and_config_precedence(workdir, trained, tmp_path):
    test = tmp_path / "test.tsv"
    test.write_text("".join(line + "\n" for line in (workdir / "pairs.tsv").read_text(encoding="utf-8").lower().splitlines()[:10] if "\t" in line), encoding="utf-8")
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"evaluate": {"k": [1, 5], "lang": "CF", "model": str(trained)}}), encoding="utf-8")
    out = tmp_path / "r.csv"
    assert main(["--config", str(conf), "evaluate", "--test", str(test), "--out", str(out)]) == 0
    head, row = out.read_text().splitlines()
    assert head == "direction,lang,model,n,top_1,top_5,levenshtein_1"
    assert row.split(",")[1] == "CF"
    # a flag beats the config file
    assert main(["--config", str(conf), "evaluate", "--test", str(test), "--out", str(out), "--k", "1,20,100"]) == 0
    assert out.read_text().splitlines()[0] == "direction,lang,model,n,top_1,top_20,top_100,levenshtein_1"


def test_match_pivot_heatmap(trained, tmp_path, cipher):
    lex = tmp_path / "lex.txt"
    words = [cipher.encode(n) for n in sy.make_names(200, seed=99)]
    lex.write_text("\n".join(words) + "\n", encoding="utf-8")
    out = tmp_path / "m.tsv"
    query = sy.make_names(200, seed=99)[17]
    assert main(["match", "--model", str(trained), "--lexicon", str(lex), "--word", query, "--k", "3", "--out", str(out)]) == 0
    rows = out.read_text(encoding="utf-8").splitlines()
    assert len(rows) == 3 and rows[0].split("\t")[1] == words[17]

    assert main(["pivot", "--model1", str(trained), "--model2", str(trained), "--word", "oba", "--k", "2", "--beam", "3", "--out", str(out)]) == 0
    assert len(out.read_text(encoding="utf-8").splitlines()) == 2

    heat = tmp_path / "h.csv"
    assert main(["heatmap", "--model", str(trained), "--out", str(heat), "--chars-src", "ab", "--chars-tgt", cipher.char_map["a"] + cipher.char_map["b"]]) == 0
    lines = heat.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3 and all(len(line.split(",")) == 3 for line in lines)


def _write_world(d, cipher):
    setup = sy.make_bilingual_setup(cipher, n_words=300, n_planted=30, n_false=10, seed=4)
    (d / "ls.txt").write_text("\n".join(setup.words_src) + "\n", encoding="utf-8")
    (d / "lt.txt").write_text("\n".join(setup.words_tgt) + "\n", encoding="utf-8")
    save_embeddings(EmbeddingTable.from_dict(setup.vectors_src), d / "es.txt")
    save_embeddings(EmbeddingTable.from_dict(setup.vectors_tgt), d / "et.txt")
    (d / "dict.tsv").write_text("".join(f"{a}\t{b}\n" for a, b in sorted(setup.dictionary)), encoding="utf-8")
    (d / "gt.tsv").write_text("".join(f"{a}\t{b}\n" for a, b in setup.planted), encoding="utf-8")
    (d / "gf.tsv").write_text("".join(f"{a}\t{b}\n" for a, b in setup.false_friends), encoding="utf-8")


def test_friends_is_deterministic(trained, tmp_path, cipher, capsys):
    _write_world(tmp_path, cipher)
    digests = []
    for run in range(2):
        out = tmp_path / f"f{run}.tsv"
        argv = ["friends", "--model", str(trained), "--src-lexicon", str(tmp_path / "ls.txt"),
                "--tgt-lexicon", str(tmp_path / "lt.txt"), "--src-emb", str(tmp_path / "es.txt"),
                "--tgt-emb", str(tmp_path / "et.txt"), "--dictionary", str(tmp_path / "dict.tsv"),
                "--out", str(out), "--summary", str(tmp_path / f"s{run}.csv"),
                "--counts", str(tmp_path / f"c{run}.csv"), "--next-cohort", "500", "--neighbors", "5",
                "--gold-true", str(tmp_path / "gt.tsv"), "--gold-false", str(tmp_path / "gf.tsv")]
        assert main(argv) == 0
        digests.append([digest(tmp_path / f"{p}{run}.{e}") for p, e in (("f", "tsv"), ("s", "csv"), ("c", "csv"))])
    assert digests[0] == digests[1]
    head = (tmp_path / "f0.tsv").read_text(encoding="utf-8").splitlines()[0]
    assert head == "w_src\tw_tgt\tlex_cost\thas_translation\tlink_count\tclass"
    assert "f1\t" in capsys.readouterr().err
