"""Semantic tests that separate true from false friends.

Embeddings of different languages are never compared directly. A candidate
pair passes the embedding test when enough known translations link the
nearest neighbours of its two words inside their own spaces.
"""

from __future__ import annotations

import csv
import heapq
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .ingestion import DEFAULT_NORM, Lexicon, LoadError, NormConfig, _read_lines, normalize_text
from .matching import LexiconIndex, _Query
from .model import TransliterationModel

logger = logging.getLogger(__name__)

TP, EP, B, N = "TP", "EP", "B", "N"
CLASSES = (TP, EP, B, N)
POLICIES = ("either", "both", "translation", "embedding")


class EmbeddingTable:
    """Word vectors of one language, stored as a dense matrix."""

    def __init__(self, words, matrix, language: str = "und"):
        matrix = np.asarray(matrix, dtype=np.float64)
        words = list(words)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must have one row per word")
        if len(set(words)) != len(words):
            raise ValueError("duplicate words in embedding table")
        self.language = language
        self.words = words
        self.matrix = matrix
        self.dim = matrix.shape[1]
        self.index = {w: i for i, w in enumerate(words)}
        # rank of each word in code point order, used to break distance ties
        order = sorted(range(len(words)), key=words.__getitem__)
        self._lex_rank = np.empty(len(words), dtype=np.int64)
        self._lex_rank[order] = np.arange(len(words))
        self._nn_cache: dict[tuple[str, int], list[str]] = {}

    @classmethod
    def from_dict(cls, vectors: dict, language: str = "und") -> "EmbeddingTable":
        words = sorted(vectors)
        matrix = np.array([vectors[w] for w in words], dtype=np.float64)
        return cls(words, matrix.reshape(len(words), -1), language)

    @property
    def vectors(self) -> dict[str, np.ndarray]:
        return {w: self.matrix[i] for i, w in enumerate(self.words)}

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)


def load_embeddings(path, language: str = "und", cfg: NormConfig = DEFAULT_NORM) -> EmbeddingTable:
    """Read the ``V D`` header + ``word v1 .. vD`` text format."""
    lines = _read_lines(path)
    try:
        _, header = next(lines)
    except StopIteration:
        raise LoadError(path, 1, "empty embedding file") from None
    try:
        n_words, dim = (int(x) for x in header.split())
    except ValueError:
        raise LoadError(path, 1, f"bad header {header!r}, expected 'V D'") from None
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    for line_no, line in lines:
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        if len(parts) != dim + 1:
            raise LoadError(path, line_no, f"expected {dim + 1} fields, got {len(parts)}")
        try:
            vec = [float(x) for x in parts[1:]]
        except ValueError:
            raise LoadError(path, line_no, "non-numeric vector component") from None
        word = normalize_text(parts[0], cfg)
        if not word or word in seen:
            continue
        seen.add(word)
        words.append(word)
        rows.append(vec)
    if len(rows) != n_words:
        logger.warning("%s: header announces %d words, found %d", path, n_words, len(rows))
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return EmbeddingTable(words, matrix, language)


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.words)} {table.dim}\n")
        for w, row in zip(table.words, table.matrix):
            fh.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")


class TranslationDict:
    """A set of known ``(source word, target word)`` translations."""

    def __init__(self, pairs=()):
        self.pairs: set[tuple[str, str]] = set(pairs)
        self.by_src: dict[str, set[str]] = {}
        for s, t in self.pairs:
            self.by_src.setdefault(s, set()).add(t)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


def load_dictionary(path, cfg: NormConfig = DEFAULT_NORM) -> TranslationDict:
    pairs = []
    for line_no, line in _read_lines(path):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise LoadError(path, line_no, f"expected 2 tab-separated fields, got {len(fields)}")
        s, t = normalize_text(fields[0], cfg), normalize_text(fields[1], cfg)
        if s and t:
            pairs.append((s, t))
    return TranslationDict(pairs)


def nearest_neighbors(table: EmbeddingTable, word: str, n: int = 300) -> list[str]:
    """The `n` words closest to `word` by Euclidean distance, itself excluded.

    Ties are ordered by the words themselves.
    """
    idx = table.index.get(word)
    if idx is None:
        raise KeyError(f"{word!r} not in {table.language} embeddings")
    if n <= 0:
        return []
    key = (word, n)
    cached = table._nn_cache.get(key)
    if cached is not None:
        return list(cached)
    diff = table.matrix - table.matrix[idx]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    order = np.lexsort((table._lex_rank, dist))
    out = [table.words[i] for i in order if i != idx][:n]
    table._nn_cache[key] = out
    return list(out)


class LinkTest(NamedTuple):
    passed: bool
    link_count: int


def embedding_test(
    w1: str,
    w2: str,
    e1: EmbeddingTable,
    e2: EmbeddingTable,
    dictionary: TranslationDict,
    n: int = 300,
    tau: int = 3,
) -> LinkTest:
    """Count dictionary translations between the neighbourhoods of `w1` and `w2`.

    A word missing from its table makes the test fail (count 0) and is
    logged as a warning.
    """
    if w1 not in e1 or w2 not in e2:
        logger.warning("embedding test skipped, missing word: %r/%r", w1, w2)
        return LinkTest(False, 0)
    if n <= 0:
        return LinkTest(False, 0)
    nn1 = nearest_neighbors(e1, w1, n)
    nn2 = set(nearest_neighbors(e2, w2, n))
    count = 0
    for a in nn1:
        partners = dictionary.by_src.get(a)
        if partners:
            count += len(partners & nn2)
    return LinkTest(count >= tau, count)


def classify(has_translation: bool, passes_embedding: bool) -> str:
    if has_translation:
        return B if passes_embedding else TP
    return EP if passes_embedding else N


@dataclass
class FriendRecord:
    w_src: str
    w_tgt: str
    lex_cost: float
    has_translation: bool
    passes_embedding: bool
    link_count: int = 0
    cohort: str = ""

    @property
    def cls(self) -> str:
        return classify(self.has_translation, self.passes_embedding)


@dataclass(frozen=True)
class FriendConfig:
    d_max: float = 2.0
    next_cohort: int = 10000
    min_len: int = 5
    n_neighbors: int = 300
    tau: int = 3


@dataclass
class CohortStats:
    size: int
    translation_fraction: float
    pruned_size: int
    pruned_translation_fraction: float
    median_link_count: float


@dataclass
class CohortSummary:
    cohort_a: CohortStats
    cohort_b: CohortStats

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cohort", "size", "translation_fraction", "pruned_size",
                         "pruned_translation_fraction", "median_link_count"])
        for name, st in (("A", self.cohort_a), ("B", self.cohort_b)):
            writer.writerow([name, st.size, repr(st.translation_fraction), st.pruned_size,
                             repr(st.pruned_translation_fraction), repr(st.median_link_count)])
        return buf.getvalue()


def _fraction(records) -> float:
    return sum(r.has_translation for r in records) / len(records) if records else 0.0


def cohort_stats(records: list[FriendRecord]) -> CohortStats:
    """Translation fraction before and after dropping records below the median link count."""
    if not records:
        return CohortStats(0, 0.0, 0, 0.0, 0.0)
    median = float(np.median([r.link_count for r in records]))
    kept = [r for r in records if r.link_count >= median]
    return CohortStats(len(records), _fraction(records), len(kept), _fraction(kept), median)


def lexical_cohorts(
    model: TransliterationModel,
    lex_src: Lexicon,
    lex_tgt: Lexicon,
    d_max: float = 2.0,
    next_cohort: int = 10000,
    min_len: int = 5,
):
    """Cross-lexicon pairs with cost <= `d_max`, and the `next_cohort` cheapest beyond.

    Both lists hold ``(cost, src_word, tgt_word)`` sorted by cost, then by
    lexicon order of the source and target words.
    """
    src_words = [(i, w) for i, w in enumerate(lex_src.words) if len(w) >= min_len]
    tgt_keep = [w for w in lex_tgt.words if len(w) >= min_len]
    if not src_words or not tgt_keep:
        return [], []
    tgt_lex = Lexicon(tgt_keep, lex_tgt.language)
    index = LexiconIndex(tgt_lex, model.lmax)
    close: list[tuple[float, int, int]] = []
    # max-heap of the cheapest pairs beyond d_max, as (-cost, -src, -tgt)
    nxt: list[tuple[float, int, int]] = []
    for si, word in src_words:
        query = _Query(model, index, word)
        threshold = d_max
        if next_cohort > 0:
            threshold = -nxt[0][0] if len(nxt) >= next_cohort else np.inf
            threshold = max(threshold, d_max)
        for group in index.groups:
            ids, costs = query.run_group(group, threshold)
            for ti, c in zip(ids.tolist(), costs.tolist()):
                if c <= d_max:
                    close.append((c, si, ti))
                elif next_cohort > 0:
                    item = (-c, -si, -ti)
                    if len(nxt) < next_cohort:
                        heapq.heappush(nxt, item)
                    elif item > nxt[0]:
                        heapq.heapreplace(nxt, item)
            if next_cohort > 0 and len(nxt) >= next_cohort:
                threshold = max(-nxt[0][0], d_max)
    close.sort()
    beyond = sorted((-c, -si, -ti) for c, si, ti in nxt)

    def as_words(rows):
        return [(c, lex_src.words[si], tgt_lex.words[ti]) for c, si, ti in rows]

    return as_words(close), as_words(beyond)


def scan_friends(
    model: TransliterationModel,
    lex_src: Lexicon,
    lex_tgt: Lexicon,
    dictionary: TranslationDict,
    e1: EmbeddingTable,
    e2: EmbeddingTable,
    cfg: FriendConfig = FriendConfig(),
) -> tuple[list[FriendRecord], CohortSummary]:
    """Classify lexically close cross-language pairs and summarize the two cohorts."""
    for name, res in (("model", model), ("source lexicon", lex_src), ("target lexicon", lex_tgt),
                      ("dictionary", dictionary), ("source embeddings", e1),
                      ("target embeddings", e2)):
        if res is None:
            raise ValueError(f"missing resource: {name}")
    close, beyond = lexical_cohorts(model, lex_src, lex_tgt, cfg.d_max, cfg.next_cohort, cfg.min_len)
    records: list[FriendRecord] = []
    for cohort, rows in (("A", close), ("B", beyond)):
        for cost, ws, wt in rows:
            test = embedding_test(ws, wt, e1, e2, dictionary, cfg.n_neighbors, cfg.tau)
            records.append(
                FriendRecord(ws, wt, cost, (ws, wt) in dictionary, test.passed, test.link_count, cohort)
            )
    summary = CohortSummary(
        cohort_stats([r for r in records if r.cohort == "A"]),
        cohort_stats([r for r in records if r.cohort == "B"]),
    )
    return records, summary


def records_tsv(records) -> str:
    out = ["w_src\tw_tgt\tlex_cost\thas_translation\tlink_count\tclass\n"]
    for r in records:
        out.append(f"{r.w_src}\t{r.w_tgt}\t{r.lex_cost!r}\t{int(r.has_translation)}\t{r.link_count}\t{r.cls}\n")
    return "".join(out)


@dataclass
class FriendCounts:
    TP: int = 0
    EP: int = 0
    B: int = 0
    N: int = 0

    @property
    def total(self) -> int:
        return self.TP + self.EP + self.B + self.N

    @property
    def quality_ratio(self) -> float:
        """B / (B + TP): share of dictionary translations that also pass the embedding test."""
        denom = self.B + self.TP
        return self.B / denom if denom else 0.0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.TP, self.EP, self.B, self.N)

    def to_row(self, lang: str) -> str:
        return f"| {lang} | {self.TP} | {self.EP} | {self.B} | {self.N} |"

    def to_csv(self, lang: str) -> str:
        return (
            "lang,TP,EP,B,N,ratio\n"
            f"{lang},{self.TP},{self.EP},{self.B},{self.N},{self.quality_ratio:.4f}\n"
        )


def classify_counts(records) -> FriendCounts:
    counts = FriendCounts()
    for r in records:
        setattr(counts, r.cls, getattr(counts, r.cls) + 1)
    return counts


def predict_true(record: FriendRecord, policy: str = "either") -> bool:
    if policy == "either":
        return record.has_translation or record.passes_embedding
    if policy == "both":
        return record.has_translation and record.passes_embedding
    if policy == "translation":
        return record.has_translation
    if policy == "embedding":
        return record.passes_embedding
    raise ValueError(f"unknown policy {policy!r}, expected one of {POLICIES}")


def eval_gold(records, gold_true, gold_false, policy: str = "either") -> tuple[float, float]:
    """F1 on the true-friend class and accuracy over all gold pairs.

    Gold pairs without a record are predicted false.
    """
    gold_true = set(gold_true)
    gold_false = set(gold_false)
    if gold_true & gold_false:
        raise ValueError("gold true and false sets overlap")
    predicted = {(r.w_src, r.w_tgt): predict_true(r, policy) for r in records}
    tp = fp = fn = tn = 0
    for pair in gold_true:
        if predicted.get(pair, False):
            tp += 1
        else:
            fn += 1
    for pair in gold_false:
        if predicted.get(pair, False):
            fp += 1
        else:
            tn += 1
    total = tp + fp + fn + tn
    f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    accuracy = (tp + tn) / total if total else 0.0
    return f1, accuracy


def load_gold(path) -> set[tuple[str, str]]:
    return set(load_dictionary(path).pairs)


def write_records(records, path) -> None:
    Path(path).write_text(records_tsv(records), encoding="utf-8")
