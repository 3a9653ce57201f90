"""Nearest lexicon entries under the learned alignment cost."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from numba import njit

from .align import align
from .ingestion import Lexicon
from .model import ContractError, TransliterationModel

# slack on pruning comparisons; the bound and the DP round differently
_PRUNE_EPS = 1e-9


@dataclass
class _Group:
    length: int
    word_ids: np.ndarray  # (batch,) indices into the lexicon
    pieces: np.ndarray  # (length + 1, lmax + 1, batch) piece ids, -1 past the end
    by_word: np.ndarray  # the same ids laid out (batch, length + 1, lmax + 1)


class LexiconIndex:
    """Lexicon words grouped by length with every target piece replaced by an id.

    Piece id 0 is the empty piece. Building the index is query independent,
    so one index serves any number of queries and models with the same
    ``lmax``.
    """

    def __init__(self, lexicon: Lexicon, lmax: int = 3):
        if not lexicon.words:
            raise ValueError("lexicon is empty")
        self.lexicon = lexicon
        self.lmax = lmax
        piece_ids: dict[str, int] = {"": 0}
        by_len: dict[int, list[int]] = {}
        for idx, w in enumerate(lexicon.words):
            by_len.setdefault(len(w), []).append(idx)
            for j in range(len(w)):
                for b in range(1, min(lmax, len(w) - j) + 1):
                    piece_ids.setdefault(w[j:j + b], len(piece_ids))
        self.piece_ids = piece_ids
        self.pieces = list(piece_ids)
        self.piece_len = np.array([len(p) for p in self.pieces], dtype=np.float64)

        self.groups: list[_Group] = []
        for n in sorted(by_len):
            ids = np.array(by_len[n], dtype=np.int64)
            arr = np.full((n + 1, lmax + 1, len(ids)), -1, dtype=np.int64)
            arr[:, 0, :] = 0
            for col, idx in enumerate(ids):
                w = lexicon.words[idx]
                for j in range(n):
                    for b in range(1, min(lmax, n - j) + 1):
                        arr[j, b, col] = piece_ids[w[j:j + b]]
            self.groups.append(_Group(n, ids, arr, np.ascontiguousarray(arr.transpose(2, 0, 1))))

    def __len__(self) -> int:
        return len(self.lexicon.words)


class _Query:
    """Per-query cost tables: for each source piece a cost vector over piece ids."""

    def __init__(self, model: TransliterationModel, index: LexiconIndex, word: str):
        if model.lmax != index.lmax:
            raise ContractError("model and index disagree on lmax")
        self.word = word
        self.lmax = model.lmax
        n = len(word)
        self.tables: dict[str, np.ndarray] = {}
        table = model.by_src
        for i in range(n + 1):
            for a in range(0, min(self.lmax, n - i) + 1):
                sp = word[i:i + a]
                if sp in self.tables:
                    continue
                vec = index.piece_len + a
                if a == 0:
                    vec[0] = np.inf
                for tp, cost in table.get(sp, {}).items():
                    pid = index.piece_ids.get(tp)
                    if pid is not None:
                        vec[pid] = cost
                self.tables[sp] = vec
        # cheapest cost per source character over every piece covering it
        per_char = np.full(n, np.inf)
        for i in range(n):
            for a in range(1, min(self.lmax, n - i) + 1):
                c = float(self.tables[word[i:i + a]].min()) / a
                per_char[i:i + a] = np.minimum(per_char[i:i + a], c)
        self.prefix_bound = np.concatenate([[0.0], np.cumsum(per_char)])
        # cheapest cost per target character of each piece, over the query's pieces
        with np.errstate(divide="ignore", invalid="ignore"):
            self.piece_char = np.min([v for sp, v in self.tables.items()], axis=0) / index.piece_len
        # qtab[qrow[i, a]] is the cost vector of source piece word[i:i+a]
        order = list(self.tables)
        self.qtab = np.stack([self.tables[sp] for sp in order])
        pos = {sp: k for k, sp in enumerate(order)}
        self.qrow = np.zeros((n + 1, self.lmax + 1), dtype=np.int64)
        for i in range(n + 1):
            for a in range(0, min(self.lmax, n - i) + 1):
                self.qrow[i, a] = pos[word[i:i + a]]

    def _target_bound(self, group: _Group) -> np.ndarray:
        """(batch, n_t + 1) prefix sums of each target character's cheapest cost.

        Every alignment covers each target character with some piece of the
        query, so these sums bound the cost of aligning any source prefix
        with the target prefix from below.
        """
        n_t, pieces = group.length, group.pieces
        per_char = np.full((n_t, len(group.word_ids)), np.inf)
        for j in range(n_t):
            for b in range(1, min(self.lmax, n_t - j) + 1):
                np.minimum(per_char[j:j + b], self.piece_char[pieces[j, b]], out=per_char[j:j + b])
        out = np.zeros((len(group.word_ids), n_t + 1))
        np.cumsum(per_char.T, axis=1, out=out[:, 1:])
        return out

    def run_group(self, group: _Group, threshold: float = np.inf):
        """Alignment costs of `word` against every word of `group`.

        Returns ``(word_ids, costs)`` for the words that were not abandoned;
        a word is abandoned once no alignment can bring it at or under
        `threshold`.
        """
        n_s = len(self.word)
        ids, pieces = group.word_ids, group.by_word
        if np.isfinite(threshold):
            tgt_bound = self._target_bound(group)
            whole = np.maximum(tgt_bound[:, -1], self.prefix_bound[n_s])
            keep = whole <= threshold + _PRUNE_EPS
            if not keep.all():
                ids, pieces, tgt_bound = ids[keep], pieces[keep], tgt_bound[keep]
        else:
            tgt_bound = np.zeros((len(ids), group.length + 1))
        out = np.empty(len(ids))
        _dp_group(
            self.qtab, self.qrow, pieces, n_s, group.length, self.lmax,
            self.prefix_bound, tgt_bound, float(threshold), out,
        )
        keep = np.isfinite(out)
        return ids[keep], out[keep]


@njit(cache=True)
def _dp_group(qtab, qrow, pieces, n_s, n_t, lmax, src_bound, tgt_bound, threshold, out):
    # Same recurrence and float operations as `align`, one word at a time.
    # Every alignment visits some cell in rows i .. i+lmax-1, so a word is
    # abandoned once the bounds over such a window of rows all exceed
    # `threshold`.
    inf = np.inf
    prune = threshold < inf
    d = np.empty((n_s + 1, n_t + 1))
    row_lb = np.empty(n_s + 1)
    for w in range(pieces.shape[0]):
        wp = pieces[w]
        tb = tgt_bound[w]
        alive = True
        for i in range(n_s, -1, -1):
            lowest = inf
            for j in range(n_t, -1, -1):
                best = 0.0 if (i == n_s and j == n_t) else inf
                for a in range(0, min(lmax, n_s - i) + 1):
                    r = qrow[i, a]
                    for b in range(0, min(lmax, n_t - j) + 1):
                        if a == 0 and b == 0:
                            continue
                        c = qtab[r, wp[j, b]] + d[i + a, j + b]
                        if c < best:
                            best = c
                d[i, j] = best
                lb = best + max(src_bound[i], tb[j])
                if lb < lowest:
                    lowest = lb
            row_lb[i] = lowest
            if prune and i > 0:
                window = inf
                for k in range(i, min(n_s, i + lmax - 1) + 1):
                    if row_lb[k] < window:
                        window = row_lb[k]
                if window > threshold + _PRUNE_EPS:
                    alive = False
                    break
        out[w] = d[0, 0] if alive else inf


def _check(lexicon_or_index, model):
    if isinstance(lexicon_or_index, LexiconIndex):
        return lexicon_or_index
    if not lexicon_or_index.words:
        raise ValueError("lexicon is empty")
    return LexiconIndex(lexicon_or_index, model.lmax)


def detect_best(model: TransliterationModel, lexicon, word: str, k: int = 1) -> list[tuple[str, float]]:
    """The `k` lexicon words closest to `word`; ties go to the more frequent word.

    `lexicon` may be a `Lexicon` or a prebuilt `LexiconIndex` (reuse one for
    repeated queries). Words are scored by a batched version of the `align`
    recurrence and abandoned as soon as a lower bound shows they cannot
    reach the current k-th best.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    if not word:
        raise ContractError("word must be nonempty")
    index = _check(lexicon, model)
    query = _Query(model, index, word)
    n = len(word)
    # lengths near the query's first: they tend to set a tight threshold early
    groups = sorted(index.groups, key=lambda g: (abs(g.length - n), g.length))
    heap: list[tuple[float, int]] = []  # max-heap of (-cost, -word_id)
    for group in groups:
        threshold = -heap[0][0] if len(heap) >= k else np.inf
        ids, costs = query.run_group(group, threshold)
        for wid, c in zip(ids.tolist(), costs.tolist()):
            item = (-c, -wid)
            if len(heap) < k:
                heapq.heappush(heap, item)
            elif item > heap[0]:
                heapq.heapreplace(heap, item)
    best = sorted((-c, -w) for c, w in heap)
    return [(index.lexicon.words[w], c) for c, w in best]


def score_all(model: TransliterationModel, lexicon, word: str) -> list[tuple[str, float]]:
    """Every lexicon word with its cost, sorted by cost then lexicon order."""
    index = _check(lexicon, model)
    query = _Query(model, index, word)
    scored = []
    for group in index.groups:
        ids, costs = query.run_group(group)
        scored.extend(zip(costs.tolist(), ids.tolist()))
    scored.sort()
    return [(index.lexicon.words[w], c) for c, w in scored]


def exact_costs(model: TransliterationModel, word: str, texts) -> list[float]:
    """`align` costs of `word` against each of `texts` (distinct, nonempty), batched."""
    texts = list(texts)
    if not texts:
        return []
    index = LexiconIndex(Lexicon(texts), model.lmax)
    query = _Query(model, index, word)
    out = [0.0] * len(texts)
    for group in index.groups:
        ids, costs = query.run_group(group)
        for wid, c in zip(ids.tolist(), costs.tolist()):
            out[wid] = c
    return out


def rank_of(model: TransliterationModel, lexicon, word: str, gold: str) -> int | None:
    """1-based rank of `gold` among all lexicon words by cost, or None if absent."""
    index = _check(lexicon, model)
    gold_id = index.lexicon.index.get(gold)
    if gold_id is None:
        return None
    gold_cost = align(model, word, gold).total_cost
    query = _Query(model, index, word)
    better = 0
    for group in index.groups:
        # only words that can reach the gold's cost matter for its rank
        ids, costs = query.run_group(group, gold_cost)
        better += int(np.sum((costs < gold_cost) | ((costs == gold_cost) & (ids < gold_id))))
    return better + 1
