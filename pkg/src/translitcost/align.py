"""Minimum-cost segmentation matching of a string pair under a cost model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ContractError, PiecePair, TransliterationModel

DEFAULT_DELTA = 0.5

_EMPTY: dict = {}


@dataclass(frozen=True)
class Alignment:
    segments: tuple[PiecePair, ...]
    total_cost: float

    @property
    def source(self) -> str:
        return "".join(src for src, _ in self.segments)

    @property
    def target(self) -> str:
        return "".join(tgt for _, tgt in self.segments)

    def __len__(self) -> int:
        return len(self.segments)


def align(model: TransliterationModel, s: str, t: str) -> Alignment:
    """Return the cheapest joint segmentation of `s` and `t`.

    Pieces are at most ``model.lmax`` characters per side and one side may be
    empty. The table is filled from the end of both strings so that
    ``cost[i][j]`` is the best cost of aligning ``s[i:]`` with ``t[j:]``;
    totals are therefore right-folded sums of piece costs.

    Ties are broken by fewer segments, then at the first segment by a longer
    source piece, then by the lexicographically smaller ``(src, tgt)``, and
    recursively likewise for the remainder.
    """
    n_s, n_t = len(s), len(t)
    if n_s + n_t == 0:
        raise ContractError("cannot align two empty strings")
    lmax = model.lmax
    table = model.by_src
    inf = math.inf

    cost = [[inf] * (n_t + 1) for _ in range(n_s + 1)]
    nseg = [[0] * (n_t + 1) for _ in range(n_s + 1)]
    step = [[(0, 0)] * (n_t + 1) for _ in range(n_s + 1)]
    cost[n_s][n_t] = 0.0

    for i in range(n_s, -1, -1):
        # longer source pieces first so the first strict improvement wins ties
        rows = [
            (a, table.get(s[i:i + a], _EMPTY), cost[i + a], nseg[i + a])
            for a in range(min(lmax, n_s - i), -1, -1)
        ]
        cost_i, nseg_i, step_i = cost[i], nseg[i], step[i]
        for j in range(n_t, -1, -1):
            if i == n_s and j == n_t:
                continue
            best = inf
            best_n = 0
            best_step = (0, 0)
            bmax = min(lmax, n_t - j)
            for a, row, cost_next, nseg_next in rows:
                # b ascending visits target pieces in lexicographic order
                for b in range(0 if a else 1, bmax + 1):
                    c = row.get(t[j:j + b])
                    total = (a + b if c is None else c) + cost_next[j + b]
                    if total < best or (total == best and nseg_next[j + b] + 1 < best_n):
                        best = total
                        best_n = nseg_next[j + b] + 1
                        best_step = (a, b)
            cost_i[j] = best
            nseg_i[j] = best_n
            step_i[j] = best_step

    segments = []
    i = j = 0
    while i < n_s or j < n_t:
        a, b = step[i][j]
        segments.append((s[i:i + a], t[j:j + b]))
        i += a
        j += b
    return Alignment(tuple(segments), cost[0][0])


def alignment_cost(model: TransliterationModel, s: str, t: str) -> float:
    return align(model, s, t).total_cost


def is_flawed(
    model: TransliterationModel,
    s: str,
    t: str,
    delta: float = DEFAULT_DELTA,
    min_saving_ratio: float = 0.0,
) -> bool:
    """True when the model explains essentially nothing of the pair.

    The pair is flawed when its best alignment saves less than `delta` over
    the untrained cost ``len(s) + len(t)``, or less than `min_saving_ratio`
    of that cost.
    """
    return flawed_cost(align(model, s, t).total_cost, len(s) + len(t), delta, min_saving_ratio)


def flawed_cost(cost: float, untrained: float, delta: float, min_saving_ratio: float = 0.0) -> bool:
    return cost >= untrained - max(delta, min_saving_ratio * untrained)
