"""k-best transliteration construction and pivoting through an intermediate language."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property

from .align import Alignment, align
from .matching import exact_costs
from .model import ContractError, TransliterationModel

# costs within this distance of the k-th best are still collected so that
# exact ties (computed along different summation orders) are resolved by text
TIE_EPS = 1e-9


@dataclass(frozen=True)
class Candidate:
    """A generated target string with its alignment cost.

    Pivot candidates carry their two legs in `via` and no segmentation.
    """

    text: str
    cost: float
    via: tuple["Candidate", ...] = ()
    source: str | None = field(default=None, compare=False, repr=False)
    model: TransliterationModel | None = field(default=None, compare=False, repr=False)

    @cached_property
    def segmentation(self) -> Alignment | None:
        if self.model is None or self.source is None:
            return None
        return align(self.model, self.source, self.text)


def _edges(model: TransliterationModel, word: str):
    """Outgoing lattice edges per source position as ``(a, tgt_piece, cost)``.

    Untrained multi-character pieces cost exactly as much as a chain of
    single-character defaults, so only stored pieces plus single-character
    defaults are instantiated.
    """
    n = len(word)
    table = model.by_src
    alphabet = sorted(model.alphabet_tgt)
    out = []
    for i in range(n + 1):
        edges: dict[tuple[int, str], float] = {}
        for a in range(0, min(model.lmax, n - i) + 1):
            sp = word[i:i + a]
            if a == 0:
                for c in alphabet:
                    edges[(0, c)] = 1.0
            elif a == 1:
                edges[(1, "")] = 1.0
                for c in alphabet:
                    edges[(1, c)] = 2.0
            for tp, cost in table.get(sp, {}).items():
                edges[(a, tp)] = cost
        out.append(sorted((a, tp, c) for (a, tp), c in edges.items()))
    return out


def _completion_bounds(edges, n: int) -> list[float]:
    # cheapest way to consume word[i:]; an admissible and consistent heuristic
    h = [float("inf")] * (n + 1)
    h[n] = 0.0
    for i in range(n - 1, -1, -1):
        h[i] = min(c + h[i + a] for a, _, c in edges[i] if a > 0)
    return h


def construct_topk(
    model: TransliterationModel, word: str, k: int, extra_budget: float | None = None
) -> list[Candidate]:
    """The `k` cheapest distinct target strings for `word`, built from the matrix alone.

    Best-first search over (source position, target prefix) states, ordered
    by cost so far plus the cheapest completion. Only candidates costing at
    most ``len(word) + extra_budget`` are considered (the budget defaults to
    ``len(word)``), which keeps insertion chains finite; fewer than `k`
    results mean that space is exhausted. Costs and segmentations are those
    of `align` on the final strings.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    if not word:
        raise ContractError("word must be nonempty")
    n = len(word)
    budget = n + (n if extra_budget is None else extra_budget)
    edges = _edges(model, word)
    h = _completion_bounds(edges, n)

    found: dict[str, float] = {}
    limit = budget + TIE_EPS
    closed: set[tuple[int, str]] = set()
    heap = [(h[0], 0.0, "", 0)]
    while heap:
        f, g, text, i = heapq.heappop(heap)
        if f > limit:
            break
        if (i, text) in closed:
            continue
        closed.add((i, text))
        if i == n and text and text not in found:
            found[text] = g
            if len(found) >= k:
                kth = sorted(found.values())[k - 1]
                limit = min(limit, kth + TIE_EPS)
        for a, tp, c in edges[i]:
            ni = i + a
            nt = text + tp
            ng = g + c
            nf = ng + h[ni]
            if nf <= limit and (ni, nt) not in closed:
                heapq.heappush(heap, (nf, ng, nt, ni))

    # re-cost with the exact alignment recurrence so costs match `align` bit for bit
    texts = list(found)
    scored = [
        Candidate(text, cost, source=word, model=model)
        for text, cost in zip(texts, exact_costs(model, word, texts))
        if cost <= budget + TIE_EPS
    ]
    scored.sort(key=lambda c: (c.cost, c.text))
    return scored[:k]


def pivot_topk(
    m1: TransliterationModel,
    m2: TransliterationModel,
    word: str,
    k: int,
    beam: int | None = None,
) -> list[Candidate]:
    """Transliterate through an intermediate language: `m1` into it, `m2` out of it.

    Each of the `beam` best intermediates is expanded into `beam` final
    strings; a final string's cost is the cheapest sum of its two legs.
    """
    if k < 1:
        raise ContractError("k must be >= 1")
    beam = 5 * k if beam is None else beam
    if beam < k:
        raise ContractError("beam must be >= k")
    best: dict[str, Candidate] = {}
    for mid in construct_topk(m1, word, beam):
        for out in construct_topk(m2, mid.text, beam):
            total = mid.cost + out.cost
            prev = best.get(out.text)
            if prev is None or total < prev.cost:
                best[out.text] = Candidate(out.text, total, (mid, out))
    ranked = sorted(best.values(), key=lambda c: (c.cost, c.text))
    return ranked[:k]
