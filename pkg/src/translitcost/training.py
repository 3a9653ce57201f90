"""Iterative hard-EM estimation of the substring cost matrix.

Every round aligns all training pairs under the current model, counts the
piece pairs used by the alignments of pairs that are not flawed, and turns
the counts into new costs. On the untrained model every segmentation of a
pair costs the same, so the first round instead spreads each pair's unit of
evidence evenly over all of its segmentations into nonempty pieces
(see `bootstrap_round`).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

from .align import align, flawed_cost
from .model import COST_FLOOR, DEFAULT_LMAX, ObservationTable, TransliterationModel, default_cost

logger = logging.getLogger(__name__)

BOOTSTRAP_MODES = ("uniform", "none")


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 10
    lmax: int = DEFAULT_LMAX
    alpha: float = 1.0
    delta_flaw: float = 0.5
    # a pair must save at least this fraction of its untrained cost to count
    flaw_ratio: float = 0.65
    cost_floor: float = COST_FLOOR
    # stop once dirtiness moves by less than this between rounds
    early_stop: float = 0.001
    bootstrap: str = "uniform"
    # bootstrap pieces expected fewer times than this over the corpus are dropped
    bootstrap_min_count: float = 1.0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.lmax < 1:
            raise ValueError("lmax must be >= 1")
        if not 0 < self.cost_floor <= 1:
            raise ValueError("cost_floor must be in (0, 1]")
        if not 0 <= self.flaw_ratio < 1:
            raise ValueError("flaw_ratio must be in [0, 1)")
        if self.bootstrap not in BOOTSTRAP_MODES:
            raise ValueError(f"bootstrap must be one of {BOOTSTRAP_MODES}")


@dataclass(frozen=True)
class RoundStats:
    round_index: int
    mean_alignment_cost: float
    dirtiness: float
    distinct_pairs_observed: int


def run_round(
    model: TransliterationModel,
    pairs,
    delta: float = 0.5,
    round_index: int = 0,
    flaw_ratio: float = 0.0,
) -> tuple[ObservationTable, RoundStats]:
    """Align every pair and count the segments of the pairs that are not flawed."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty training split")
    obs = ObservationTable()
    total_cost = 0.0
    n_flawed = 0
    for s, t in pairs:
        al = align(model, s, t)
        total_cost += al.total_cost
        if flawed_cost(al.total_cost, len(s) + len(t), delta, flaw_ratio):
            n_flawed += 1
            continue
        for seg in al.segments:
            obs.add(seg)
    stats = RoundStats(round_index, total_cost / len(pairs), n_flawed / len(pairs), len(obs))
    return obs, stats


def segmentation_weights(s: str, t: str, lmax: int):
    """Yield ``(piece_pair, weight)`` for a uniform distribution over segmentations.

    Only segmentations whose pieces are nonempty on both sides are counted;
    the weight of a piece pair at a position is the fraction of those
    segmentations that use it there. Yields nothing when no such
    segmentation exists.
    """
    n_s, n_t = len(s), len(t)
    fwd = [[0.0] * (n_t + 1) for _ in range(n_s + 1)]
    fwd[0][0] = 1.0
    for i in range(1, n_s + 1):
        for j in range(1, n_t + 1):
            fwd[i][j] = sum(
                fwd[i - a][j - b]
                for a in range(1, min(lmax, i) + 1)
                for b in range(1, min(lmax, j) + 1)
            )
    total = fwd[n_s][n_t]
    if total == 0.0:
        return
    bwd = [[0.0] * (n_t + 1) for _ in range(n_s + 1)]
    bwd[n_s][n_t] = 1.0
    for i in range(n_s - 1, -1, -1):
        for j in range(n_t - 1, -1, -1):
            bwd[i][j] = sum(
                bwd[i + a][j + b]
                for a in range(1, min(lmax, n_s - i) + 1)
                for b in range(1, min(lmax, n_t - j) + 1)
            )
    for i in range(n_s):
        for j in range(n_t):
            if fwd[i][j] == 0.0:
                continue
            for a in range(1, min(lmax, n_s - i) + 1):
                for b in range(1, min(lmax, n_t - j) + 1):
                    w = fwd[i][j] * bwd[i + a][j + b] / total
                    if w > 0.0:
                        yield (s[i:i + a], t[j:j + b]), w


def bootstrap_round(model: TransliterationModel, pairs, cfg: "TrainConfig", round_index: int = 1):
    """First round on an untrained model: expected counts over all tied segmentations."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty training split")
    raw: dict = {}
    n_flawed = 0
    total_cost = 0.0
    for s, t in pairs:
        untrained = len(s) + len(t)
        cost = align(model, s, t).total_cost if model.costs else float(untrained)
        total_cost += cost
        n_flawed += flawed_cost(cost, untrained, cfg.delta_flaw, cfg.flaw_ratio)
        for pair, w in segmentation_weights(s, t, model.lmax):
            raw[pair] = raw.get(pair, 0.0) + w
    obs = ObservationTable()
    for pair in sorted(raw):
        if raw[pair] >= cfg.bootstrap_min_count:
            obs.add(pair, raw[pair])
    stats = RoundStats(round_index, total_cost / len(pairs), n_flawed / len(pairs), len(obs))
    return obs, stats


def update_costs(
    model: TransliterationModel, obs: ObservationTable, cfg: TrainConfig = TrainConfig()
) -> TransliterationModel:
    """Re-estimate costs from smoothed piece-pair probabilities.

    Each observed pair gets ``p = (count + alpha * P0) / (total + alpha)``
    where the base measure ``P0`` draws every character uniformly from the
    model's alphabets. Its cost is ``-log p`` divided by ``-log`` of the
    smallest such probability, clipped into ``[cost_floor, len(src) + len(tgt)]``.
    The new model stores exactly the observed pairs; everything else goes
    back to its default cost.
    """
    if obs.grand_total <= 0:
        return model
    n_src = max(len(model.alphabet_src), 1)
    n_tgt = max(len(model.alphabet_tgt), 1)
    total = obs.grand_total
    probs = {}
    for (src, tgt), n in obs.counts.items():
        if n <= 0:
            continue
        base = float(n_src) ** -len(src) * float(n_tgt) ** -len(tgt)
        probs[(src, tgt)] = (n + cfg.alpha * base) / (total + cfg.alpha)
    if not probs:
        return model
    scale = -math.log(min(probs.values()))
    costs = {}
    for pair in sorted(probs):
        raw = -math.log(probs[pair]) / scale if scale > 0 else 0.0
        costs[pair] = min(max(raw, cfg.cost_floor), float(default_cost(*pair)))
    return model.replace(costs=costs, rounds_trained=model.rounds_trained + 1)


def dirtiness(
    model: TransliterationModel, pairs, delta: float = 0.5, flaw_ratio: float = 0.0
) -> float:
    """Fraction of `pairs` the model considers flawed."""
    pairs = list(pairs)
    if not pairs:
        return 0.0
    flawed = sum(
        flawed_cost(align(model, s, t).total_cost, len(s) + len(t), delta, flaw_ratio)
        for s, t in pairs
    )
    return flawed / len(pairs)


def fresh_model(pairs, lmax: int = DEFAULT_LMAX, source_lang="src", target_lang="tgt"):
    alphabet_src: set[str] = set()
    alphabet_tgt: set[str] = set()
    for s, t in pairs:
        alphabet_src.update(s)
        alphabet_tgt.update(t)
    return TransliterationModel(source_lang, target_lang, lmax, 0, {}, alphabet_src, alphabet_tgt)


def train(corpus, cfg: TrainConfig = TrainConfig()):
    """Train a model on the corpus's train split; returns ``(model, per_round_stats)``."""
    pairs = corpus.train
    if not pairs:
        raise ValueError("empty training split")
    model = fresh_model(pairs, cfg.lmax, corpus.source_lang, corpus.target_lang)
    history: list[RoundStats] = []
    for r in range(1, cfg.rounds + 1):
        if cfg.bootstrap == "uniform" and model.is_fresh:
            obs, stats = bootstrap_round(model, pairs, cfg, r)
        else:
            obs, stats = run_round(model, pairs, cfg.delta_flaw, r, cfg.flaw_ratio)
        history.append(stats)
        logger.info(
            "round %d: mean cost %.4f, dirtiness %.4f, %d distinct pairs",
            r, stats.mean_alignment_cost, stats.dirtiness, stats.distinct_pairs_observed,
        )
        updated = update_costs(model, obs, cfg)
        converged = (
            len(history) >= 2
            and abs(history[-1].dirtiness - history[-2].dirtiness) < cfg.early_stop
            and updated.costs == model.costs
        )
        model = updated
        if converged:
            break
    return model, history


def write_stats_csv(history, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "mean_cost", "dirtiness", "distinct_pairs"])
        for st in history:
            writer.writerow(
                [st.round_index, repr(st.mean_alignment_cost), repr(st.dirtiness), st.distinct_pairs_observed]
            )
