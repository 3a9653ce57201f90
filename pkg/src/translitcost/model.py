"""Directional substring-pair cost matrix and its text serialization."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

from .ingestion import LoadError

PiecePair = tuple[str, str]

MAGIC = "#translit-model v1"
DEFAULT_LMAX = 3
COST_FLOOR = 0.01


class ContractError(ValueError):
    """A caller broke an operation's precondition."""


def default_cost(src: str, tgt: str) -> int:
    """Cost of a piece pair the model has never learned: total piece length."""
    return len(src) + len(tgt)


def check_pair(pair: PiecePair, lmax: int) -> None:
    src, tgt = pair
    if not src and not tgt:
        raise ContractError("piece pair must not have both pieces empty")
    if len(src) > lmax or len(tgt) > lmax:
        raise ContractError(f"piece longer than lmax={lmax}: {pair!r}")


@dataclass(frozen=True, eq=False)
class TransliterationModel:
    """Cost of rewriting a source piece as a target piece, for one direction.

    Pairs missing from `costs` cost ``len(src) + len(tgt)``. Instances are
    treated as immutable; training returns new models.
    """

    source_lang: str = "src"
    target_lang: str = "tgt"
    lmax: int = DEFAULT_LMAX
    rounds_trained: int = 0
    costs: Mapping[PiecePair, float] = field(default_factory=dict)
    alphabet_src: frozenset = frozenset()
    alphabet_tgt: frozenset = frozenset()

    def __post_init__(self):
        if self.lmax < 1:
            raise ContractError("lmax must be >= 1")
        object.__setattr__(self, "alphabet_src", frozenset(self.alphabet_src))
        object.__setattr__(self, "alphabet_tgt", frozenset(self.alphabet_tgt))
        for pair, cost in self.costs.items():
            check_pair(pair, self.lmax)
            if not (0.0 < cost <= default_cost(*pair)):
                raise ContractError(f"stored cost {cost!r} for {pair!r} outside (0, len+len]")

    def __eq__(self, other):
        if not isinstance(other, TransliterationModel):
            return NotImplemented
        return (
            self.source_lang == other.source_lang
            and self.target_lang == other.target_lang
            and self.lmax == other.lmax
            and self.rounds_trained == other.rounds_trained
            and dict(self.costs) == dict(other.costs)
            and self.alphabet_src == other.alphabet_src
            and self.alphabet_tgt == other.alphabet_tgt
        )

    __hash__ = None

    @cached_property
    def by_src(self) -> dict[str, dict[str, float]]:
        """Stored costs grouped by source piece; the lookup structure for the DPs."""
        table: dict[str, dict[str, float]] = defaultdict(dict)
        for (src, tgt), cost in self.costs.items():
            table[src][tgt] = cost
        return dict(table)

    @property
    def is_fresh(self) -> bool:
        return not self.costs

    def cost_of(self, pair: PiecePair) -> float:
        check_pair(pair, self.lmax)
        stored = self.costs.get(pair)
        return default_cost(*pair) if stored is None else stored

    def replace(self, **changes) -> "TransliterationModel":
        fields = dict(
            source_lang=self.source_lang,
            target_lang=self.target_lang,
            lmax=self.lmax,
            rounds_trained=self.rounds_trained,
            costs=self.costs,
            alphabet_src=self.alphabet_src,
            alphabet_tgt=self.alphabet_tgt,
        )
        fields.update(changes)
        return TransliterationModel(**fields)


def cost_of(model: TransliterationModel, pair: PiecePair) -> float:
    return model.cost_of(pair)


class ObservationTable:
    """Counts of matched piece pairs with per-source-piece marginals."""

    def __init__(self, counts: Mapping[PiecePair, float] | None = None):
        self.counts: dict[PiecePair, float] = {}
        self.totals: dict[str, float] = defaultdict(float)
        self.grand_total = 0
        if counts:
            for pair, n in counts.items():
                self.add(pair, n)

    def add(self, pair: PiecePair, n=1) -> None:
        if n < 0:
            raise ValueError("observation counts are nonnegative")
        self.counts[pair] = self.counts.get(pair, 0) + n
        self.totals[pair[0]] += n
        self.grand_total += n

    def merge(self, other: "ObservationTable") -> "ObservationTable":
        for pair, n in other.counts.items():
            self.add(pair, n)
        return self

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, pair: PiecePair):
        return self.counts.get(pair, 0)

    def __contains__(self, pair: PiecePair) -> bool:
        return pair in self.counts


def _fmt_cost(cost: float) -> str:
    # repr gives the shortest string that round-trips (up to 17 significant digits)
    return repr(float(cost))


def serialize(model: TransliterationModel, path) -> None:
    lines = [
        MAGIC,
        f"#src {model.source_lang}",
        f"#tgt {model.target_lang}",
        f"#lmax {model.lmax}",
        f"#rounds {model.rounds_trained}",
        f"#alphabet_src {json.dumps(''.join(sorted(model.alphabet_src)), ensure_ascii=False)}",
        f"#alphabet_tgt {json.dumps(''.join(sorted(model.alphabet_tgt)), ensure_ascii=False)}",
    ]
    for (src, tgt) in sorted(model.costs):
        lines.append(f"{src}\t{tgt}\t{_fmt_cost(model.costs[(src, tgt)])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def deserialize(path) -> TransliterationModel:
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except OSError as exc:
        raise LoadError(path, None, f"cannot read model ({exc.strerror})") from exc
    except UnicodeDecodeError as exc:
        raise LoadError(path, None, f"model is not UTF-8 ({exc.reason})") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].rstrip("\r") != MAGIC:
        raise LoadError(path, 1, f"bad header, expected {MAGIC!r}")

    header: dict[str, str] = {}
    costs: dict[PiecePair, float] = {}
    for line_no, line in enumerate(lines[1:], 2):
        line = line.rstrip("\r")
        if line.startswith("#") and "\t" not in line:
            # records always hold tabs, so a source piece may itself start with '#'
            key, _, value = line[1:].partition(" ")
            header[key] = value
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise LoadError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        try:
            cost = float(fields[2])
        except ValueError:
            raise LoadError(path, line_no, f"bad cost {fields[2]!r}") from None
        if not math.isfinite(cost):
            raise LoadError(path, line_no, f"non-finite cost {fields[2]!r}")
        pair = (fields[0], fields[1])
        try:
            check_pair(pair, int(header.get("lmax", DEFAULT_LMAX)))
        except (ContractError, ValueError) as exc:
            raise LoadError(path, line_no, str(exc)) from None
        if not 0.0 < cost <= default_cost(*pair):
            raise LoadError(path, line_no, f"cost {cost!r} outside (0, len+len]")
        if pair in costs:
            raise LoadError(path, line_no, f"duplicate record for {pair!r}")
        costs[pair] = cost

    try:
        model = TransliterationModel(
            source_lang=header.get("src", "src"),
            target_lang=header.get("tgt", "tgt"),
            lmax=int(header.get("lmax", DEFAULT_LMAX)),
            rounds_trained=int(header.get("rounds", 0)),
            costs=costs,
            alphabet_src=frozenset(json.loads(header.get("alphabet_src", '""'))),
            alphabet_tgt=frozenset(json.loads(header.get("alphabet_tgt", '""'))),
        )
    except (ValueError, json.JSONDecodeError) as exc:
        raise LoadError(path, None, f"invalid model: {exc}") from exc
    return model
