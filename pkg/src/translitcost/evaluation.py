"""Top-k and Levenshtein-1 scoring, report formatting and cost heatmaps."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .generation import Candidate, construct_topk
from .model import TransliterationModel

DEFAULT_KS = (1, 20, 100)


def edit_distance(a: str, b: str) -> int:
    """Unit-cost Levenshtein distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein1(hyp: str, ref: str) -> bool:
    """True if `hyp` is at most one insertion, deletion or substitution from `ref`."""
    if abs(len(hyp) - len(ref)) > 1:
        return False
    return edit_distance(hyp, ref) <= 1


def topk_hit(cands, gold: str, k: int) -> bool:
    return any(c.text == gold for c in cands[:k])


@dataclass
class Report:
    """Percentages of test items with gold in the top k, plus Levenshtein-1."""

    topk: dict[int, float]
    levenshtein_1: float
    n_items: int
    direction: str = ""
    lang: str = ""
    model: str = "Ours"
    per_item: list[dict] = field(default_factory=list, repr=False)

    @property
    def ks(self) -> list[int]:
        return sorted(self.topk)

    def header(self) -> list[str]:
        return ["direction", "lang", "model", "n"] + [f"top_{k}" for k in self.ks] + ["levenshtein_1"]

    def row(self) -> list[str]:
        return (
            [self.direction, self.lang, self.model, str(self.n_items)]
            + [f"{self.topk[k]:.2f}" for k in self.ks]
            + [f"{self.levenshtein_1:.2f}"]
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        writer.writerow(self.row())
        return buf.getvalue()

    def to_text(self) -> str:
        """Pipe table in the Direction | Lang | Model | Top-k ... | Levenshtein 1 layout."""
        head = ["Direction", "Lang", "Model"] + [f"Top-{k}" for k in self.ks] + ["Levenshtein 1"]
        cells = [self.direction, self.lang, self.model]
        cells += [f"{self.topk[k]:.1f}%" for k in self.ks] + [f"{self.levenshtein_1:.1f}%"]
        return "| " + " | ".join(head) + " |\n" + "| " + " | ".join(cells) + " |\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _score_item(args):
    model, source, gold, kmax = args
    cands = construct_topk(model, source, kmax)
    texts = [c.text for c in cands]
    rank = texts.index(gold) + 1 if gold in texts else None
    top = texts[0] if texts else ""
    return {"source": source, "gold": gold, "best": top, "rank": rank, "lev1": levenshtein1(top, gold)}


def evaluate(
    model: TransliterationModel,
    test,
    k_list=DEFAULT_KS,
    direction: str = "",
    lang: str = "",
    label: str = "Ours",
    threads: int = 1,
) -> Report:
    """Score `model` on ``(source, gold)`` pairs.

    `test` is either a list of pairs or a split `PairCorpus`, in which case
    its test bucket is used. Gold forms are compared exactly; both sides are
    expected to be normalized already.
    """
    pairs = test.test if hasattr(test, "test") else list(test)
    if not pairs:
        raise ValueError("empty test split")
    ks = sorted(set(int(k) for k in k_list))
    if not ks or ks[0] < 1:
        raise ValueError("k values must be >= 1")
    jobs = [(model, s, g, ks[-1]) for s, g in pairs]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            items = list(pool.map(_score_item, jobs, chunksize=16))
    else:
        items = [_score_item(job) for job in jobs]
    n = len(items)
    topk = {k: 100.0 * sum(1 for it in items if it["rank"] is not None and it["rank"] <= k) / n for k in ks}
    lev = 100.0 * sum(it["lev1"] for it in items) / n
    return Report(topk, lev, n, direction, lang, label, items)


def candidates_tsv(cands: list[Candidate]) -> str:
    return "".join(f"{r}\t{c.text}\t{c.cost!r}\n" for r, c in enumerate(cands, 1))


def export_heatmap(model: TransliterationModel, chars_src, chars_tgt, path) -> None:
    """Write the single-character cost matrix as CSV (rows: source characters)."""
    chars_src = list(chars_src)
    chars_tgt = list(chars_tgt)
    if not chars_src or not chars_tgt:
        raise ValueError("character lists must be nonempty")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + chars_tgt)
        for cs in chars_src:
            writer.writerow([cs] + [repr(float(model.cost_of((cs, ct)))) for ct in chars_tgt])
