"""Loading, normalizing, cleaning and splitting of name-pair corpora and lexicons."""

from __future__ import annotations

import random
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

TRAIN, TUNE, TEST = "train", "tune", "test"
SPLIT_TAGS = (TRAIN, TUNE, TEST)

_PUNCT_RE = re.compile(r"[-.,]")
_UNDERSCORE_RUN_RE = re.compile(r"_+")
_TOKEN_SPLIT_RE = re.compile(r"[_\s]+")


class LoadError(Exception):
    """Raised when an input file cannot be read or parsed."""

    def __init__(self, path, line_no: int | None, message: str):
        self.path = str(path)
        self.line_no = line_no
        where = f"{self.path}:{line_no}" if line_no is not None else self.path
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class NormConfig:
    lowercase: bool = True
    punctuation_to_underscore: bool = True
    strip_outer_whitespace: bool = True


DEFAULT_NORM = NormConfig()


def normalize_text(s: str, cfg: NormConfig = DEFAULT_NORM) -> str:
    """Return the canonical (NFC, lowercased, punctuation-unified) form of `s`.

    Hyphens, periods and commas become underscores, underscore runs collapse
    to one and leading/trailing underscores are dropped. Other punctuation is
    left alone.
    """
    if cfg.strip_outer_whitespace:
        s = s.strip()
    s = unicodedata.normalize("NFC", s)
    if cfg.lowercase:
        # lower() can decompose some characters; recompose afterwards
        s = unicodedata.normalize("NFC", s.lower())
    if cfg.punctuation_to_underscore:
        s = _PUNCT_RE.sub("_", s)
    s = _UNDERSCORE_RUN_RE.sub("_", s).strip("_")
    if cfg.strip_outer_whitespace:
        s = s.strip()
    return s


def is_name_like(s: str, max_tokens: int = 3) -> bool:
    # proxy for the "(first name, last name) or whole name" format filter
    tokens = [tok for tok in _TOKEN_SPLIT_RE.split(s) if tok]
    return 1 <= len(tokens) <= max_tokens


@dataclass
class PairCorpus:
    pairs: list[tuple[str, str]]
    source_lang: str = "src"
    target_lang: str = "tgt"
    split_tags: list[str] | None = None
    rejects: list[tuple[int, str]] = field(default_factory=list)
    duplicates: int = 0

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def dropped(self) -> int:
        return len(self.rejects) + self.duplicates

    def bucket(self, tag: str) -> list[tuple[str, str]]:
        """Pairs carrying split tag `tag`; the whole corpus if it was never split."""
        if self.split_tags is None:
            if tag == TRAIN:
                return list(self.pairs)
            raise ValueError("corpus has not been split")
        return [p for p, t in zip(self.pairs, self.split_tags) if t == tag]

    @property
    def train(self) -> list[tuple[str, str]]:
        return self.bucket(TRAIN)

    @property
    def tune(self) -> list[tuple[str, str]]:
        return self.bucket(TUNE)

    @property
    def test(self) -> list[tuple[str, str]]:
        return self.bucket(TEST)


def clean_corpus(
    raw,
    cfg: NormConfig = DEFAULT_NORM,
    source_lang: str = "src",
    target_lang: str = "tgt",
    max_tokens: int = 3,
) -> PairCorpus:
    """Normalize raw pairs, drop unusable ones and deduplicate.

    Each element of `raw` is either a ``(source, target)`` tuple or, for lines
    that failed to parse, any other sequence; the latter land in ``rejects``
    together with their index. The first occurrence of a duplicate survives.
    """
    pairs: list[tuple[str, str]] = []
    rejects: list[tuple[int, str]] = []
    seen: set[tuple[str, str]] = set()
    duplicates = 0
    for idx, item in enumerate(raw):
        if len(item) != 2:
            rejects.append((idx, f"expected 2 fields, got {len(item)}"))
            continue
        src = normalize_text(item[0], cfg)
        tgt = normalize_text(item[1], cfg)
        if not src or not tgt:
            rejects.append((idx, "empty side after normalization"))
            continue
        if not (is_name_like(src, max_tokens) and is_name_like(tgt, max_tokens)):
            rejects.append((idx, "not a name-like entry"))
            continue
        key = (src, tgt)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    return PairCorpus(pairs, source_lang, target_lang, None, rejects, duplicates)


def split_counts(n: int) -> tuple[int, int, int]:
    n_tune = int(n * 0.1 + 0.5)
    n_test = int(n * 0.1 + 0.5)
    return n - n_tune - n_test, n_tune, n_test


def split_corpus(corpus: PairCorpus, seed: int = 42) -> PairCorpus:
    """Assign train/tune/test tags with 80/10/10 proportions, deterministically."""
    n = len(corpus.pairs)
    if n == 0:
        raise ValueError("cannot split an empty corpus")
    _, n_tune, n_test = split_counts(n)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    tags = [TRAIN] * n
    for pos, idx in enumerate(order):
        if pos < n_tune:
            tags[idx] = TUNE
        elif pos < n_tune + n_test:
            tags[idx] = TEST
    return PairCorpus(
        list(corpus.pairs),
        corpus.source_lang,
        corpus.target_lang,
        tags,
        list(corpus.rejects),
        corpus.duplicates,
    )


def _read_lines(path):
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise LoadError(path, None, f"cannot read file ({exc.strerror})") from exc
    if data.startswith(b"\xef\xbb\xbf"):
        data = data[3:]
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    for line_no, raw in enumerate(lines, 1):
        try:
            yield line_no, raw.decode("utf-8").rstrip("\r")
        except UnicodeDecodeError as exc:
            raise LoadError(path, line_no, f"invalid UTF-8 ({exc.reason})") from exc


def load_pairs(path, keep_malformed: bool = False) -> list[tuple]:
    """Read a ``source<TAB>target`` file. Blank and ``#`` lines are skipped.

    Malformed lines are returned as their raw field tuples when
    `keep_malformed` is set so that `clean_corpus` can report them.
    """
    out: list[tuple] = []
    for line_no, line in _read_lines(path):
        if not line.strip() or line.startswith("#"):
            continue
        fields = tuple(line.split("\t"))
        if len(fields) != 2 and not keep_malformed:
            raise LoadError(path, line_no, f"expected 2 tab-separated fields, got {len(fields)}")
        out.append(fields)
    return out


@dataclass
class Lexicon:
    words: list[str]
    language: str = "und"

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    @property
    def index(self) -> dict[str, int]:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {w: i for i, w in enumerate(self.words)}
            self.__dict__["_index"] = idx
        return idx


def make_lexicon(words, language: str = "und", cfg: NormConfig = DEFAULT_NORM) -> Lexicon:
    # input order is the frequency order; normalization collisions keep the first
    seen: set[str] = set()
    out: list[str] = []
    for w in words:
        w = normalize_text(w, cfg)
        if w and w not in seen:
            seen.add(w)
            out.append(w)
    return Lexicon(out, language)


def load_lexicon(path, language: str = "und", cfg: NormConfig = DEFAULT_NORM) -> Lexicon:
    words = []
    for _, line in _read_lines(path):
        if line.strip():
            # frequency lists may carry a tab-separated count column
            words.append(line.split("\t")[0])
    return make_lexicon(words, language, cfg)
