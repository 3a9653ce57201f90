"""Synthetic cipher languages and bilingual setups with planted ground truth.

A cipher language rewrites every source character as one target character
from a disjoint alphabet, with a few source digraphs collapsing to a single
target character. Names drawn from a syllable grammar and pushed through the
cipher give a corpus whose correct cost matrix is known in advance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

SOURCE_ALPHABET = "abcdefghijklmnopqrstuvwxyzàéöñ"
VOWELS = "aeiouàéö"
TARGET_BASE = 0x0430  # Cyrillic small letters and onwards
DIGRAPHS = ("sh", "ch", "th")


@dataclass
class Cipher:
    char_map: dict[str, str]
    digraph_map: dict[str, str]

    @property
    def source_alphabet(self) -> str:
        return "".join(self.char_map)

    @property
    def target_alphabet(self) -> str:
        return "".join(self.char_map.values()) + "".join(self.digraph_map.values())

    def encode(self, word: str) -> str:
        out = []
        i = 0
        while i < len(word):
            pair = word[i:i + 2]
            if pair in self.digraph_map:
                out.append(self.digraph_map[pair])
                i += 2
            else:
                out.append(self.char_map[word[i]])
                i += 1
        return "".join(out)


def make_cipher(seed: int = 0, digraphs=DIGRAPHS) -> Cipher:
    rng = random.Random(seed)
    targets = [chr(TARGET_BASE + k) for k in range(len(SOURCE_ALPHABET) + len(digraphs))]
    rng.shuffle(targets)
    char_map = {c: targets[k] for k, c in enumerate(SOURCE_ALPHABET)}
    digraph_map = {d: targets[len(SOURCE_ALPHABET) + k] for k, d in enumerate(digraphs)}
    return Cipher(char_map, digraph_map)


def make_name(rng: random.Random, min_len: int = 4, max_len: int = 10) -> str:
    consonants = [c for c in SOURCE_ALPHABET if c not in VOWELS] + list(DIGRAPHS)
    target = rng.randint(min_len, max_len)
    out = ""
    while len(out) < target:
        if rng.random() < 0.85:
            out += rng.choice(consonants)
        out += rng.choice(VOWELS)
        if rng.random() < 0.2:
            out += rng.choice(consonants[:-len(DIGRAPHS)])
    return out


def make_names(n: int, seed: int = 0, min_len: int = 4, max_len: int = 10) -> list[str]:
    """`n` distinct pseudo-names, deterministic in `seed`."""
    rng = random.Random(seed)
    seen: set[str] = set()
    names: list[str] = []
    while len(names) < n:
        name = make_name(rng, min_len, max_len)
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def random_string(rng: random.Random, alphabet: str, min_len: int = 4, max_len: int = 10) -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len)))


def cipher_pairs(cipher: Cipher, names) -> list[tuple[str, str]]:
    return [(name, cipher.encode(name)) for name in names]


def noisy_cipher_pairs(
    cipher: Cipher, n: int, noise: float, seed: int = 0
) -> tuple[list[tuple[str, str]], list[bool]]:
    """`n` pairs of which a fraction `noise` are unrelated random strings.

    Returns the pairs and a parallel list flagging the noise pairs.
    """
    rng = random.Random(seed + 1)
    names = make_names(n, seed)
    n_noise = int(round(noise * n))
    noisy = set(rng.sample(range(n), n_noise))
    pairs = []
    flags = []
    for k, name in enumerate(names):
        if k in noisy:
            src = random_string(rng, cipher.source_alphabet)
            tgt = random_string(rng, cipher.target_alphabet)
            pairs.append((src, tgt))
            flags.append(True)
        else:
            pairs.append((name, cipher.encode(name)))
            flags.append(False)
    return pairs, flags


@dataclass
class BilingualSetup:
    """Two vocabularies, their embeddings and a translation dictionary.

    `planted` pairs are true friends ``(w, cipher(w))``; `false_friends` are
    cipher-encoded too (so just as lexically close) but unrelated in meaning.
    """

    words_src: list[str]
    words_tgt: list[str]
    planted: list[tuple[str, str]]
    false_friends: list[tuple[str, str]]
    vectors_src: dict[str, np.ndarray]
    vectors_tgt: dict[str, np.ndarray]
    dictionary: set[tuple[str, str]] = field(default_factory=set)


def make_bilingual_setup(
    cipher: Cipher,
    n_words: int = 5000,
    n_planted: int = 500,
    n_false: int = 0,
    n_anchors: int = 4,
    dict_coverage: float = 1.0,
    dim: int = 16,
    seed: int = 0,
    min_len: int = 5,
    max_len: int = 9,
) -> BilingualSetup:
    """Build a two-language world with known true and false friends.

    Each planted or false-friend source word owns a tight embedding cluster
    holding `n_anchors` anchor words; the anchors' translations form the
    matching cluster in the target space, and every anchor pair is in the
    dictionary. A planted target word sits in its partner's cluster, so the
    ``n_anchors`` nearest neighbours on both sides are linked. A false
    friend's target word sits in another cluster, where no links exist.
    `dict_coverage` is the fraction of planted pairs listed in the
    dictionary. The remaining vocabulary is random filler strings scattered
    far from every cluster. The target space is a rotated, shifted copy of
    the source space, so raw vectors are not comparable across languages.
    """
    rng = random.Random(seed)
    nprng = np.random.default_rng(seed)
    n_clusters = n_planted + n_false
    names = make_names(n_clusters * (1 + n_anchors), seed + 7, min_len, max_len)
    heads = names[:n_clusters]
    anchor_src = names[n_clusters:]

    planted = [(w, cipher.encode(w)) for w in heads[:n_planted]]
    false_friends = [(w, cipher.encode(w)) for w in heads[n_planted:]]
    taken_src = set(names)
    taken_tgt = {t for _, t in planted + false_friends}

    centres = nprng.normal(size=(max(n_clusters, 1), dim)) * 100.0
    rotation, _ = np.linalg.qr(nprng.normal(size=(dim, dim)))
    shift = nprng.normal(size=dim) * 50.0

    def to_tgt(v):
        return v @ rotation + shift

    vectors_src: dict[str, np.ndarray] = {}
    vectors_tgt: dict[str, np.ndarray] = {}
    dictionary: set[tuple[str, str]] = set()
    n_in_dict = int(round(dict_coverage * n_planted))
    dictionary.update(planted[:n_in_dict])

    for c, (ws, wt) in enumerate(planted + false_friends):
        vectors_src[ws] = centres[c] + nprng.normal(size=dim) * 0.1
        home = c if c < n_planted else (c + max(n_clusters // 2, 1)) % n_clusters
        vectors_tgt[wt] = to_tgt(centres[home]) + nprng.normal(size=dim) * 0.1
        for a_src in anchor_src[c * n_anchors:(c + 1) * n_anchors]:
            # anchors' target forms are reversed encodings: linked, not look-alikes
            a_tgt = cipher.encode(a_src)[::-1]
            while a_tgt in taken_tgt:
                a_tgt += a_tgt[-1]
            taken_tgt.add(a_tgt)
            vectors_src[a_src] = centres[c] + nprng.normal(size=dim) * 0.1
            vectors_tgt[a_tgt] = to_tgt(centres[c]) + nprng.normal(size=dim) * 0.1
            dictionary.add((a_src, a_tgt))

    def fill(vectors, alphabet, taken):
        while len(vectors) < n_words:
            w = random_string(rng, alphabet, min_len, max_len)
            if w not in taken:
                taken.add(w)
                vectors[w] = nprng.normal(size=dim) * 1000.0

    fill(vectors_src, cipher.source_alphabet, taken_src)
    fill(vectors_tgt, cipher.target_alphabet, taken_tgt)
    return BilingualSetup(
        sorted(vectors_src), sorted(vectors_tgt), planted, false_friends,
        vectors_src, vectors_tgt, dictionary,
    )
