"""Text preparation for the classifier feature pipeline.

All functions here are pure: normalize strips URLs/mentions/hashtag
markers and lowercases, tokenize splits into alphanumeric runs, and
stopword removal and lemmatization are plain lookups. Valence scoring
does NOT use this module by default; the rule-based scorer depends on
capitalization and punctuation that these steps destroy.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "normalize",
    "tokenize",
    "remove_stopwords",
    "lemmatize",
    "prep_for_features",
    "load_stoplist",
    "load_lemma_dict",
    "default_stoplist",
    "default_lemma_dict",
]

TokenSeq = list[str]

_URL_RE = re.compile(r"(?:https?://\S+|www\.\S+)", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_HASH_RE = re.compile(r"#+(\w)")  # runs of '#' too, so one pass reaches the fixed point
_WS_RE = re.compile(r"\s+")
_TOKEN_RE = re.compile(r"[0-9a-z]+")  # ASCII runs; the pipeline ingests translated English


def normalize(text: str) -> str:
    """Strip URLs and @-mentions, unhash hashtags, lowercase, collapse whitespace.

    The stripping passes loop to a fixed point: removing one marker can
    expose another (e.g. a hashtag hiding a mention), and the function
    must be idempotent. Each pass strictly shrinks the text, so the
    loop terminates.
    """
    prev = None
    while text != prev:
        prev = text
        text = _URL_RE.sub(" ", text)
        text = _MENTION_RE.sub(" ", text)
        text = _HASH_RE.sub(r"\1", text)
    return _WS_RE.sub(" ", text.lower()).strip()


def tokenize(text: str) -> TokenSeq:
    """Split lowercased text into alphanumeric runs, preserving order."""
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: Iterable[str], stoplist: frozenset[str] | set[str]) -> TokenSeq:
    """Drop exact stoplist matches, keeping the remaining order."""
    return [t for t in tokens if t not in stoplist]


def lemmatize(tokens: Iterable[str], lemma_dict: Mapping[str, str]) -> TokenSeq:
    """Map each token through the dictionary; unknown tokens pass through unchanged."""
    return [lemma_dict.get(t, t) for t in tokens]


def prep_for_features(
    text: str,
    stoplist: frozenset[str] | set[str],
    lemma_dict: Mapping[str, str],
) -> TokenSeq:
    """normalize -> tokenize -> remove_stopwords -> lemmatize, in that order."""
    return lemmatize(remove_stopwords(tokenize(normalize(text)), stoplist), lemma_dict)


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stoplist file: one token per line, UTF-8, '#' starts a comment."""
    tokens = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.split("#", 1)[0].strip()
            if entry:
                tokens.add(entry.lower())
    return frozenset(tokens)


def load_lemma_dict(path: str | Path) -> dict[str, str]:
    """Read a lemma dictionary file: ``inflected<TAB>base`` per line."""
    lemmas: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            inflected, _, base = line.partition("\t")
            inflected = inflected.strip().lower()
            base = base.strip().lower()
            if inflected and base:
                lemmas[inflected] = base
    return lemmas


def _data_path(name: str) -> Path:
    return Path(str(resources.files("eventpol").joinpath("data", name)))


def default_stoplist() -> frozenset[str]:
    """The English stoplist shipped with the package."""
    return load_stoplist(_data_path("stopwords_en.txt"))


def default_lemma_dict() -> dict[str, str]:
    """The English inflection dictionary shipped with the package."""
    return load_lemma_dict(_data_path("lemmas_en.tsv"))
