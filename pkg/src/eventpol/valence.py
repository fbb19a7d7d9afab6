"""Rule-based valence scoring of raw short texts.

A lexicon assigns each sentiment-bearing token an intensity on the
[-4, +4] scale. The scorer walks the token stream and adjusts each hit
with the classic social-media heuristics, in this order per hit:

* ALL-CAPS emphasis when the hit is upper-cased in mixed-case text;
* degree modifiers ("very", "barely", ...) in the three preceding
  tokens, damped with distance (x0.95 at distance two, x0.9 at three);
* negation words (or an "n't" contraction) within the preceding
  ``negation_scope_words`` tokens, which multiply by a negative factor;

then, over the whole text:

* a contrastive "but" down-weights everything before it and
  up-weights everything after;
* trailing exclamation marks amplify the summed valence (capped).

The adjusted sum x is squashed to the open interval (-1, +1) as
``x / sqrt(x**2 + alpha)``. Scoring is on RAW text: lowercasing or
stripping punctuation first would destroy the caps and exclamation
cues, so feature-pipeline preprocessing must not be applied before
scoring unless you deliberately want that (see the CLI's
``--prep-before-scoring`` flag).
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Mapping, Optional

from .errors import EmptyLexiconError, ValidationError

__all__ = [
    "Lexicon",
    "LexiconRejection",
    "ValenceConfig",
    "SentimentScore",
    "ValenceScorer",
    "load_lexicon",
    "default_lexicon",
    "compound",
    "classify_polarity",
    "BOOSTERS",
    "NEGATIONS",
]

MIN_VALENCE = -4.0
MAX_VALENCE = 4.0

Polarity = Literal["positive", "negative", "neutral"]

# Degree modifiers: +1 intensifies, -1 dampens. The effective shift is
# direction * ValenceConfig.booster_increment, sign-aligned with the
# sentiment word being modified. A token listed here never scores as a
# lexicon word, so the shipped lexicon must stay disjoint from this set.
BOOSTERS: dict[str, float] = {
    "absolutely": 1, "amazingly": 1, "awfully": 1, "completely": 1,
    "considerable": 1, "considerably": 1, "decidedly": 1, "deeply": 1,
    "effing": 1, "enormous": 1, "enormously": 1, "entirely": 1,
    "especially": 1, "exceptional": 1, "exceptionally": 1, "extreme": 1,
    "extremely": 1, "fabulously": 1, "flipping": 1, "flippin": 1,
    "frackin": 1, "fracking": 1, "fricking": 1, "frickin": 1,
    "frigging": 1, "friggin": 1, "fully": 1, "fuckin": 1, "fucking": 1,
    "fuggin": 1, "fugging": 1, "greatly": 1, "hella": 1, "highly": 1,
    "hugely": 1, "incredible": 1, "incredibly": 1, "intensely": 1,
    "major": 1, "majorly": 1, "more": 1, "most": 1, "particularly": 1,
    "purely": 1, "quite": 1, "really": 1, "remarkably": 1, "so": 1,
    "substantially": 1, "thoroughly": 1, "total": 1, "totally": 1,
    "tremendous": 1, "tremendously": 1, "uber": 1, "unbelievably": 1,
    "unusually": 1, "utter": 1, "utterly": 1, "very": 1,
    "almost": -1, "barely": -1, "hardly": -1, "kinda": -1, "kindof": -1,
    "kind-of": -1, "less": -1, "little": -1, "marginal": -1,
    "marginally": -1, "occasional": -1, "occasionally": -1, "partly": -1,
    "scarce": -1, "scarcely": -1, "slight": -1, "slightly": -1,
    "somewhat": -1, "sorta": -1, "sortof": -1, "sort-of": -1,
}

# Words that flip the sign of a following sentiment word; any token
# containing "n't" negates as well.
NEGATIONS: frozenset[str] = frozenset([
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt",
    "doesnt", "ain't", "aren't", "can't", "couldn't", "daren't",
    "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent", "isnt",
    "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't",
    "haven't", "isn't", "mightn't", "mustn't", "neednt", "needn't",
    "never", "none", "nope", "nor", "not", "nothing", "nowhere",
    "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely",
    "seldom", "despite",
])

# Booster shifts are damped with distance from the sentiment word.
_DISTANCE_DAMPING = (1.0, 0.95, 0.9)
_BOOSTER_WINDOW = 3


@dataclass(frozen=True)
class ValenceConfig:
    """Rule constants for the scorer.

    The defaults are the empirically derived constants of the standard
    social-media valence model and are locked by the parity fixture
    suite; change them only for experiments.
    """

    alpha: float = 15.0
    booster_increment: float = 0.293
    caps_increment: float = 0.733
    exclamation_increment: float = 0.292
    max_exclamations: int = 4
    negation_factor: float = -0.74
    negation_scope_words: int = 3
    but_weight_before: float = 0.5
    but_weight_after: float = 1.5
    pos_threshold: float = 0.05
    neg_threshold: float = -0.05

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")
        if self.negation_factor >= 0:
            raise ValidationError("negation_factor must be negative (it flips sign)")
        if not (self.pos_threshold > 0 > self.neg_threshold):
            raise ValidationError("need pos_threshold > 0 > neg_threshold")
        if self.max_exclamations < 0 or self.negation_scope_words < 0:
            raise ValidationError("counts must be non-negative")


@dataclass(frozen=True)
class LexiconRejection:
    line: int
    reason: str


@dataclass
class Lexicon:
    """token -> valence map on the [-4, +4] scale, plus load rejections."""

    entries: dict[str, float]
    rejections: list[LexiconRejection] = field(default_factory=list)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, token: str) -> Optional[float]:
        return self.entries.get(token)


@dataclass(frozen=True)
class SentimentScore:
    """Proportional pos/neu/neg plus the squashed compound polarity.

    ``x`` is the pre-normalization adjusted valence sum, kept for
    diagnostics; ``compound == x / sqrt(x**2 + alpha)`` for the config
    the scorer ran with.
    """

    pos: float
    neu: float
    neg: float
    compound: float
    x: float


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse a lexicon file into a token -> valence map.

    Accepted line shapes (tab-separated, UTF-8): ``token<TAB>valence``
    or the four-column ``token<TAB>mean<TAB>stddev<TAB>ratings`` with
    columns 3-4 ignored. Tokens are lowercased. Lines whose valence
    falls outside [-4, +4], or that do not parse, are rejected and
    reported, never silently skipped.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read lexicon file {path}: {exc}") from exc

    entries: dict[str, float] = {}
    rejections: list[LexiconRejection] = []
    for line_no, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            rejections.append(LexiconRejection(line_no, "expected at least 2 tab-separated columns"))
            continue
        token = parts[0].strip().lower()
        if not token:
            rejections.append(LexiconRejection(line_no, "empty token"))
            continue
        try:
            valence = float(parts[1])
        except ValueError:
            rejections.append(LexiconRejection(line_no, f"valence {parts[1]!r} is not a number"))
            continue
        if not (MIN_VALENCE <= valence <= MAX_VALENCE):
            rejections.append(
                LexiconRejection(line_no, f"valence {valence} outside [{MIN_VALENCE}, {MAX_VALENCE}]")
            )
            continue
        entries[token] = valence
    if not entries:
        raise EmptyLexiconError(f"lexicon file {path} has no usable entries")
    return Lexicon(entries=entries, rejections=rejections)


def default_lexicon() -> Lexicon:
    """The English sentiment lexicon shipped with the package."""
    return load_lexicon(Path(str(resources.files("eventpol").joinpath("data", "sentiment_lexicon_en.txt"))))


def compound(x: float, alpha: float = 15.0) -> float:
    """Squash a summed valence into (-1, +1): ``x / sqrt(x**2 + alpha)``.

    Odd in x, strictly increasing in x, and shrinking toward zero as
    alpha grows.
    """
    if alpha <= 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    return x / math.sqrt(x * x + alpha)


def classify_polarity(score: SentimentScore, config: ValenceConfig = ValenceConfig()) -> Polarity:
    """Threshold the compound score into positive / negative / neutral."""
    if score.compound >= config.pos_threshold:
        return "positive"
    if score.compound <= config.neg_threshold:
        return "negative"
    return "neutral"


def _strip_token_punct(token: str) -> str:
    """Trim surrounding punctuation unless that would leave an emoticon-sized stub."""
    stripped = token.strip(string.punctuation)
    if len(stripped) <= 2:
        return token
    return stripped


def _split_tokens(text: str) -> list[str]:
    return [_strip_token_punct(t) for t in text.split()]


def _some_but_not_all_caps(tokens: list[str]) -> bool:
    caps = sum(1 for t in tokens if t.isupper())
    return 0 < len(tokens) - caps < len(tokens)


class ValenceScorer:
    """Applies the lexicon and heuristics to raw text.

    Immutable after construction; ``score`` is pure, so instances may be
    shared freely across threads or processes.
    """

    def __init__(
        self,
        lexicon: Lexicon,
        config: ValenceConfig = ValenceConfig(),
        boosters: Optional[Mapping[str, float]] = None,
        negations: Optional[Iterable[str]] = None,
    ):
        if len(lexicon) == 0:
            raise EmptyLexiconError("scorer needs a non-empty lexicon")
        self.lexicon = lexicon
        self.config = config
        self.boosters = dict(BOOSTERS if boosters is None else boosters)
        self.negations = frozenset(NEGATIONS if negations is None else negations)

    def _is_negation(self, token: str) -> bool:
        return token in self.negations or "n't" in token

    def _booster_shift(self, token: str, valence: float, is_cap_diff: bool) -> float:
        """Shift contributed by a degree modifier, sign-aligned with the hit."""
        direction = self.boosters.get(token.lower())
        if direction is None:
            return 0.0
        shift = direction * self.config.booster_increment
        if valence < 0:
            shift = -shift
        if token.isupper() and is_cap_diff:
            shift += self.config.caps_increment if valence > 0 else -self.config.caps_increment
        return shift

    def _token_valence(self, tokens: list[str], i: int, is_cap_diff: bool) -> float:
        cfg = self.config
        token = tokens[i]
        valence = self.lexicon.entries[token.lower()]

        if token.isupper() and is_cap_diff:
            valence += cfg.caps_increment if valence > 0 else -cfg.caps_increment

        scope = max(_BOOSTER_WINDOW, cfg.negation_scope_words)
        for dist in range(1, scope + 1):
            if i < dist:
                break
            prev = tokens[i - dist]
            if prev.lower() in self.lexicon:
                # A sentiment-bearing word scores on its own; it neither
                # boosts nor negates its neighbors.
                continue
            if dist <= _BOOSTER_WINDOW:
                shift = self._booster_shift(prev, valence, is_cap_diff)
                if shift != 0.0 and dist > 1:
                    shift *= _DISTANCE_DAMPING[dist - 1]
                valence += shift
            if dist <= cfg.negation_scope_words and self._is_negation(prev.lower()):
                valence *= cfg.negation_factor
        return valence

    def _apply_but(self, tokens: list[str], valences: list[float]) -> list[float]:
        lowered = [t.lower() for t in tokens]
        if "but" not in lowered:
            return valences
        bi = lowered.index("but")
        cfg = self.config
        return [
            v * cfg.but_weight_before if i < bi else v * cfg.but_weight_after if i > bi else v
            for i, v in enumerate(valences)
        ]

    def score(self, text: str) -> SentimentScore:
        """Score one text as a unit (no sentence splitting).

        Text with no tokens, or tokens but no lexicon hits, scores
        neutral: x=0, compound=0, neu=1.
        """
        cfg = self.config
        tokens = _split_tokens(text)
        if not tokens:
            return SentimentScore(pos=0.0, neu=1.0, neg=0.0, compound=0.0, x=0.0)
        is_cap_diff = _some_but_not_all_caps(tokens)

        valences: list[float] = []
        for i, token in enumerate(tokens):
            lower = token.lower()
            if lower in self.boosters or lower not in self.lexicon:
                valences.append(0.0)
            else:
                valences.append(self._token_valence(tokens, i, is_cap_diff))
        valences = self._apply_but(tokens, valences)

        total = math.fsum(valences)
        emphasis = min(text.count("!"), cfg.max_exclamations) * cfg.exclamation_increment
        if total > 0:
            total += emphasis
        elif total < 0:
            total -= emphasis

        pos_sum = math.fsum(v + 1.0 for v in valences if v > 0)
        neg_sum = math.fsum(v - 1.0 for v in valences if v < 0)
        neu_count = sum(1 for v in valences if v == 0)
        if pos_sum > abs(neg_sum):
            pos_sum += emphasis
        elif pos_sum < abs(neg_sum):
            neg_sum -= emphasis
        norm = pos_sum + abs(neg_sum) + neu_count

        return SentimentScore(
            pos=abs(pos_sum / norm),
            neu=abs(neu_count / norm),
            neg=abs(neg_sum / norm),
            compound=compound(total, cfg.alpha),
            x=total,
        )
