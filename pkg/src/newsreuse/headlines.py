"""Headline change detection and feature-shift analysis.

Copied articles often carry rewritten titles. This module measures how far
each copy's title drifts from the original (TFIDF cosine distance), ranks
sources by how many titles they change and by how much, and tests which
content features of the titles shift consistently per source (one-way ANOVA
on feature distributions, gated by normality and sample-size checks).
"""

from __future__ import annotations

import csv
import logging
import re
import statistics
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Mapping, Sequence

from scipy import stats as _scipy_stats

from .corpus import Lexicon
from .errors import DataError
from .similarity import (
    DocVector,
    MatchedPair,
    TokenizedDoc,
    cosine,
    fit_tfidf,
    tokenize,
    vectorize,
)

log = logging.getLogger(__name__)

DEFAULT_CHANGE_THRESHOLD = 0.10

FEATURE_NAMES = (
    "stopword_frac",
    "punctuation_count",
    "quote_count",
    "readability",
    "bias_frac",
    "pos_opinion_frac",
    "neg_opinion_frac",
)

# Minimal fallback so the feature extractor works without a stopword file.
DEFAULT_STOPWORDS = frozenset(
    """a about after all also an and any are as at be because been but by can
    could did do for from had has have he her his how i if in into is it its
    just like me more most my no not now of on or our out over she so some
    than that the their them then there they this to up us was we were what
    when which who will with would you your""".split()
)

_QUOTE_CHARS = frozenset("\"'‘’“”«»‹›„‚`")

_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class TitlePair:
    """Title drift for one matched pair; ineligible when a title is empty."""

    pair: MatchedPair
    original_title: str
    copy_title: str
    distance: float
    eligible: bool

    def changed(self, threshold: float = DEFAULT_CHANGE_THRESHOLD) -> bool:
        return self.eligible and self.distance > threshold


def title_distance(pairs: Sequence[MatchedPair]) -> list[TitlePair]:
    """Cosine distance between original and copy titles for every pair.

    The TFIDF model is fitted once over the set of distinct titles appearing
    in the pairs; per-window statistics are too sparse for short texts.
    """
    titles = sorted(
        {p.earlier.title for p in pairs} | {p.later.title for p in pairs}
    )
    docs = {t: TokenizedDoc.from_text(f"title{i}", t) for i, t in enumerate(titles)}
    nonempty = [d for d in docs.values() if d.tokens]
    vectors: dict[str, DocVector] = {}
    if len(nonempty) >= 2:
        model = fit_tfidf(nonempty, window_index=-1)
        vectors = {t: vectorize(model, d) for t, d in docs.items()}
    out = []
    for p in pairs:
        original, copy = p.earlier.title, p.later.title
        eligible = bool(docs[original].tokens) and bool(docs[copy].tokens)
        if eligible and original == copy:
            # No model needed; also covers corpora with one distinct title.
            distance = 0.0
        elif eligible and vectors:
            distance = 1.0 - cosine(vectors[original], vectors[copy])
            distance = min(1.0, max(0.0, distance))
        else:
            distance = 0.0
            eligible = False
        out.append(
            TitlePair(
                pair=p,
                original_title=original,
                copy_title=copy,
                distance=distance,
                eligible=eligible,
            )
        )
    return out


def changed_fraction(
    title_pairs: Sequence[TitlePair], threshold: float = DEFAULT_CHANGE_THRESHOLD
) -> float:
    eligible = [tp for tp in title_pairs if tp.eligible]
    if not eligible:
        raise DataError("no eligible title pairs")
    return sum(1 for tp in eligible if tp.distance > threshold) / len(eligible)


def rank_changers(
    title_pairs: Sequence[TitlePair], threshold: float = DEFAULT_CHANGE_THRESHOLD
) -> tuple[list[tuple[str, int]], list[tuple[str, float]]]:
    """Rank copying sources by (a) changed-title count, (b) mean distance
    over their changed titles. Ties break by source name."""
    counts: dict[str, int] = {}
    distances: dict[str, list[float]] = {}
    for tp in title_pairs:
        if not tp.changed(threshold):
            continue
        source = tp.pair.later.source
        counts[source] = counts.get(source, 0) + 1
        distances.setdefault(source, []).append(tp.distance)
    most_changed = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    by_magnitude = sorted(
        ((s, statistics.fmean(ds)) for s, ds in distances.items()),
        key=lambda kv: (-kv[1], kv[0]),
    )
    return most_changed, by_magnitude


def _syllables(token: str) -> int:
    """Deterministic vowel-group count with a terminal silent-e adjustment."""
    groups = _VOWEL_GROUP_RE.findall(token)
    count = len(groups)
    if (
        count > 1
        and token.endswith("e")
        and not token.endswith("le")
        and groups[-1] == "e"
    ):
        count -= 1
    return max(1, count)


def flesch_kincaid_grade(tokens: Sequence[str]) -> float:
    """Grade level of a single-sentence text (titles count as one sentence)."""
    words = len(tokens)
    if words == 0:
        return 0.0
    syllables = sum(_syllables(t) for t in tokens)
    return 0.39 * words + 11.8 * (syllables / words) - 15.59


@dataclass(frozen=True)
class TitleFeatures:
    stopword_frac: float
    punctuation_count: float
    quote_count: float
    readability: float
    bias_frac: float
    pos_opinion_frac: float
    neg_opinion_frac: float
    token_count: int
    eligible: bool


def extract_features(
    title: str,
    lexicons: Mapping[str, Lexicon],
    stopwords: Collection[str] = DEFAULT_STOPWORDS,
) -> TitleFeatures:
    """Content features of one title.

    `lexicons` must carry `bias`, `positive` and `negative` entries; matching
    is exact on lowercased tokens. Punctuation and quotes are counted on the
    raw string, everything else on tokens. An empty title is all zeros and
    ineligible.
    """
    tokens = tokenize(title)
    n = len(tokens)
    if n == 0:
        return TitleFeatures(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, False)
    punctuation = sum(1 for ch in title if unicodedata.category(ch).startswith("P"))
    quotes = sum(1 for ch in title if ch in _QUOTE_CHARS)
    bias = lexicons["bias"].words
    positive = lexicons["positive"].words
    negative = lexicons["negative"].words
    stop = set(stopwords)
    return TitleFeatures(
        stopword_frac=sum(1 for t in tokens if t in stop) / n,
        punctuation_count=float(punctuation),
        quote_count=float(quotes),
        readability=flesch_kincaid_grade(tokens),
        bias_frac=sum(1 for t in tokens if t in bias) / n,
        pos_opinion_frac=sum(1 for t in tokens if t in positive) / n,
        neg_opinion_frac=sum(1 for t in tokens if t in negative) / n,
        token_count=n,
        eligible=True,
    )


def normality_test(samples: Sequence[float], alpha: float = 0.05) -> bool:
    """Shapiro-Wilk check; True when the sample looks normal at `alpha`."""
    if len(samples) < 3:
        raise ValueError("normality test needs at least 3 samples")
    if max(samples) == min(samples):
        return False
    _, p = _scipy_stats.shapiro(samples)
    return bool(p > alpha)


def anova_f(
    group_a: Sequence[float], group_b: Sequence[float]
) -> tuple[float, float]:
    """One-way ANOVA for two groups: F = MS_between / MS_within.

    Degrees of freedom are (1, n_a + n_b - 2); p comes from the F
    distribution's survival function. Raises when both groups are constant
    (zero within-group variance).
    """
    na, nb = len(group_a), len(group_b)
    if na < 2 or nb < 2:
        raise ValueError("each group needs at least 2 samples")
    mean_a = sum(group_a) / na
    mean_b = sum(group_b) / nb
    grand = (sum(group_a) + sum(group_b)) / (na + nb)
    ss_between = na * (mean_a - grand) ** 2 + nb * (mean_b - grand) ** 2
    ss_within = sum((x - mean_a) ** 2 for x in group_a)
    ss_within += sum((x - mean_b) ** 2 for x in group_b)
    df_within = na + nb - 2
    if ss_within == 0.0:
        raise ValueError("zero within-group variance in both groups")
    f_stat = ss_between / (ss_within / df_within)
    p = float(_scipy_stats.f.sf(f_stat, 1, df_within))
    return f_stat, p


@dataclass(frozen=True)
class FeatureShift:
    """A statistically significant per-source change in one title feature."""

    source: str
    feature: str
    direction: str  # increase | decrease
    f_stat: float
    p_value: float
    n_own: int
    n_copied: int


def significant_shifts(
    source: str,
    title_pairs: Sequence[TitlePair],
    lexicons: Mapping[str, Lexicon],
    stopwords: Collection[str] = DEFAULT_STOPWORDS,
    *,
    alpha: float = 0.05,
    min_samples: int = 8,
) -> list[FeatureShift]:
    """Features that shift significantly between a source's copy titles and
    the originals they copied.

    Group A holds the source's own titles on copied articles, group B the
    corresponding original titles. A shift is emitted only when both groups
    pass normality, both exceed `min_samples`, and ANOVA gives p < alpha.
    Titles under 3 tokens are excluded from the readability comparison.
    """
    own: list[TitleFeatures] = []
    originals: list[TitleFeatures] = []
    for tp in title_pairs:
        if not tp.eligible or tp.pair.later.source != source:
            continue
        own.append(extract_features(tp.copy_title, lexicons, stopwords))
        originals.append(extract_features(tp.original_title, lexicons, stopwords))
    if len(own) <= min_samples:
        log.info(
            "source %s: insufficient samples for shift analysis (%d pairs)",
            source, len(own),
        )
        return []
    shifts = []
    for feature in FEATURE_NAMES:
        if feature == "readability":
            group_a = [f.readability for f in own if f.token_count >= 3]
            group_b = [f.readability for f in originals if f.token_count >= 3]
        else:
            group_a = [getattr(f, feature) for f in own]
            group_b = [getattr(f, feature) for f in originals]
        if len(group_a) <= min_samples or len(group_b) <= min_samples:
            continue
        if not normality_test(group_a, alpha) or not normality_test(group_b, alpha):
            continue
        try:
            f_stat, p = anova_f(group_a, group_b)
        except ValueError:
            continue
        if p < alpha:
            mean_a = statistics.fmean(group_a)
            mean_b = statistics.fmean(group_b)
            shifts.append(
                FeatureShift(
                    source=source,
                    feature=feature,
                    direction="increase" if mean_a > mean_b else "decrease",
                    f_stat=f_stat,
                    p_value=p,
                    n_own=len(group_a),
                    n_copied=len(group_b),
                )
            )
    shifts.sort(key=lambda s: (s.p_value, s.feature))
    return shifts


TITLE_PAIRS_HEADER = ["earlier_id", "later_id", "distance", "changed"]
SHIFTS_HEADER = ["source", "feature", "direction", "F", "p", "n_own", "n_copied"]


def write_title_pairs_csv(
    title_pairs: Sequence[TitlePair],
    path: str | Path,
    threshold: float = DEFAULT_CHANGE_THRESHOLD,
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TITLE_PAIRS_HEADER)
        for tp in title_pairs:
            writer.writerow(
                [
                    tp.pair.earlier.id,
                    tp.pair.later.id,
                    repr(tp.distance) if tp.eligible else "",
                    str(tp.changed(threshold)).lower(),
                ]
            )


def write_shifts_csv(shifts: Sequence[FeatureShift], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SHIFTS_HEADER)
        for s in shifts:
            writer.writerow(
                [
                    s.source,
                    s.feature,
                    s.direction,
                    repr(s.f_stat),
                    repr(s.p_value),
                    s.n_own,
                    s.n_copied,
                ]
            )
