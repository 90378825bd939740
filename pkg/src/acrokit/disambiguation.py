"""Acronym disambiguation: majority-sense baseline and a TF-IDF context ranker."""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import AdInstance, DataError, FrequencyTable, normalize_long_form

log = logging.getLogger(__name__)


def train_frequency(train: Iterable[AdInstance]) -> FrequencyTable:
    counts: Counter = Counter()
    for inst in train:
        if inst.gold is None:
            raise DataError("training instance has no gold long form", inst.id, "label")
        counts[(inst.acronym, inst.gold)] += 1
    return FrequencyTable(dict(counts))


def _argmax(candidates: Sequence[str], score) -> str:
    # highest score; ties go to the lexicographically smallest normalized form
    return min(candidates, key=lambda c: (-score(c), normalize_long_form(c), c))


def predict_frequency(inst: AdInstance, table: FrequencyTable) -> str:
    """Most frequent training sense of the acronym among the candidates."""
    return _argmax(inst.candidates, lambda c: table.count(inst.acronym, c))


def is_known(inst: AdInstance, table: FrequencyTable) -> bool:
    return any(table.count(inst.acronym, c) for c in inst.candidates)


def context_terms(inst: AdInstance) -> list[str]:
    """Lowercased unigrams of the sentence minus the acronym itself."""
    acronym = inst.acronym.lower()
    return [t.lower() for t in inst.sentence.tokens if t.lower() != acronym]


SparseVector = dict[int, float]


def _normalize(vec: Mapping[int, float]) -> SparseVector:
    norm = math.sqrt(math.fsum(v * v for v in vec.values()))
    if norm == 0:
        return {}
    return {k: v / norm for k, v in sorted(vec.items())}


def cosine(a: Mapping[int, float], b: Mapping[int, float]) -> float:
    if len(a) > len(b):
        a, b = b, a
    return math.fsum(v * b[k] for k, v in a.items() if k in b)


@dataclass(frozen=True)
class ContextProfile:
    """Per-sense L2-normalized TF-IDF vectors.

    ``profiles`` maps acronym -> long form -> sparse vector over ``vocabulary``.
    Senses seen only as candidates have empty vectors and are listed in
    ``empty_senses``.
    """

    vocabulary: Mapping[str, int]
    idf: Sequence[float]
    profiles: Mapping[str, Mapping[str, SparseVector]]
    empty_senses: tuple[tuple[str, str], ...] = ()

    def vectorize(self, terms: Iterable[str]) -> SparseVector:
        tf = Counter(self.vocabulary[t] for t in terms if t in self.vocabulary)
        return _normalize({k: c * self.idf[k] for k, c in tf.items()})

    def to_json(self) -> dict:
        return {
            "vocabulary": dict(self.vocabulary),
            "idf": list(self.idf),
            "profiles": {
                a: {lf: {str(k): v for k, v in vec.items()} for lf, vec in senses.items()}
                for a, senses in self.profiles.items()
            },
            "empty_senses": [list(p) for p in self.empty_senses],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ContextProfile":
        try:
            return cls(
                vocabulary={t: int(i) for t, i in obj["vocabulary"].items()},
                idf=[float(x) for x in obj["idf"]],
                profiles={
                    a: {lf: {int(k): float(v) for k, v in vec.items()} for lf, vec in senses.items()}
                    for a, senses in obj["profiles"].items()
                },
                empty_senses=tuple(tuple(p) for p in obj.get("empty_senses", [])),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DataError(f"malformed context profile: {e}") from None


def train_context(train: Sequence[AdInstance]) -> ContextProfile:
    """Build sense profiles from gold-labeled training sentences.

    IDF is smoothed, ``log((1 + N) / (1 + df)) + 1`` over the N training
    sentences, so every observed term keeps a positive weight.
    """
    docs = []
    for inst in train:
        if inst.gold is None:
            raise DataError("training instance has no gold long form", inst.id, "label")
        docs.append(context_terms(inst))
    df: Counter = Counter()
    for terms in docs:
        df.update(set(terms))
    vocabulary = {t: i for i, t in enumerate(sorted(df))}
    n = len(docs)
    idf = [0.0] * len(vocabulary)
    for t, i in vocabulary.items():
        idf[i] = math.log((1 + n) / (1 + df[t])) + 1.0

    sums: dict[str, dict[str, Counter]] = defaultdict(lambda: defaultdict(Counter))
    for inst, terms in zip(train, docs):
        sums[inst.acronym][inst.gold].update(vocabulary[t] for t in terms)
        for c in inst.candidates:
            sums[inst.acronym][c]  # registers candidate senses

    profiles: dict[str, dict[str, SparseVector]] = {}
    empty = []
    for acronym in sorted(sums):
        profiles[acronym] = {}
        for lf in sorted(sums[acronym]):
            tf = sums[acronym][lf]
            vec = _normalize({k: c * idf[k] for k, c in tf.items()})
            if not vec:
                empty.append((acronym, lf))
            profiles[acronym][lf] = vec
    if empty:
        log.info("%d sense(s) without training context", len(empty))
    return ContextProfile(vocabulary, idf, profiles, tuple(empty))


def predict_context(
    inst: AdInstance, profile: ContextProfile, table: FrequencyTable, alpha: float = 0.5
) -> str:
    """Rank candidates by ``alpha * cosine + (1 - alpha) * count / max count``.

    Falls back to ``predict_frequency`` when the sentence shares no term with
    any candidate profile. ``alpha=0`` is exactly the frequency baseline.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    counts = {c: table.count(inst.acronym, c) for c in inst.candidates}
    top = max(counts.values())
    freq = {c: (counts[c] / top if top else 0.0) for c in inst.candidates}
    senses = profile.profiles.get(inst.acronym, {})
    sims = {c: 0.0 for c in inst.candidates}
    if alpha > 0 and senses:
        vec = profile.vectorize(context_terms(inst))
        if vec:
            sims = {c: cosine(vec, senses.get(c, {})) for c in inst.candidates}
    if alpha > 0 and not any(sims.values()):
        return predict_frequency(inst, table)
    return _argmax(inst.candidates, lambda c: alpha * sims[c] + (1 - alpha) * freq[c])


@dataclass(frozen=True)
class Prediction:
    id: str
    prediction: str
    low_confidence: bool = False

    def to_dict(self) -> dict:
        d = {"id": self.id, "prediction": self.prediction}
        if self.low_confidence:
            d["low_confidence"] = True
        return d


def predict_all(
    instances: Iterable[AdInstance],
    table: FrequencyTable,
    profile: Optional[ContextProfile] = None,
    alpha: float = 0.5,
) -> list[Prediction]:
    """Batch prediction; low confidence marks acronyms unseen in training."""
    out = []
    for inst in instances:
        if profile is None:
            pred = predict_frequency(inst, table)
        else:
            pred = predict_context(inst, profile, table, alpha)
        out.append(Prediction(inst.id, pred, not is_known(inst, table)))
    return out
