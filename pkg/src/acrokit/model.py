"""Core data types: sentences, BIO labels, spans, dictionaries, AD instances."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

_WS = re.compile(r"\s+")


class DataError(ValueError):
    """Raised for malformed records or violated data invariants."""

    def __init__(self, message: str, record_id: Optional[str] = None, field: Optional[str] = None):
        self.record_id = record_id
        self.field = field
        where = []
        if record_id is not None:
            where.append(f"record {record_id!r}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class SpanKind(str, enum.Enum):
    SHORT = "short"
    LONG = "long"

    @property
    def opposite(self) -> "SpanKind":
        return SpanKind.LONG if self is SpanKind.SHORT else SpanKind.SHORT


class BioLabel(str, enum.Enum):
    B_SHORT = "B-short"
    I_SHORT = "I-short"
    B_LONG = "B-long"
    I_LONG = "I-long"
    O = "O"

    @classmethod
    def parse(cls, value: str) -> "BioLabel":
        try:
            return cls(value)
        except ValueError:
            pass
        # tolerate underscore spellings such as B_short
        try:
            return cls(value.replace("_", "-"))
        except ValueError:
            raise ValueError(f"unknown BIO label {value!r}") from None

    @property
    def kind(self) -> Optional[SpanKind]:
        if self is BioLabel.O:
            return None
        return SpanKind(self.value.split("-", 1)[1])

    @property
    def is_begin(self) -> bool:
        return self.value.startswith("B-")

    @property
    def is_inside(self) -> bool:
        return self.value.startswith("I-")

    @classmethod
    def begin(cls, kind: SpanKind) -> "BioLabel":
        return cls.B_SHORT if kind is SpanKind.SHORT else cls.B_LONG

    @classmethod
    def inside(cls, kind: SpanKind) -> "BioLabel":
        return cls.I_SHORT if kind is SpanKind.SHORT else cls.I_LONG


def is_bio_valid(labels: Sequence[BioLabel]) -> bool:
    """True when every I- label continues a span of the same kind."""
    prev: Optional[BioLabel] = None
    for lab in labels:
        if lab.is_inside and (prev is None or prev.kind is not lab.kind):
            return False
        prev = lab
    return True


def repair_bio(labels: Sequence[BioLabel]) -> tuple[tuple[BioLabel, ...], int]:
    """Promote stray I- labels to B- (CoNLL convention).

    Returns the repaired labels and the number of positions changed.
    """
    out: list[BioLabel] = []
    fixes = 0
    for lab in labels:
        prev = out[-1] if out else None
        if lab.is_inside and (prev is None or prev.kind is not lab.kind):
            lab = BioLabel.begin(lab.kind)
            fixes += 1
        out.append(lab)
    return tuple(out), fixes


@dataclass(frozen=True)
class TokenSentence:
    id: str
    tokens: tuple[str, ...]
    labels: Optional[tuple[BioLabel, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise DataError("sentence has no tokens", self.id, "tokens")
        for i, tok in enumerate(self.tokens):
            if not isinstance(tok, str) or not tok:
                raise DataError(f"token {i} is empty or not a string", self.id, "tokens")
            if _WS.search(tok):
                raise DataError(f"token {i} contains whitespace: {tok!r}", self.id, "tokens")
        if self.labels is not None:
            labels = tuple(lab if isinstance(lab, BioLabel) else BioLabel.parse(lab) for lab in self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != len(self.tokens):
                raise DataError(
                    f"length mismatch: {len(self.tokens)} tokens vs {len(labels)} labels",
                    self.id,
                    "labels",
                )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def is_bio_valid(self) -> bool:
        return self.labels is None or is_bio_valid(self.labels)

    def with_labels(self, labels: Optional[Sequence[BioLabel]]) -> "TokenSentence":
        return TokenSentence(self.id, self.tokens, None if labels is None else tuple(labels))


@dataclass(frozen=True)
class SpanAnnotation:
    """A ``[start, end)`` token span. ``partner`` indexes the mapped span in the same list."""

    start: int
    end: int
    kind: SpanKind
    partner: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpanKind(self.kind))
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span bounds [{self.start}, {self.end})")

    def overlaps(self, other: "SpanAnnotation") -> bool:
        return self.start < other.end and other.start < self.end

    def text(self, tokens: Sequence[str]) -> str:
        return " ".join(tokens[self.start:self.end])


def extract_spans(sentence: TokenSentence) -> list[SpanAnnotation]:
    """Decode BIO labels into maximal ``B I*`` runs, one span each."""
    if sentence.labels is None:
        raise ValueError(f"sentence {sentence.id!r} has no labels")
    return labels_to_spans(sentence.labels)


def labels_to_spans(labels: Sequence[BioLabel]) -> list[SpanAnnotation]:
    if not is_bio_valid(labels):
        raise ValueError("label sequence is not BIO-valid; repair it first")
    spans: list[SpanAnnotation] = []
    start: Optional[int] = None
    kind: Optional[SpanKind] = None
    for i, lab in enumerate(labels):
        if lab.is_inside:
            continue
        if start is not None:
            spans.append(SpanAnnotation(start, i, kind))
            start = kind = None
        if lab.is_begin:
            start, kind = i, lab.kind
    if start is not None:
        spans.append(SpanAnnotation(start, len(labels), kind))
    return spans


def validate_spans(spans: Sequence[SpanAnnotation], n: Optional[int] = None) -> None:
    ordered = sorted(spans, key=lambda s: s.start)
    for a, b in zip(ordered, ordered[1:]):
        if a.overlaps(b):
            raise ValueError(f"overlapping spans [{a.start},{a.end}) and [{b.start},{b.end})")
    if n is not None and ordered and ordered[-1].end > n:
        raise ValueError(f"span [{ordered[-1].start},{ordered[-1].end}) exceeds {n} tokens")
    for i, s in enumerate(spans):
        if s.partner is None:
            continue
        if not 0 <= s.partner < len(spans) or s.partner == i:
            raise ValueError(f"span {i} has dangling partner {s.partner}")
        if spans[s.partner].kind is s.kind:
            raise ValueError(f"span {i} is partnered to a span of the same kind")


def spans_to_labels(spans: Sequence[SpanAnnotation], n: int) -> tuple[BioLabel, ...]:
    validate_spans(spans, n)
    labels = [BioLabel.O] * n
    for s in spans:
        labels[s.start] = BioLabel.begin(s.kind)
        for i in range(s.start + 1, s.end):
            labels[i] = BioLabel.inside(s.kind)
    return tuple(labels)


def normalize_long_form(text: str) -> str:
    """Lowercase, trim and collapse whitespace runs."""
    return _WS.sub(" ", text.strip().lower())


@dataclass(frozen=True)
class AcronymDictionary:
    """Acronym surface form -> sorted tuple of normalized long forms."""

    entries: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    case_sensitive: bool = True

    def __post_init__(self):
        clean: dict[str, tuple[str, ...]] = {}
        for acronym in sorted(self.entries):
            forms = sorted({normalize_long_form(lf) for lf in self.entries[acronym]})
            if not forms:
                raise DataError("acronym has no long forms", acronym)
            clean[acronym] = tuple(forms)
        object.__setattr__(self, "entries", clean)
        if not self.case_sensitive:
            folded: dict[str, str] = {}
            for acronym in clean:
                key = acronym.lower()
                if key in folded:
                    raise DataError(f"collides with {folded[key]!r} under case folding", acronym)
                folded[key] = acronym
            object.__setattr__(self, "_folded", folded)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], **kwargs) -> "AcronymDictionary":
        entries: dict[str, set[str]] = {}
        for acronym, long_form in pairs:
            entries.setdefault(acronym, set()).add(normalize_long_form(long_form))
        return cls({k: tuple(v) for k, v in entries.items()}, **kwargs)

    def resolve(self, token: str) -> Optional[str]:
        """Return the dictionary key matching ``token``, honouring case sensitivity."""
        if token in self.entries:
            return token
        if not self.case_sensitive:
            return self._folded.get(token.lower())
        return None

    def __contains__(self, token: str) -> bool:
        return self.resolve(token) is not None

    def __getitem__(self, token: str) -> tuple[str, ...]:
        key = self.resolve(token)
        if key is None:
            raise KeyError(token)
        return self.entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def ambiguous(self) -> "AcronymDictionary":
        return AcronymDictionary(
            {k: v for k, v in self.entries.items() if len(v) >= 2}, self.case_sensitive
        )

    def mean_senses(self) -> float:
        if not self.entries:
            return 0.0
        return sum(len(v) for v in self.entries.values()) / len(self.entries)


@dataclass(frozen=True)
class AdInstance:
    id: str
    sentence: TokenSentence
    acronym_index: int
    candidates: tuple[str, ...]
    gold: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not 0 <= self.acronym_index < len(self.sentence):
            raise DataError(f"acronym index {self.acronym_index} out of range", self.id, "acronym")
        if len(self.candidates) < 2:
            raise DataError("needs at least two candidate long forms", self.id, "candidates")
        if self.gold is not None and self.gold not in self.candidates:
            raise DataError(f"gold {self.gold!r} not among candidates", self.id, "label")

    @property
    def acronym(self) -> str:
        return self.sentence.tokens[self.acronym_index]


@dataclass(frozen=True)
class FrequencyTable:
    """Training occurrence counts keyed by ``(acronym, long form)``."""

    counts: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        for key, c in self.counts.items():
            if c < 0:
                raise DataError(f"negative count {c}", f"{key[0]}/{key[1]}")
        object.__setattr__(self, "counts", dict(sorted(self.counts.items())))

    def count(self, acronym: str, long_form: str) -> int:
        return self.counts.get((acronym, long_form), 0)

    def acronyms(self) -> set[str]:
        return {a for a, _ in self.counts}

    def check_against(self, dictionary: AcronymDictionary) -> None:
        for acronym, long_form in self.counts:
            if acronym not in dictionary or long_form not in dictionary[acronym]:
                raise DataError(f"({acronym!r}, {long_form!r}) not in dictionary")
