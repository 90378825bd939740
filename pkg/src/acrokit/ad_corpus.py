"""Ambiguous-acronym dictionary induction and silver AD corpus generation."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .formats import Document
from .identification import acronym_letters, identify
from .model import (
    AcronymDictionary,
    AdInstance,
    SpanAnnotation,
    SpanKind,
    TokenSentence,
    extract_spans,
    normalize_long_form,
)

log = logging.getLogger(__name__)

__all__ = [
    "Document",
    "GenerationReport",
    "LocalDefinition",
    "build_dictionary",
    "find_local_definitions",
    "generate_silver_ad",
    "mapped_pairs",
    "pair_spans",
]

Annotated = Union[TokenSentence, tuple[TokenSentence, Sequence[SpanAnnotation]]]


def _spells(acronym: str, long_form_tokens: Sequence[str]) -> bool:
    letters = acronym_letters(acronym) or "".join(c.lower() for c in acronym if c.isalnum())
    if not letters or not long_form_tokens or not long_form_tokens[0]:
        return False
    text = "".join(long_form_tokens).lower()
    if text[0] != letters[0]:
        return False
    it = iter(text)
    return all(c in it for c in letters)


def pair_spans(sentence: TokenSentence, spans: Sequence[SpanAnnotation]) -> list[SpanAnnotation]:
    """Link unpartnered long forms to short forms in the same sentence.

    Gold BIO files carry no mapping, so a long form is paired with the nearest
    free short form whose uppercase letters it spells (first letter at the
    start of the long form). A sentence with exactly one span of each kind is
    paired unconditionally. Existing partner links are kept.
    """
    spans = list(spans)
    shorts = [i for i, s in enumerate(spans) if s.kind is SpanKind.SHORT and s.partner is None]
    longs = [i for i, s in enumerate(spans) if s.kind is SpanKind.LONG and s.partner is None]
    links: dict[int, int] = {}
    if len(shorts) == 1 and len(longs) == 1 and not any(s.partner is not None for s in spans):
        links[longs[0]] = shorts[0]
    else:
        options = []
        for li in longs:
            lf = spans[li]
            lf_tokens = sentence.tokens[lf.start:lf.end]
            for si in shorts:
                sf = spans[si]
                if _spells(sentence.tokens[sf.start], lf_tokens):
                    gap = sf.start - lf.end if sf.start >= lf.end else lf.start - sf.end
                    options.append((gap, lf.start, sf.start, li, si))
        used_l: set[int] = set()
        used_s: set[int] = set()
        for _, _, _, li, si in sorted(options):
            if li in used_l or si in used_s:
                continue
            links[li] = si
            used_l.add(li)
            used_s.add(si)
    out = []
    reverse = {si: li for li, si in links.items()}
    for i, s in enumerate(spans):
        partner = s.partner
        if i in links:
            partner = links[i]
        elif i in reverse:
            partner = reverse[i]
        out.append(SpanAnnotation(s.start, s.end, s.kind, partner))
    return out


def _annotations(item: Annotated, auto_annotate: bool) -> Optional[tuple[TokenSentence, list[SpanAnnotation]]]:
    if isinstance(item, TokenSentence):
        if item.labels is not None:
            return item, pair_spans(item, extract_spans(item))
        if auto_annotate:
            return item, identify(item)
        return None
    sentence, spans = item
    return sentence, pair_spans(sentence, spans)


def mapped_pairs(item: Annotated, auto_annotate: bool = False) -> list[tuple[str, str]]:
    """(acronym surface, normalized long form) for every partnered short form."""
    ann = _annotations(item, auto_annotate)
    if ann is None:
        return []
    sentence, spans = ann
    pairs = []
    for s in spans:
        if s.kind is SpanKind.SHORT and s.partner is not None:
            lf = spans[s.partner]
            pairs.append((s.text(sentence.tokens), normalize_long_form(lf.text(sentence.tokens))))
    return pairs


def build_dictionary(
    annotated: Iterable[Annotated],
    ambiguous_only: bool = True,
    auto_annotate: bool = False,
    case_sensitive: bool = True,
) -> AcronymDictionary:
    """Collect acronym -> long forms from mapped annotations.

    Items are labeled sentences (spans decoded and paired) or explicit
    ``(sentence, spans)`` tuples. Unlabeled sentences are skipped unless
    ``auto_annotate`` runs the rule-based identifier on them.
    """
    pairs = [p for item in annotated for p in mapped_pairs(item, auto_annotate)]
    full = AcronymDictionary.from_pairs(pairs, case_sensitive=case_sensitive)
    return full.ambiguous() if ambiguous_only else full


@dataclass(frozen=True)
class LocalDefinition:
    sentence_id: str
    acronym: str
    long_form: str


def _contains_run(tokens: Sequence[str], run: Sequence[str]) -> bool:
    k = len(run)
    return any(list(tokens[i:i + k]) == list(run) for i in range(len(tokens) - k + 1))


def find_local_definitions(doc: Document, dictionary: AcronymDictionary) -> list[LocalDefinition]:
    """Sentences where a dictionary acronym co-occurs with one of its long forms."""
    out = []
    for s in doc.sentences:
        lowered = [t.lower() for t in s.tokens]
        seen: set[tuple[str, str]] = set()
        for tok in s.tokens:
            key = dictionary.resolve(tok)
            if key is None:
                continue
            for lf in dictionary.entries[key]:
                if (key, lf) in seen:
                    continue
                if _contains_run(lowered, lf.split(" ")):
                    seen.add((key, lf))
                    out.append(LocalDefinition(s.id, key, lf))
    return out


@dataclass
class GenerationReport:
    documents: int = 0
    definitions: int = 0
    instances_per_acronym: Counter = field(default_factory=Counter)
    instances_per_long_form: Counter = field(default_factory=Counter)
    conflicts: list[dict] = field(default_factory=list)

    @property
    def instances(self) -> int:
        return sum(self.instances_per_acronym.values())

    def merge(self, other: "GenerationReport") -> None:
        self.documents += other.documents
        self.definitions += other.definitions
        self.instances_per_acronym.update(other.instances_per_acronym)
        self.instances_per_long_form.update(other.instances_per_long_form)
        self.conflicts.extend(other.conflicts)

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "local_definitions": self.definitions,
            "instances": self.instances,
            "instances_per_acronym": dict(sorted(self.instances_per_acronym.items())),
            "instances_per_long_form": {
                f"{a}\t{lf}": c for (a, lf), c in sorted(self.instances_per_long_form.items())
            },
            "conflicts": self.conflicts,
        }


def generate_document(
    doc: Document, dictionary: AcronymDictionary, direction: str = "both"
) -> tuple[list[AdInstance], GenerationReport]:
    """Propagate local definitions within one document.

    ``direction="forward"`` only annotates sentences after the first defining
    sentence; ``"both"`` annotates the whole document.
    """
    if direction not in ("both", "forward"):
        raise ValueError(f"unknown direction {direction!r}")
    report = GenerationReport(documents=1)
    defs = find_local_definitions(doc, dictionary)
    report.definitions = len(defs)
    senses: dict[str, set[str]] = defaultdict(set)
    defining: dict[str, set[str]] = defaultdict(set)
    for d in defs:
        senses[d.acronym].add(d.long_form)
        defining[d.acronym].add(d.sentence_id)

    resolved: dict[str, str] = {}
    for acronym in sorted(senses):
        forms = senses[acronym]
        if len(forms) > 1:
            report.conflicts.append(
                {"doc_id": doc.doc_id, "acronym": acronym, "long_forms": sorted(forms)}
            )
            log.info("document %s: conflicting definitions of %s, skipped", doc.doc_id, acronym)
            continue
        resolved[acronym] = next(iter(forms))

    position = {s.id: k for k, s in enumerate(doc.sentences)}
    first_def = {a: min(position[sid] for sid in defining[a]) for a in resolved}
    instances = []
    for k, s in enumerate(doc.sentences):
        for idx, tok in enumerate(s.tokens):
            key = dictionary.resolve(tok)
            if key not in resolved or s.id in defining[key]:
                continue
            if direction == "forward" and k < first_def[key]:
                continue
            gold = resolved[key]
            instances.append(
                AdInstance(
                    f"{doc.doc_id}:{s.id}:{idx}",
                    TokenSentence(s.id, s.tokens),
                    idx,
                    dictionary.entries[key],
                    gold,
                )
            )
            report.instances_per_acronym[key] += 1
            report.instances_per_long_form[(key, gold)] += 1
    return instances, report


def generate_silver_ad(
    corpus: Iterable[Document],
    dictionary: AcronymDictionary,
    direction: str = "both",
    report: Optional[GenerationReport] = None,
) -> list[AdInstance]:
    """Silver AD instances for every document, in corpus order.

    Pass a ``GenerationReport`` to collect counts and conflicts.
    """
    out: list[AdInstance] = []
    for doc in corpus:
        instances, doc_report = generate_document(doc, dictionary, direction)
        out.extend(instances)
        if report is not None:
            report.merge(doc_report)
    return out
