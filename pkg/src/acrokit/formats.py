"""Reading and writing the shared-task JSON formats.

AI files hold records ``{"id", "tokens", "labels"}``; AD files hold
``{"id", "tokens", "acronym", "label"}`` where ``acronym`` is a token index.
Both may be a JSON array or newline-delimited JSON.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from .model import (
    AcronymDictionary,
    AdInstance,
    BioLabel,
    DataError,
    FrequencyTable,
    SpanAnnotation,
    SpanKind,
    TokenSentence,
    normalize_long_form,
    repair_bio,
)

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

_EDGE_PUNCT = "()[],."
_OPENERS = "(["


def tokenize(text: str) -> list[str]:
    """Split on whitespace, then peel leading/trailing brackets, commas and periods."""
    out: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        trail: list[str] = []
        while len(chunk) > 1 and chunk[0] in _OPENERS:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while len(chunk) > 1 and chunk[-1] in _EDGE_PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        out.append(chunk)
        out.extend(reversed(trail))
    return out


def read_records(path: PathLike) -> list[dict]:
    """Read a JSON array or JSON-lines file into a list of objects."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.strip()
    if not stripped:
        return []
    if stripped[0] == "[":
        try:
            records = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: invalid JSON: {e}") from None
    else:
        records = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON: {e}", f"line {lineno}") from None
    for i, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise DataError("record is not a JSON object", f"#{i}")
    return records


def write_json(path: PathLike, obj: Any) -> None:
    Path(path).write_text(json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def _record_id(rec: dict, i: int) -> str:
    rid = rec.get("id")
    return str(rid) if rid is not None else f"#{i}"


def _string_list(rec: dict, key: str, rid: str) -> list[str]:
    value = rec.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise DataError("expected an array of strings", rid, key)
    return value


# -- AI ---------------------------------------------------------------------


def sentence_from_record(rec: dict, i: int = 0, require_labels: bool = True) -> TokenSentence:
    rid = _record_id(rec, i)
    if "tokens" not in rec and isinstance(rec.get("text"), str):
        tokens = tokenize(rec["text"])
    else:
        tokens = _string_list(rec, "tokens", rid)
    labels = None
    if "labels" in rec and rec["labels"] is not None:
        raw = _string_list(rec, "labels", rid)
        if len(raw) != len(tokens):
            raise DataError(
                f"length mismatch: {len(tokens)} tokens vs {len(raw)} labels", rid, "labels"
            )
        try:
            parsed = [BioLabel.parse(v) for v in raw]
        except ValueError as e:
            raise DataError(str(e), rid, "labels") from None
        labels, fixes = repair_bio(parsed)
        if fixes:
            log.warning("record %s: repaired %d stray I- label(s) to B-", rid, fixes)
    elif require_labels:
        raise DataError("missing labels", rid, "labels")
    return TokenSentence(rid, tokens, labels)


def sentence_to_record(s: TokenSentence) -> dict:
    rec: dict = {"id": s.id, "tokens": list(s.tokens)}
    if s.labels is not None:
        rec["labels"] = [lab.value for lab in s.labels]
    return rec


def load_ai_dataset(path: PathLike, require_labels: bool = True) -> list[TokenSentence]:
    """Load an AI-format file; stray I- labels are repaired with a warning."""
    sentences = [sentence_from_record(rec, i, require_labels) for i, rec in enumerate(read_records(path))]
    _check_unique([s.id for s in sentences], path)
    return sentences


def save_ai_dataset(path: PathLike, sentences: Iterable[TokenSentence]) -> None:
    write_json(path, [sentence_to_record(s) for s in sentences])


def _check_unique(ids: Sequence[str], path: PathLike) -> None:
    seen: set[str] = set()
    for rid in ids:
        if rid in seen:
            raise DataError(f"{path}: duplicate id", rid, "id")
        seen.add(rid)


# -- spans ------------------------------------------------------------------


def span_to_dict(span: SpanAnnotation) -> dict:
    return {"start": span.start, "end": span.end, "kind": span.kind.value, "partner": span.partner}


def span_from_dict(d: dict) -> SpanAnnotation:
    return SpanAnnotation(int(d["start"]), int(d["end"]), SpanKind(d["kind"]), d.get("partner"))


# -- AD ---------------------------------------------------------------------


def instance_to_record(inst: AdInstance, with_candidates: bool = False) -> dict:
    rec: dict = {"id": inst.id, "tokens": list(inst.sentence.tokens), "acronym": inst.acronym_index}
    if inst.gold is not None:
        rec["label"] = inst.gold
    if with_candidates:
        rec["candidates"] = list(inst.candidates)
    return rec


def instance_from_record(
    rec: dict, i: int = 0, dictionary: Optional[AcronymDictionary] = None
) -> AdInstance:
    rid = _record_id(rec, i)
    tokens = _string_list(rec, "tokens", rid)
    index = rec.get("acronym")
    if not isinstance(index, int) or isinstance(index, bool):
        raise DataError("expected an integer token index", rid, "acronym")
    sentence = TokenSentence(rid, tokens)
    if not 0 <= index < len(tokens):
        raise DataError(f"acronym index {index} out of range", rid, "acronym")
    if "candidates" in rec:
        candidates = _string_list(rec, "candidates", rid)
    elif dictionary is not None:
        if tokens[index] not in dictionary:
            raise DataError(f"acronym {tokens[index]!r} not in dictionary", rid, "acronym")
        candidates = list(dictionary[tokens[index]])
    else:
        raise DataError("no candidates in record and no dictionary given", rid, "candidates")
    gold = rec.get("label", rec.get("expansion"))
    if gold is not None:
        if not isinstance(gold, str):
            raise DataError("expected a string", rid, "label")
        # released files may carry un-normalized long forms
        if gold not in candidates:
            norm = normalize_long_form(gold)
            match = [c for c in candidates if normalize_long_form(c) == norm]
            if match:
                gold = match[0]
    return AdInstance(rid, sentence, index, tuple(candidates), gold)


def load_ad_dataset(path: PathLike, dictionary: Optional[AcronymDictionary] = None) -> list[AdInstance]:
    instances = [instance_from_record(rec, i, dictionary) for i, rec in enumerate(read_records(path))]
    _check_unique([inst.id for inst in instances], path)
    return instances


def save_ad_dataset(path: PathLike, instances: Iterable[AdInstance], with_candidates: bool = False) -> None:
    write_json(path, [instance_to_record(inst, with_candidates) for inst in instances])


# -- dictionary / frequency table ------------------------------------------


def dictionary_to_json(d: AcronymDictionary) -> dict:
    return {k: list(v) for k, v in d.entries.items()}


def dictionary_from_json(obj: Any, case_sensitive: bool = True) -> AcronymDictionary:
    if not isinstance(obj, dict):
        raise DataError("dictionary file must hold a JSON object")
    for k, v in obj.items():
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise DataError("expected an array of long-form strings", k)
    return AcronymDictionary({k: tuple(v) for k, v in obj.items()}, case_sensitive)


def load_dictionary(path: PathLike, case_sensitive: bool = True) -> AcronymDictionary:
    return dictionary_from_json(json.loads(Path(path).read_text(encoding="utf-8")), case_sensitive)


def save_dictionary(path: PathLike, d: AcronymDictionary) -> None:
    write_json(path, dictionary_to_json(d))


def frequency_to_json(table: FrequencyTable) -> dict:
    out: dict[str, dict[str, int]] = {}
    for (acronym, long_form), c in table.counts.items():
        out.setdefault(acronym, {})[long_form] = c
    return out


def frequency_from_json(obj: Any) -> FrequencyTable:
    if not isinstance(obj, dict):
        raise DataError("frequency file must hold a JSON object")
    counts: dict[tuple[str, str], int] = {}
    for acronym, senses in obj.items():
        if not isinstance(senses, dict):
            raise DataError("expected an object of long form -> count", acronym)
        for long_form, c in senses.items():
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise DataError(f"bad count for {long_form!r}", acronym)
            counts[(acronym, long_form)] = c
    return FrequencyTable(counts)


def load_frequency(path: PathLike) -> FrequencyTable:
    return frequency_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def save_frequency(path: PathLike, table: FrequencyTable) -> None:
    write_json(path, frequency_to_json(table))


# -- documents --------------------------------------------------------------


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[TokenSentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        seen: set[str] = set()
        for s in self.sentences:
            if s.id in seen:
                raise DataError("duplicate sentence id in document", self.doc_id, s.id)
            seen.add(s.id)


def document_from_record(rec: dict, i: int = 0) -> Document:
    doc_id = rec.get("doc_id", rec.get("id"))
    doc_id = str(doc_id) if doc_id is not None else f"#{i}"
    raw = rec.get("sentences")
    if not isinstance(raw, list):
        raise DataError("expected an array of sentence objects", doc_id, "sentences")
    sentences = []
    for j, srec in enumerate(raw):
        if isinstance(srec, str):
            srec = {"text": srec}
        if not isinstance(srec, dict):
            raise DataError(f"sentence {j} is not an object", doc_id, "sentences")
        srec = dict(srec)
        srec.setdefault("id", f"{doc_id}-{j}")
        sentences.append(sentence_from_record(srec, j, require_labels=False))
    return Document(doc_id, tuple(sentences))


def document_to_record(doc: Document) -> dict:
    return {"doc_id": doc.doc_id, "sentences": [sentence_to_record(s) for s in doc.sentences]}


def load_documents(path: PathLike) -> list[Document]:
    docs = [document_from_record(rec, i) for i, rec in enumerate(read_records(path))]
    _check_unique([d.doc_id for d in docs], path)
    return docs


def save_documents(path: PathLike, docs: Iterable[Document]) -> None:
    write_json(path, [document_to_record(d) for d in docs])
