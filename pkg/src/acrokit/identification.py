"""Rule-based acronym and long-form detection.

Two rule sets live here. The candidate rules decide which raw sentences are
worth annotating at all; the baseline identifier labels acronyms and long
forms using the ``long form (ACR)`` / ``ACR (long form)`` patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import SpanAnnotation, SpanKind, TokenSentence, spans_to_labels

OPEN_PAREN = "("
CLOSE_PAREN = ")"


@dataclass(frozen=True)
class IdentifierConfig:
    """Thresholds for the acronym rules.

    ``strict`` selects ``>`` against the uppercase-ratio threshold; otherwise ``>=``.
    """

    uppercase_ratio_threshold: float = 0.6
    strict: bool = True
    min_acronym_length: int = 2
    relaxed_mode: bool = False
    max_longform_prefix: int = 3
    max_paren_distance: int = 2

    def __post_init__(self):
        if not 0 < self.uppercase_ratio_threshold <= 1:
            raise ValueError("uppercase_ratio_threshold must lie in (0, 1]")
        if self.min_acronym_length < 1:
            raise ValueError("min_acronym_length must be >= 1")
        if self.max_longform_prefix < 1:
            raise ValueError("max_longform_prefix must be >= 1")
        if self.max_paren_distance < 1:
            raise ValueError("max_paren_distance must be >= 1")

    @classmethod
    def baseline(cls, relaxed: bool = False) -> "IdentifierConfig":
        return cls(0.6, strict=True, relaxed_mode=relaxed)

    @classmethod
    def candidate(cls) -> "IdentifierConfig":
        return cls(0.5, strict=False)


def uppercase_ratio(token: str) -> float:
    return sum(c.isupper() for c in token) / len(token)


def is_candidate_acronym(token: str, cfg: Optional[IdentifierConfig] = None) -> bool:
    """Uppercase letters over all characters, compared against the threshold."""
    if cfg is None:
        cfg = IdentifierConfig.candidate()
    if len(token) < cfg.min_acronym_length or not any(c.isalpha() for c in token):
        return False
    ratio = uppercase_ratio(token)
    if cfg.strict:
        return ratio > cfg.uppercase_ratio_threshold
    return ratio >= cfg.uppercase_ratio_threshold


def window_size(acronym: str) -> int:
    return min(len(acronym) + 5, 2 * len(acronym))


# -- candidate long forms ---------------------------------------------------


def _segments(token: str) -> list[str]:
    return token.lower().split("-")


def _prefix_steps(token: str, k: int, pos: int, target: str) -> set[int]:
    """Target positions reachable after consuming prefixes of ``token``.

    The first hyphen segment must contribute 1..k characters; later segments
    contribute 0..k.
    """
    reach = {pos}
    for n, seg in enumerate(_segments(token)):
        lo = 1 if n == 0 else 0
        nxt: set[int] = set()
        for p in reach:
            if lo == 0:
                nxt.add(p)
            for size in range(1, min(k, len(seg)) + 1):
                if target.startswith(seg[:size], p):
                    nxt.add(p + size)
        reach = nxt
        if not reach:
            break
    return reach


def prefixes_form(tokens: Sequence[str], acronym: str, k: int = 3) -> bool:
    """True if 1..k leading characters of each token concatenate to ``acronym``."""
    target = acronym.lower()
    reach = {0}
    for tok in tokens:
        reach = set().union(*(_prefix_steps(tok, k, p, target) for p in reach)) if reach else set()
        if not reach:
            return False
    return len(target) in reach


def find_candidate_long_forms(
    sentence: TokenSentence,
    acronym_positions: Iterable[int],
    cfg: Optional[IdentifierConfig] = None,
) -> list[SpanAnnotation]:
    """Maximal token runs whose prefixes spell one of the given acronyms.

    Runs never include the acronym token they spell. Candidates for different
    acronyms may overlap; these are filtering hints, not annotations.
    """
    if cfg is None:
        cfg = IdentifierConfig.candidate()
    tokens = sentence.tokens
    n = len(tokens)
    runs: set[tuple[int, int]] = set()
    for t in sorted(set(acronym_positions)):
        target = tokens[t].lower()
        for j in range(n):
            reach = {0}
            for i in range(j, n):
                if i == t:
                    break
                reach = set().union(*(_prefix_steps(tokens[i], cfg.max_longform_prefix, p, target) for p in reach))
                if not reach:
                    break
                if len(target) in reach:
                    runs.add((j, i + 1))
    maximal = [
        r for r in runs if not any(o != r and o[0] <= r[0] and r[1] <= o[1] for o in runs)
    ]
    return [SpanAnnotation(a, b, SpanKind.LONG) for a, b in sorted(maximal)]


def has_candidate(sentence: TokenSentence, cfg: Optional[IdentifierConfig] = None) -> bool:
    if cfg is None:
        cfg = IdentifierConfig.candidate()
    # a candidate long form needs a candidate acronym in the same sentence,
    # so the acronym test alone decides
    return any(is_candidate_acronym(tok, cfg) for tok in sentence.tokens)


def filter_sentences(
    corpus: Iterable[TokenSentence], cfg: Optional[IdentifierConfig] = None
) -> list[TokenSentence]:
    """Keep sentences holding a candidate acronym or long form, in order."""
    return [s for s in corpus if has_candidate(s, cfg)]


# -- baseline identifier ----------------------------------------------------


def _initial_flags(token: str) -> list[bool]:
    flags = []
    prev = None
    for i, c in enumerate(token):
        flags.append(i == 0 or prev == "-")
        prev = c
    return flags


def _match_scores(letters: str, tokens: Sequence[str]) -> list[Optional[int]]:
    """For each prefix ``tokens[:b]``, the best count of letters landing on word
    initials over all subsequence alignments, or None when no alignment exists.

    The first letter is pinned to the first character of ``tokens[0]``.
    """
    m = len(letters)
    dp: list[Optional[int]] = [0] + [None] * m
    out: list[Optional[int]] = []
    first = True
    for tok in tokens:
        for ch, initial in zip(tok, _initial_flags(tok)):
            c = ch.lower()
            for j in range(m - 1, -1, -1):
                if dp[j] is None or letters[j] != c or (j == 0 and not first):
                    continue
                score = dp[j] + initial
                if dp[j + 1] is None or score > dp[j + 1]:
                    dp[j + 1] = score
            first = False
        out.append(dp[m])
    return out


def acronym_letters(acronym: str) -> str:
    return "".join(c.lower() for c in acronym if c.isupper())


def match_long_form(
    acronym: str, window_tokens: Sequence[str], anchor_at_end: bool = True
) -> Optional[tuple[int, int]]:
    """Find the token sub-range of the window that spells the acronym.

    A range qualifies when the acronym's uppercase characters occur in order
    (case-insensitively) in its characters, the first one being the first
    character of the range. Among qualifying ranges the winner maximizes the
    letters aligned to word initials, then is shortest, then sits closest to
    the acronym (the window end when ``anchor_at_end``, else its start).

    Returns ``(start, end)`` relative to the window, or None.
    """
    letters = acronym_letters(acronym)
    if not letters:
        return None
    w = len(window_tokens)
    best_key = None
    best = None
    for a in range(w):
        if not window_tokens[a] or window_tokens[a][0].lower() != letters[0]:
            continue
        for offset, score in enumerate(_match_scores(letters, window_tokens[a:])):
            if score is None:
                continue
            b = a + offset + 1
            distance = w - b if anchor_at_end else a
            key = (-score, b - a, distance)
            if best_key is None or key < best_key:
                best_key, best = key, (a, b)
    return best


def _paren_contexts(tokens: Sequence[str], i: int, cfg: IdentifierConfig) -> list[tuple[str, int]]:
    """Parenthetical patterns the token at ``i`` takes part in.

    ``("before", o)``: the token sits inside parentheses opened at ``o``; the
    long form is sought before ``o``. ``("after", o)``: the token directly
    precedes the parenthesis at ``o``; the long form is sought after it.
    """
    out = []
    for o in range(i - 1, max(-1, i - cfg.max_paren_distance - 1), -1):
        if tokens[o] == CLOSE_PAREN:
            break
        if tokens[o] == OPEN_PAREN:
            if CLOSE_PAREN in tokens[i + 1:]:
                out.append(("before", o))
            break
    if i + 1 < len(tokens) and tokens[i + 1] == OPEN_PAREN:
        out.append(("after", i + 1))
    return out


def _is_barrier(tok: str) -> bool:
    return tok in (OPEN_PAREN, CLOSE_PAREN)


def identify(sentence: TokenSentence, cfg: Optional[IdentifierConfig] = None) -> list[SpanAnnotation]:
    """Label acronyms and their long forms with the parenthetical-pattern rules."""
    if cfg is None:
        cfg = IdentifierConfig.baseline()
    tokens = sentence.tokens
    n = len(tokens)
    taken = [False] * n
    spans: list[SpanAnnotation] = []

    for i, tok in enumerate(tokens):
        if taken[i] or not is_candidate_acronym(tok, cfg):
            continue
        contexts = _paren_contexts(tokens, i, cfg)
        if not contexts:
            continue
        taken[i] = True
        short_idx = len(spans)
        spans.append(SpanAnnotation(i, i + 1, SpanKind.SHORT))
        w = window_size(tok)
        for pattern, o in contexts:
            if pattern == "before":
                lo = o
                while lo > max(0, o - w) and not taken[lo - 1] and not _is_barrier(tokens[lo - 1]):
                    lo -= 1
                rng = match_long_form(tok, tokens[lo:o], anchor_at_end=True)
                base = lo
            else:
                hi = o + 1
                while hi < min(n, o + 1 + w) and not taken[hi] and not _is_barrier(tokens[hi]):
                    hi += 1
                rng = match_long_form(tok, tokens[o + 1:hi], anchor_at_end=False)
                base = o + 1
            if rng is None:
                continue
            a, b = base + rng[0], base + rng[1]
            for k in range(a, b):
                taken[k] = True
            spans[short_idx] = SpanAnnotation(i, i + 1, SpanKind.SHORT, len(spans))
            spans.append(SpanAnnotation(a, b, SpanKind.LONG, short_idx))
            break

    if cfg.relaxed_mode:
        for i, tok in enumerate(tokens):
            if not taken[i] and is_candidate_acronym(tok, cfg):
                taken[i] = True
                spans.append(SpanAnnotation(i, i + 1, SpanKind.SHORT))

    return _sorted_with_partners(spans)


def _sorted_with_partners(spans: list[SpanAnnotation]) -> list[SpanAnnotation]:
    order = sorted(range(len(spans)), key=lambda k: spans[k].start)
    new_index = {old: new for new, old in enumerate(order)}
    return [
        SpanAnnotation(
            spans[old].start,
            spans[old].end,
            spans[old].kind,
            None if spans[old].partner is None else new_index[spans[old].partner],
        )
        for old in order
    ]


def label_sentence(sentence: TokenSentence, cfg: Optional[IdentifierConfig] = None) -> TokenSentence:
    """Return a copy of ``sentence`` carrying the identifier's BIO labels."""
    return sentence.with_labels(spans_to_labels(identify(sentence, cfg), len(sentence)))
