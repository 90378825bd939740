"""Seeded synthetic data for tests, property checks and demos."""

from __future__ import annotations

import random
from typing import Optional

from .formats import Document, tokenize
from .model import (
    AdInstance,
    BioLabel,
    SpanAnnotation,
    SpanKind,
    TokenSentence,
    spans_to_labels,
)

WORDS = (
    "model network learning method data feature graph neural deep sparse vector "
    "machine support random field conditional kernel gradient descent stochastic "
    "attention memory short long term recurrent convolutional layer batch norm "
    "language natural processing transfer adversarial generative policy reward "
    "signal noise ratio mean square error root average precision recall"
).split()

FILLER = "the a of in we this that is are for with on by our results show use".split()


def random_labels(rng: random.Random, n: int) -> list[BioLabel]:
    """A random BIO-valid label sequence of length ``n``."""
    labels: list[BioLabel] = []
    for _ in range(n):
        prev = labels[-1] if labels else BioLabel.O
        choices = [BioLabel.O, BioLabel.O, BioLabel.O, BioLabel.B_SHORT, BioLabel.B_LONG]
        if prev.kind is not None:
            choices += [BioLabel.inside(prev.kind)] * 2
        labels.append(rng.choice(choices))
    return labels


def random_ai_pair(rng: random.Random, size: int) -> tuple[list[TokenSentence], list[TokenSentence]]:
    """Gold sentences plus a noisy prediction for each (perturbed labels)."""
    gold, pred = [], []
    for k in range(size):
        n = rng.randint(1, 12)
        tokens = [rng.choice(WORDS) for _ in range(n)]
        g = random_labels(rng, n)
        if rng.random() < 0.5:
            p = list(g)
        else:
            p = random_labels(rng, n)
        gold.append(TokenSentence(f"s{k}", tokens, g))
        pred.append(TokenSentence(f"s{k}", tokens, p))
    rng.shuffle(pred)
    return gold, pred


def _long_form(rng: random.Random, k: int) -> list[str]:
    return rng.sample(WORDS, k)


def random_senses(rng: random.Random, n_acronyms: int = 6) -> dict[str, tuple[str, ...]]:
    senses = {}
    for a in range(n_acronyms):
        m = rng.randint(2, 4)
        senses[f"AC{a}"] = tuple(sorted({" ".join(_long_form(rng, 3)) for _ in range(m)} | {f"sense {a} x"}))
    return senses


def random_ad_instances(
    rng: random.Random, size: int, senses: dict[str, tuple[str, ...]], prefix: str = "d"
) -> list[AdInstance]:
    """Instances with skewed gold senses (weights halve per candidate)."""
    out = []
    for k in range(size):
        acronym = rng.choice(sorted(senses))
        cands = senses[acronym]
        tokens = [rng.choice(FILLER) for _ in range(rng.randint(0, 5))]
        idx = len(tokens)
        tokens.append(acronym)
        tokens += [rng.choice(WORDS) for _ in range(rng.randint(0, 5))]
        gold = rng.choices(cands, [2.0 ** -i for i in range(len(cands))])[0]
        out.append(AdInstance(f"{prefix}{k}", TokenSentence(f"{prefix}{k}", tokens), idx, cands, gold))
    return out


def random_ad_pair(
    rng: random.Random, size: int, n_acronyms: int = 6
) -> tuple[list[AdInstance], dict[str, str]]:
    """Gold instances plus predictions that are right about 60% of the time or better."""
    gold = random_ad_instances(rng, size, random_senses(rng, n_acronyms))
    pred = {g.id: g.gold if rng.random() < 0.6 else rng.choice(g.candidates) for g in gold}
    return gold, pred


def parenthetical_sentence(rng: random.Random, k: int = 0) -> TokenSentence:
    """A sentence holding one ``LF ( ACR )`` or ``ACR ( LF )`` construction plus noise."""
    words = _long_form(rng, rng.randint(2, 4))
    if rng.random() < 0.2:
        words[rng.randrange(len(words))] = rng.choice(FILLER)
    acronym = "".join(w[0].upper() for w in words if rng.random() < 0.9) or words[0][:2].upper()
    if len(acronym) < 2:
        acronym = acronym + rng.choice("XYZ")
    if rng.random() < 0.3:
        acronym += "s"
    pre = [rng.choice(FILLER + list(WORDS)) for _ in range(rng.randint(0, 6))]
    post = [rng.choice(FILLER) for _ in range(rng.randint(0, 4))]
    if rng.random() < 0.2:
        post.append(rng.choice(["HMM", "GPU", "NLP"]))
    if rng.random() < 0.6:
        body = words + ["(", acronym, ")"]
    else:
        body = [acronym, "("] + words + [")"]
    if rng.random() < 0.1:
        body = body[:-1]  # unbalanced
    return TokenSentence(f"p{k}", pre + body + post)


def _labeled(sid: str, text: str, spans: Optional[list[tuple[int, int, SpanKind]]] = None) -> TokenSentence:
    tokens = tokenize(text)
    labels = None
    if spans is not None:
        labels = spans_to_labels([SpanAnnotation(a, b, k) for a, b, k in spans], len(tokens))
    return TokenSentence(sid, tokens, labels)


S, L = SpanKind.SHORT, SpanKind.LONG


def pipeline_fixture() -> list[Document]:
    """Three documents whose silver-AD counts are fixed by construction.

    Dictionary: CNN -> {cable news network, convolutional neural network},
    SVM -> {scalable vector machine, support vector machine}.
    Instances: doc-a gives 3 CNN; doc-b gives 1 CNN and 1 SVM; doc-c defines
    CNN both ways (no CNN instances) and gives 1 SVM. Total 6.
    """
    doc_a = Document(
        "doc-a",
        (
            _labeled("a0", "We train a convolutional neural network (CNN) on images.", [(3, 6, L), (7, 8, S)]),
            _labeled("a1", "The CNN has five layers.", [(1, 2, S)]),
            _labeled("a2", "Outputs of the CNN are good and the CNN is fast.", [(3, 4, S), (8, 9, S)]),
            _labeled("a3", "We also fit a support vector machine (SVM).", [(4, 7, L), (8, 9, S)]),
            _labeled("a4", "the weather was nice that day.", []),
        ),
    )
    doc_b = Document(
        "doc-b",
        (
            _labeled("b0", "Reports from the cable news network (CNN) differ.", [(3, 6, L), (7, 8, S)]),
            _labeled("b1", "CNN aired the debate.", [(0, 1, S)]),
            _labeled("b2", "An SVM (scalable vector machine) is proposed.", [(1, 2, S), (3, 6, L)]),
            _labeled("b3", "The SVM scales well.", [(1, 2, S)]),
        ),
    )
    doc_c = Document(
        "doc-c",
        (
            _labeled("c0", "A convolutional neural network (CNN) is used here."),
            _labeled("c1", "Unlike the cable news network (CNN) coverage."),
            _labeled("c2", "The CNN again."),
            _labeled("c3", "Also SVM (support vector machine) is used."),
            _labeled("c4", "That SVM works."),
        ),
    )
    return [doc_a, doc_b, doc_c]
