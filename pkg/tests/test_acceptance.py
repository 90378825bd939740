"""Acceptance criteria, one test per criterion.

The dataset-backed criteria read the public splits from two directories:

* ``ACROKIT_SCIAI_DIR`` with ``train.json`` / ``dev.json`` (optionally a
  labeled ``test.json``) in the identification format;
* ``ACROKIT_SCIAD_DIR`` with ``train.json``, ``dev.json`` and ``diction.json``
  (optionally a labeled ``test.json``).

Without them the rule baseline runs on a hand-labeled fixture corpus and the
other dataset criteria are skipped with a reason.
"""

import contextlib
import io
import itertools
import json
import os
import random
from pathlib import Path

import pytest

from acrokit import formats, synthetic
from acrokit.ad_corpus import GenerationReport, build_dictionary, generate_silver_ad
from acrokit.cli import main
from acrokit.disambiguation import predict_context, predict_frequency, train_context, train_frequency
from acrokit.evaluation import evaluate_ad, evaluate_ai, harmonic, oracle_evaluate
from acrokit.identification import acronym_letters, identify, window_size, IdentifierConfig
from acrokit.model import (
    BioLabel,
    FrequencyTable,
    SpanAnnotation,
    SpanKind,
    TokenSentence,
    extract_spans,
    is_bio_valid,
    labels_to_spans,
    spans_to_labels,
)

S, L = SpanKind.SHORT, SpanKind.LONG


def _data_dir(var):
    value = os.environ.get(var)
    return Path(value) if value and Path(value).is_dir() else None


def _labeled_test_split(directory: Path):
    """``test.json`` when it carries gold, else ``dev.json``."""
    test = directory / "test.json"
    if test.exists():
        recs = formats.read_records(test)
        if recs and all("labels" in r or "expansion" in r or "label" in r for r in recs):
            return test
    return directory / "dev.json"


def _cli(*argv):
    """Run a CLI command, require success and return what it printed."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([str(a) for a in argv])
    assert code == 0, f"acrokit {' '.join(map(str, argv))} exited {code}"
    return buf.getvalue()


def _printed_row(text):
    *_, p, r, f = text.strip().splitlines()[-1].split()
    return float(p), float(r), float(f)


# -- fixture corpus for the rule baseline -------------------------------------

# Hand-labeled gold. Relaxed baseline output, derived by hand:
#   s0 LSTM and its long form: both right.
#   s1 mAP: short right; long form predicted as "average precision" (wrong).
#   s2 W2V / word2vec: both right.
#   s3 BERT right; Word2Vec (ratio 2/8) missed.
#   s4 F1 (ratio 1/2, not above 0.6) missed.
#   s5 SOTA right.  s6, s7: both right.
# short: 7 correct of 7 predicted, 9 gold -> P 1, R 7/9
# long:  4 correct of 5 predicted, 5 gold -> P 4/5, R 4/5
# macro P 0.9, macro R 71/90, F1 1278/1520
RULE_FIXTURE = [
    ("s0", "We use long short-term memory (LSTM) cells.", [(2, 5, L), (6, 7, S)]),
    ("s1", "Results in mean average precision (mAP) improve.", [(2, 5, L), (6, 7, S)]),
    ("s2", "Training word2vec (W2V) embeddings is cheap.", [(1, 2, L), (3, 4, S)]),
    ("s3", "The Word2Vec model and the BERT encoder are compared.", [(1, 2, S), (5, 6, S)]),
    ("s4", "We report the F1 score on the test set.", [(3, 4, S)]),
    ("s5", "Our method beats the SOTA by far.", [(4, 5, S)]),
    ("s6", "An HMM (hidden Markov model) tags words.", [(1, 2, S), (3, 6, L)]),
    ("s7", "A deep belief net ( DBN ) is stacked.", [(1, 4, L), (5, 6, S)]),
]
RULE_FIXTURE_ROW = (90.00, 78.89, 84.08)


def _rule_fixture_file(path):
    sentences = []
    for sid, text, spans in RULE_FIXTURE:
        tokens = formats.tokenize(text)
        labels = spans_to_labels([SpanAnnotation(a, b, k) for a, b, k in spans], len(tokens))
        sentences.append(TokenSentence(sid, tokens, labels))
    formats.save_ai_dataset(path, sentences)
    return path


@pytest.fixture(scope="module")
def ai_reproduction(tmp_path_factory):
    """Relaxed identify + evaluate through the CLI; returns (mode, json, printed row)."""
    tmp = tmp_path_factory.mktemp("ai")
    data = _data_dir("ACROKIT_SCIAI_DIR")
    if data is not None:
        gold, mode = data / "dev.json", "public dev split"
    else:
        gold, mode = _rule_fixture_file(tmp / "gold.json"), "fixture corpus"
    pred, report = tmp / "pred.json", tmp / "report.json"
    _cli("identify", "--input", gold, "--output", pred, "--relaxed")
    printed = _cli("evaluate", "--gold", gold, "--pred", pred, "--task", "ai", "--output", report, "--name", "Baseline")
    print(printed)
    return mode, json.loads(report.read_text()), printed, gold, pred


@pytest.fixture(scope="module")
def ad_reproduction(tmp_path_factory):
    """train-freq + disambiguate + evaluate through the CLI, or None without data."""
    data = _data_dir("ACROKIT_SCIAD_DIR")
    if data is None:
        return None
    tmp = tmp_path_factory.mktemp("ad")
    diction = data / "diction.json"
    gold = _labeled_test_split(data)
    freq, pred, report = tmp / "freq.json", tmp / "pred.json", tmp / "report.json"
    _cli("train-freq", "--input", data / "train.json", "--dict", diction, "--output", freq)
    _cli("disambiguate", "--input", gold, "--dict", diction, "--freq", freq, "--output", pred)
    printed = _cli("evaluate", "--gold", gold, "--pred", pred, "--task", "ad", "--dict", diction,
                   "--output", report, "--name", "Baseline")
    print(printed)
    return gold.name, json.loads(report.read_text()), printed


# -- criteria -----------------------------------------------------------------


@pytest.mark.criterion("C1 rule-baseline reproduction (F1 84.09 +/- 2.0, P >= R)")
def test_rule_baseline_reproduction(ai_reproduction, record_property):
    mode, report, printed, gold, pred = ai_reproduction
    record_property("mode", mode)
    p, r, f1 = (100 * report[k] for k in ("precision", "recall", "f1"))
    print(f"C1 [{mode}] P={p:.2f} R={r:.2f} F1={f1:.2f}")
    if mode == "fixture corpus":
        assert _printed_row(printed) == RULE_FIXTURE_ROW
        gold_s = formats.load_ai_dataset(gold)
        pred_s = formats.load_ai_dataset(pred)
        assert oracle_evaluate(gold_s, pred_s) == evaluate_ai(gold_s, pred_s)
        assert p >= r
    else:
        assert abs(f1 - 84.09) <= 2.0
        assert p >= r


@pytest.mark.criterion("C2 frequency-baseline reproduction (F1 60.97 +/- 2.0, P > R)")
def test_frequency_baseline_reproduction(ad_reproduction):
    if ad_reproduction is None:
        pytest.skip("ACROKIT_SCIAD_DIR not set; public AD splits unavailable")
    split, report, _ = ad_reproduction
    p, r, f1 = (100 * report[k] for k in ("precision", "recall", "f1"))
    print(f"C2 [{split}] P={p:.2f} R={r:.2f} F1={f1:.2f}")
    assert abs(f1 - 60.97) <= 2.0
    assert p > r


@pytest.mark.criterion("C3 metric identity (F1 = harmonic mean of macro P/R, 2 decimals)")
def test_metric_identity(ai_reproduction, ad_reproduction, tmp_path):
    runs = [("ai", ai_reproduction[1], ai_reproduction[2])]
    if ad_reproduction is not None:
        runs.append(("ad", ad_reproduction[1], ad_reproduction[2]))
    else:
        # stand-in AD run on seeded synthetic data through the same commands
        gold, freq, pred, report = (tmp_path / n for n in ("g.json", "f.json", "p.json", "r.json"))
        _cli("synth", "--kind", "ad", "--size", 500, "--seed", 1, "--output", gold)
        _cli("train-freq", "--input", gold, "--output", freq)
        _cli("disambiguate", "--input", gold, "--freq", freq, "--output", pred)
        printed = _cli("evaluate", "--gold", gold, "--pred", pred, "--task", "ad", "--output", report)
        runs.append(("ad (synthetic)", json.loads(report.read_text()), printed))
    for task, report, printed in runs:
        p, r, f1 = report["precision"], report["recall"], report["f1"]
        print(f"C3 [{task}] F1={100 * f1:.2f} harmonic={100 * harmonic(p, r):.2f}")
        assert round(100 * f1, 2) == round(100 * harmonic(p, r), 2)
        # the printed row rounds P and R first, which can move F1 by one unit
        pp, pr, pf = _printed_row(printed)
        assert pf == round(100 * f1, 2)
        assert abs(pf - 100 * harmonic(pp / 100, pr / 100)) <= 0.01 + 1e-9


@pytest.mark.criterion("C4 dictionary statistics (732 +/- 5% acronyms, 3.1 +/- 0.2 senses)")
def test_dictionary_statistics():
    data = _data_dir("ACROKIT_SCIAI_DIR")
    if data is None:
        pytest.skip("ACROKIT_SCIAI_DIR not set; public AI annotations unavailable")
    sentences = []
    for name in ("train.json", "dev.json", "test.json"):
        path = data / name
        if path.exists():
            sentences += [s for s in formats.load_ai_dataset(path, require_labels=False) if s.labels is not None]
    d = build_dictionary(sentences)
    print(f"C4 entries={len(d)} mean_senses={d.mean_senses():.3f}")
    assert abs(len(d) - 732) <= 0.05 * 732
    assert abs(d.mean_senses() - 3.1) <= 0.2


@pytest.mark.criterion("C5 oracle equivalence on 1,000 seeded random datasets")
def test_oracle_equivalence():
    rng = random.Random(20200701)
    mismatches = 0
    for _ in range(1000):
        size = rng.randint(1, 1000)
        if rng.random() < 0.5:
            gold, pred = synthetic.random_ai_pair(rng, size)
            mismatches += evaluate_ai(gold, pred) != oracle_evaluate(gold, pred)
        else:
            gold, pred = synthetic.random_ad_pair(rng, size, n_acronyms=rng.randint(1, 12))
            mismatches += evaluate_ad(gold, pred) != oracle_evaluate(gold, pred)
    print(f"C5 mismatches={mismatches}")
    assert mismatches == 0


@pytest.mark.criterion("C6 BIO round-trip, exhaustive for length <= 6")
def test_bio_round_trip_exhaustive():
    checked = failures = 0
    for n in range(1, 7):
        for labels in itertools.product(list(BioLabel), repeat=n):
            if not is_bio_valid(labels):
                continue
            checked += 1
            s = TokenSentence("x", ["t"] * n, labels)
            spans = extract_spans(s)
            failures += spans_to_labels(spans, n) != labels or labels_to_spans(labels) != spans
    print(f"C6 valid sequences={checked} failures={failures}")
    assert checked > 0 and failures == 0


def _window_violation(tokens, spans):
    """Why the spans break the window/subsequence property, or None."""
    for sp in spans:
        if sp.kind is not L:
            continue
        short = spans[sp.partner]
        acronym = tokens[short.start]
        w = window_size(acronym)
        if sp.end <= short.start:
            opens = [o for o in range(sp.end, short.start) if tokens[o] == "("]
            if not opens or opens[0] - sp.start > w:
                return f"long form {sp} outside window before {acronym}"
        else:
            o = short.end
            if tokens[o] != "(" or sp.start < o + 1 or sp.end - (o + 1) > w:
                return f"long form {sp} outside window after {acronym}"
        chars = "".join(tokens[sp.start:sp.end]).lower()
        letters = acronym_letters(acronym)
        if chars[0] != letters[0]:
            return f"{acronym}: first letter not at start of {chars!r}"
        it = iter(chars)
        if not all(c in it for c in letters):
            return f"{acronym}: letters not a subsequence of {chars!r}"
    return None


@pytest.mark.criterion("C7 identification window property on 10,000 sentences")
def test_window_property():
    rng = random.Random(7)
    cfg = IdentifierConfig.baseline(relaxed=True)
    matched = violations = 0
    for k in range(10_000):
        s = synthetic.parenthetical_sentence(rng, k)
        spans = identify(s, cfg)
        matched += sum(sp.kind is L for sp in spans)
        reason = _window_violation(s.tokens, spans)
        if reason:
            violations += 1
            print("C7 violation:", " ".join(s.tokens), "->", reason)
    print(f"C7 long forms matched={matched} violations={violations}")
    assert matched > 5_000 and violations == 0


@pytest.mark.criterion("C8 alpha=0 reduction and count-scaling invariance")
def test_reduction_and_invariance():
    rng = random.Random(8)
    senses = synthetic.random_senses(rng, n_acronyms=20)
    train = synthetic.random_ad_instances(rng, 3_000, senses, "tr")
    # a few acronyms never seen in training exercise the fallback path too
    unseen = synthetic.random_senses(random.Random(9), n_acronyms=3)
    unseen = {f"UN{k}": v for k, v in enumerate(unseen.values())}
    test = synthetic.random_ad_instances(rng, 9_500, senses, "te")
    test += synthetic.random_ad_instances(rng, 500, unseen, "un")
    profile, table = train_context(train), train_frequency(train)
    violations = sum(predict_context(x, profile, table, alpha=0.0) != predict_frequency(x, table) for x in test)
    for factor in (2, 3, 17, 1000):
        scaled = FrequencyTable({key: c * factor for key, c in table.counts.items()})
        violations += sum(predict_frequency(x, scaled) != predict_frequency(x, table) for x in test)
    print(f"C8 instances={len(test)} violations={violations}")
    assert len(test) == 10_000 and violations == 0


# Hand-derived from the fixture: doc-a defines CNN as the convolutional sense
# (3 later mentions) and SVM without later mentions; doc-b defines both with
# one later mention each; doc-c defines CNN twice with different senses, so
# its CNN mention is excluded, and gives one SVM mention.
SILVER_EXPECTED = [
    ("doc-a:a1:1", "CNN", "convolutional neural network"),
    ("doc-a:a2:3", "CNN", "convolutional neural network"),
    ("doc-a:a2:8", "CNN", "convolutional neural network"),
    ("doc-b:b1:0", "CNN", "cable news network"),
    ("doc-b:b3:1", "SVM", "scalable vector machine"),
    ("doc-c:c4:1", "SVM", "support vector machine"),
]


@pytest.mark.criterion("C9 silver-generation fixture counts")
def test_silver_generation_fixture(tmp_path):
    docs = synthetic.pipeline_fixture()
    d = build_dictionary([s for doc in docs for s in doc.sentences])
    report = GenerationReport()
    instances = generate_silver_ad(docs, d, report=report)
    assert [(i.id, i.acronym, i.gold) for i in instances] == SILVER_EXPECTED
    assert dict(report.instances_per_acronym) == {"CNN": 4, "SVM": 2}
    assert report.conflicts == [
        {"doc_id": "doc-c", "acronym": "CNN", "long_forms": ["cable news network", "convolutional neural network"]}
    ]

    src = tmp_path / "docs.json"
    _cli("synth", "--kind", "pipeline", "--output", src)
    _cli("pipeline", "--input", src, "--output", tmp_path / "out")
    stats = json.loads((tmp_path / "out" / "stats.json").read_text())
    assert (stats["ad_instances"], stats["conflicts"]) == (6, 1)
    assert [r["id"] for r in json.loads((tmp_path / "out" / "ad.json").read_text())] == [e[0] for e in SILVER_EXPECTED]
    print(f"C9 instances={len(instances)} conflicts={len(report.conflicts)}")
