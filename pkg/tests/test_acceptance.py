"""Acceptance gate: one test per release criterion, at its stated tolerance.

Each test prints "criterion N: PASS - <label>" on success (visible with
``pytest -s``); the test names double as the checklist under ``-v``.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from paracode.classifiers import (
    ALL_KINDS,
    KNNHyper,
    TrainingSet,
    fit,
    logreg_loss_grad,
    mlp_forward_backward,
    predict_batch,
)
from paracode.cli import main as cli_main
from paracode.corpus import DatasetRole, LabelSet, Paragraph, Register, split_paragraphs
from paracode.ensemble import VoteRecord, combine
from paracode.evaluation import ConfusionMatrix, aggregate_manifesto, metrics
from conftest import MINI_DIR, load_mini_corpus, two_gaussian_data

KINDS = [k.value for k in ALL_KINDS]


def _report(number: int, label: str, elapsed: float | None = None):
    suffix = f" [{elapsed:.2f}s]" if elapsed is not None else ""
    print(f"criterion {number}: PASS - {label}{suffix}")


def _vote_record(bits, para_id="p", dimension="pc"):
    return VoteRecord(
        para_id=para_id,
        dimension=dimension,
        votes=dict(zip(KINDS, bits)),
        scores=dict(zip(KINDS, map(float, bits))),
    )


# ----------------------------------------------------------------------
# 1. Metric identity suite
# ----------------------------------------------------------------------

def test_criterion_1_metric_identities():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    for _ in range(1000):
        tp = int(rng.integers(1, 500))
        fp = int(rng.integers(0, 500))
        tn = int(rng.integers(0, 500))
        fn = int(rng.integers(0, 500))
        r = metrics(ConfusionMatrix(tp, fp, tn, fn))
        p_frac = Fraction(tp, tp + fp)
        r_frac = Fraction(tp, tp + fn)
        exact = 2 * p_frac * r_frac / (p_frac + r_frac)
        assert r.f1 == float(exact)  # harmonic-mean identity, exact arithmetic
        assert min(r.precision, r.recall) <= r.f1 <= max(r.precision, r.recall)

    # test-set ensemble row: P=0.84, R=0.85 -> F1 0.845 (printed as 0.85)
    cm = ConfusionMatrix(tp=84 * 85, fp=16 * 85, tn=0, fn=15 * 84)
    r = metrics(cm)
    assert r.precision == pytest.approx(0.84, abs=1e-12)
    assert r.recall == pytest.approx(0.85, abs=1e-12)
    assert abs(r.f1 - 0.845) < 5e-4
    assert abs(round(r.f1, 3) - 0.85) <= 0.005 + 1e-12

    # holdout rows: the F1 recomputed from printed P/R lands on the printed
    # "accuracy" line, and the abstract's accuracies equal the printed "F1"
    # line, i.e. the two rows of the holdout table are swapped.
    f1_ae = metrics(ConfusionMatrix(tp=40 * 64, fp=60 * 64, tn=0, fn=36 * 40)).f1
    assert abs(f1_ae - 0.492) <= 1e-3
    assert round(f1_ae, 2) == 0.49  # printed accuracy row (AE)
    assert abs(0.95 - f1_ae) > 0.4  # printed F1 row cannot be the F1

    f1_pc = metrics(ConfusionMatrix(tp=54 * 71, fp=46 * 71, tn=0, fn=29 * 54)).f1
    assert abs(f1_pc - 0.61344) <= 1e-3
    assert round(f1_pc, 2) == 0.61  # printed accuracy row (PC)
    abstract_accuracies = {"ae": 0.95, "pc": 0.86}
    printed_f1_rows = {"ae": 0.95, "pc": 0.86}
    assert abstract_accuracies == printed_f1_rows

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(1, "metric identities + holdout-table row swap confirmed", elapsed)


# ----------------------------------------------------------------------
# 2. Ensemble oracle
# ----------------------------------------------------------------------

def test_criterion_2_ensemble_oracle():
    started = time.perf_counter()
    # exhaustive: all 32 patterns x thresholds 1..5
    for pattern in range(32):
        bits = [(pattern >> i) & 1 for i in range(5)]
        for threshold in range(1, 6):
            decision = combine(_vote_record(bits), threshold)
            assert decision.decision == (1 if sum(bits) >= threshold else 0)
            assert decision.positive_votes == sum(bits)

    # monotonicity over 10,000 random corpora of <= 100 paragraphs
    rng = np.random.default_rng(202)
    for _ in range(10_000):
        n = int(rng.integers(1, 101))
        rows = rng.integers(0, 2, size=(n, 5)).tolist()
        threshold = int(rng.integers(1, 5))
        for i, row in enumerate(rows):
            record = _vote_record(row, para_id=f"p{i}")
            low = combine(record, threshold)
            high = combine(record, threshold + 1)
            assert not (high.decision == 1 and low.decision == 0)

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    _report(2, "32-pattern oracle + threshold monotonicity on 10k corpora", elapsed)


# ----------------------------------------------------------------------
# 3. Holdout-table cross-check
# ----------------------------------------------------------------------

# (year, party, total, ae_count, pc_count, printed_ae_true, printed_pc_true)
HOLDOUT_ROWS = [
    (2016, "DK", 141, 22, 46, 0.15, 0.32),
    (2016, "LS", 89, 19, 38, 0.21, 0.42),
    (2016, "LRLS", 1104, 55, 185, 0.05, 0.17),
    (2020, "DK", 210, 44, 69, 0.21, 0.33),
    (2016, "TAUT", 8, 4, 5, 0.44, 0.56),
    (2016, "APKK", 11, 3, 3, 0.25, 0.25),
]
CONCORDANT = {("DK", 2016), ("LS", 2016), ("LRLS", 2016), ("DK", 2020)}
DISCORDANT = {("TAUT", 2016), ("APKK", 2016)}

# concordant: the printed 2-decimal value is one of the two decimal grid
# points adjacent to the recomputed proportion (printing quantization plus
# the stated +-0.005), i.e. |recomputed - printed| <= 0.0105
_BAND = 0.0105


def _build_group(year, party, total, ae_count, pc_count):
    paragraphs = []
    doc_id = f"{party}_{year}"
    for i in range(total):
        paragraphs.append(
            Paragraph(
                para_id=f"{doc_id}#{i:04d}",
                doc_id=doc_id,
                index=i,
                text=f"synthetic paragraph {i}",
                labels=LabelSet(
                    pc=1 if i < pc_count else 0,
                    ae=1 if i < ae_count else 0,
                ),
                party=party,
                year=year,
                register=Register.manifesto,
            )
        )
    return paragraphs


def test_criterion_3_holdout_proportion_cross_check():
    started = time.perf_counter()
    for year, party, total, ae_count, pc_count, printed_ae, printed_pc in HOLDOUT_ROWS:
        paragraphs = _build_group(year, party, total, ae_count, pc_count)
        decisions = {(p.para_id, d): 0 for p in paragraphs for d in ("pc", "ae")}
        report = aggregate_manifesto(paragraphs, decisions)[0]
        assert report.paragraph_count == total
        assert report.ae_true_prop == pytest.approx(ae_count / total, abs=1e-12)
        assert report.pc_true_prop == pytest.approx(pc_count / total, abs=1e-12)

        ae_ok = abs(report.ae_true_prop - printed_ae) <= _BAND
        pc_ok = abs(report.pc_true_prop - printed_pc) <= _BAND
        if (party, year) in CONCORDANT:
            assert ae_ok and pc_ok, (party, year)
        else:
            assert (party, year) in DISCORDANT
            assert not ae_ok and not pc_ok, (party, year)

    # spot values named by the criterion
    assert round(22 / 141, 3) == 0.156
    assert 0.15 <= 22 / 141 <= 0.16
    assert round(19 / 89, 2) == 0.21
    assert 0.42 <= 38 / 89 <= 0.43
    assert round(44 / 210, 2) == 0.21

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(3, "count-derived proportions match concordant rows, flag discordant", elapsed)


# ----------------------------------------------------------------------
# 4. Classifier correctness on the 1024-dim fixture
# ----------------------------------------------------------------------

def test_criterion_4_classifier_accuracy_on_separable_fixture():
    started = time.perf_counter()
    rng = np.random.default_rng(404)
    X_train, y_train = two_gaussian_data(rng, dim=1024, n=200, pos_frac=0.05,
                                         separation_sigmas=6.0, per_feature=True)
    X_test, y_test = two_gaussian_data(rng, dim=1024, n=100, pos_frac=0.05,
                                       separation_sigmas=6.0, per_feature=True)
    data = TrainingSet(X_train, y_train, "pc")

    votes = {}
    for kind in ALL_KINDS:
        model = fit(kind, data, seed=4)
        labels, _ = predict_batch(model, X_test)
        accuracy = float((labels == y_test).mean())
        assert accuracy >= 0.90, f"{kind.value}: {accuracy:.3f}"
        recall = float((labels[y_test == 1] == 1).mean())
        assert recall > 0.0, f"{kind.value} degenerated to all-negative"
        votes[kind.value] = labels

    ensemble_pred = []
    for i in range(len(y_test)):
        record = _vote_record([int(votes[k][i]) for k in KINDS])
        ensemble_pred.append(combine(record, 2).decision)
    ensemble_accuracy = float((np.array(ensemble_pred) == y_test).mean())
    assert ensemble_accuracy >= 0.95, f"ensemble: {ensemble_accuracy:.3f}"

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    _report(4, f"five learners >= 0.90, ensemble {ensemble_accuracy:.2f} >= 0.95", elapsed)


# ----------------------------------------------------------------------
# 5. Gradient checks
# ----------------------------------------------------------------------

def _rel_err(analytic, numeric):
    return abs(numeric - analytic) / max(1e-8, abs(numeric) + abs(analytic))


def test_criterion_5_gradient_checks():
    rng = np.random.default_rng(505)
    h = 1e-5
    worst = 0.0

    for _ in range(10):  # logistic regression
        n = int(rng.integers(2, 17))
        dim = int(rng.integers(1, 11))
        X = rng.normal(size=(n, dim))
        y = rng.integers(0, 2, size=n)
        w = rng.normal(size=dim)
        b = float(rng.normal())
        l2 = float(rng.uniform(0, 2))
        _, (gw, gb) = logreg_loss_grad(w, b, (X, y), l2)
        for j in range(dim):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            lp, _ = logreg_loss_grad(wp, b, (X, y), l2)
            lm, _ = logreg_loss_grad(wm, b, (X, y), l2)
            worst = max(worst, _rel_err(gw[j], (lp - lm) / (2 * h)))
        lp, _ = logreg_loss_grad(w, b + h, (X, y), l2)
        lm, _ = logreg_loss_grad(w, b - h, (X, y), l2)
        worst = max(worst, _rel_err(gb, (lp - lm) / (2 * h)))

    for _ in range(5):  # mlp
        n = int(rng.integers(2, 17))
        dim = int(rng.integers(2, 11))
        hidden = int(rng.integers(2, 5))
        X = rng.normal(size=(n, dim))
        y = rng.integers(0, 2, size=n).astype(float)
        net = {
            "W1": rng.normal(scale=0.8, size=(dim, hidden)),
            "b1": rng.normal(scale=0.3, size=hidden),
            "w2": rng.normal(scale=0.8, size=hidden),
            "b2": np.float64(rng.normal(scale=0.3)),
        }
        _, grads = mlp_forward_backward(net, (X, y))
        for key in ("W1", "b1", "w2", "b2"):
            flat_param = np.atleast_1d(np.asarray(net[key], dtype=np.float64))
            flat_grad = np.atleast_1d(np.asarray(grads[key], dtype=np.float64))
            for idx in np.ndindex(flat_param.shape):
                bumped = {k: np.array(v, dtype=np.float64) for k, v in net.items()}
                arr = np.atleast_1d(bumped[key])
                arr[idx] += h
                bumped[key] = arr if np.asarray(net[key]).ndim else np.float64(arr[0])
                lp, _ = mlp_forward_backward(bumped, (X, y))
                arr2 = np.atleast_1d(np.array(net[key], dtype=np.float64))
                arr2[idx] -= h
                bumped[key] = arr2 if np.asarray(net[key]).ndim else np.float64(arr2[0])
                lm, _ = mlp_forward_backward(bumped, (X, y))
                worst = max(worst, _rel_err(flat_grad[idx], (lp - lm) / (2 * h)))

    assert worst < 1e-4
    _report(5, f"analytic vs central differences, max rel err {worst:.2e}")


# ----------------------------------------------------------------------
# 6. Oracle equivalence (gnb, knn)
# ----------------------------------------------------------------------

def test_criterion_6_oracle_equivalence():
    rng = np.random.default_rng(606)

    gnb_cases = 0
    for _ in range(25):
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(4, 40))
        X = rng.normal(size=(n, dim))
        y = rng.integers(0, 2, size=n)
        y[:2] = [0, 1]
        model = fit("gnb", TrainingSet(X, y, "pc"), seed=0)
        theta = model.params["theta"]
        var = model.params["var"]
        log_prior = model.params["class_log_prior"]
        queries = rng.normal(size=(20, dim))
        labels, _ = predict_batch(model, queries)
        for q, got in zip(queries, labels):
            jll = []
            for c in (0, 1):
                total = float(log_prior[c])
                for j in range(dim):
                    total += -0.5 * math.log(2 * math.pi * var[c][j])
                    total += -((q[j] - theta[c][j]) ** 2) / (2 * var[c][j])
                jll.append(total)
            assert int(jll[1] >= jll[0]) == got
            gnb_cases += 1
    assert gnb_cases == 500

    knn_cases = 0
    for _ in range(25):
        n = int(rng.integers(5, 201))
        dim = int(rng.integers(1, 6))
        k = int(rng.integers(1, 9))
        X = rng.normal(size=(n, dim))
        y = rng.integers(0, 2, size=n)
        y[:2] = [0, 1]
        model = fit("knn", TrainingSet(X, y, "pc"), KNNHyper(k=k), seed=0)
        queries = rng.normal(size=(20, dim))
        labels, _ = predict_batch(model, queries)
        k_eff = min(k, n)
        for q, got in zip(queries, labels):
            dists = sorted(
                (float(((row - q) ** 2).sum()), i) for i, row in enumerate(X)
            )
            frac = sum(int(y[i]) for _, i in dists[:k_eff]) / k_eff
            assert got == (1 if frac > 0.5 else 0)
            knn_cases += 1
    assert knn_cases == 500

    _report(6, "gnb vs direct log-density and knn vs exhaustive search, 500 cases each")


# ----------------------------------------------------------------------
# 7. Pipeline determinism
# ----------------------------------------------------------------------

def _run_pipeline(workdir):
    workdir.mkdir(parents=True, exist_ok=True)
    corpus = workdir / "corpus.jsonl"
    vectors = workdir / "vectors.pcv"
    bundle = workdir / "bundle.pcb"
    decisions = workdir / "decisions.jsonl"
    reports = workdir / "reports"
    steps = [
        ["ingest", "--in", str(MINI_DIR), "--labels", str(MINI_DIR / "labels.jsonl"),
         "--out", str(corpus)],
        ["roles", "--corpus", str(corpus), "--map", str(MINI_DIR / "roles.json")],
        ["embed", "--corpus", str(corpus), "--provider", "hashing", "--out", str(vectors)],
        ["train", "--corpus", str(corpus), "--vectors", str(vectors),
         "--out", str(bundle), "--seed", "42"],
        ["predict", "--corpus", str(corpus), "--vectors", str(vectors),
         "--bundle", str(bundle), "--out", str(decisions)],
        ["evaluate", "--corpus", str(corpus), "--bundle", str(bundle),
         "--vectors", str(vectors), "--role", "test", "--format", "csv",
         "--out-dir", str(reports)],
    ]
    for argv in steps:
        assert cli_main(argv) == 0

    artifacts = {}
    for path in [corpus, vectors, bundle, decisions, *sorted(reports.iterdir())]:
        artifacts[path.name] = path.read_bytes()
    return artifacts


def test_criterion_7_pipeline_determinism(tmp_path):
    first = _run_pipeline(tmp_path / "run_a")
    second = _run_pipeline(tmp_path / "run_b")
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"{name} differs between runs"
    _report(7, f"{len(first)} pipeline artifacts byte-identical across reruns")


# ----------------------------------------------------------------------
# 8. Segmentation contract + contamination guard
# ----------------------------------------------------------------------

def test_criterion_8_segmentation_and_contamination_guard(tmp_path):
    # segmentation vectors
    assert split_paragraphs("A people.\n\nThe elite.") == ["A people.", "The elite."]
    assert split_paragraphs("") == []
    assert split_paragraphs("one\n\n\n\ntwo\n\n") == ["one", "two"]
    assert split_paragraphs("a\r\n\r\nb") == ["a", "b"]
    assert split_paragraphs("solo paragraph") == ["solo paragraph"]
    for text in ("x\n\ny", "first\n\n\nsecond", "  pad  \n\n\t tab \n\n"):
        for piece in split_paragraphs(text):
            assert split_paragraphs(piece) == [piece]

    # contamination guard: no holdout paragraph is read during training
    from paracode.config import PipelineConfig
    from paracode.corpus import Corpus
    from paracode.embedding import HashingProvider, embed_corpus
    from paracode.pipeline import cmd_train

    class LoggingCorpus(Corpus):
        def __init__(self, inner):
            super().__init__()
            self._doc_ids = inner.doc_ids
            self._paragraphs = {p.para_id: p for p in inner.paragraphs()}
            self.accessed = []

        def paragraphs(self, role=None):
            result = super().paragraphs(role)
            self.accessed.extend(result)
            return result

        def get(self, para_id):
            p = super().get(para_id)
            self.accessed.append(p)
            return p

    double = LoggingCorpus(load_mini_corpus())
    vectors = embed_corpus(double.paragraphs(), HashingProvider(n_features=128, seed=8))
    double.accessed.clear()
    cmd_train(PipelineConfig(seed=8), double, vectors, tmp_path / "bundle.pcb")
    assert double.accessed
    assert all(p.role != DatasetRole.holdout for p in double.accessed)

    _report(8, "segmentation vectors pass; training never reads holdout")
