"""Acceptance suite: one test per primary criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected into an "acceptance criteria" section of the summary.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from acceptance_log import report
from oracles import covariance_eig, dbscan_bruteforce, levenshtein_recursive, naive_scores, same_partition

import fusededup.fusion as fusion
from fusededup.baseline import levenshtein
from fusededup.cli import main
from fusededup.config import RunConfig
from fusededup.embedding import embed_batch
from fusededup.evaluation import evaluate
from fusededup.fusion import ClusterParams, FusionWeights, dbscan, score_pairs
from fusededup.linalg import cosine, pca_fit
from fusededup.pipeline import run_pipeline
from fusededup.records import GroundTruth


def _paired_truth(n_pairs: int) -> GroundTruth:
    return GroundTruth({r: r // 2 for r in range(2 * n_pairs)})


def test_c1_f1_reference_values():
    # (P=1.00, R=0.29): 29 of 100 true pairs, no false positives
    gt = _paired_truth(100)
    a = evaluate({(2 * k, 2 * k + 1) for k in range(29)}, gt)
    # (P=0.4999, R=0.995): tp=4975, fn=25, fp=4977
    gt = _paired_truth(5000)
    pred = {(2 * k, 2 * k + 1) for k in range(4975)}
    pred |= {(2 * k, 2 * k + 2) for k in range(4977)}
    b = evaluate(pred, gt)
    ok = (
        a.precision == 1.0 and a.recall == pytest.approx(0.29)
        and abs(a.f1 - 0.450) <= 0.002
        and (b.true_positives, b.false_positives, b.false_negatives) == (4975, 4977, 25)
        and abs(b.precision - 0.4999) < 5e-5 and b.recall == pytest.approx(0.995)
        and abs(b.f1 - 0.665) <= 0.002
    )
    report(1, "F1 matches 0.450 and 0.665 within 0.002", ok, f"F1={a.f1:.4f}, {b.f1:.4f}")
    assert ok


def test_c2_directional_recall_precision(tmp_path, capsys):
    start = time.perf_counter()
    assert main(["generate", "--entities", "833", "--dup-fraction", "0.2", "--seed", "42", "-o", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["compare", str(tmp_path / "Simulated_CRM_Dataset.csv"), "--workers", "1", "--json"]) == 0
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    metrics = json.loads(out.strip().splitlines()[-1])
    base, multi = metrics["baseline"], metrics["multimodal"]
    recall_ok = multi["recall"] >= base["recall"] + 0.15
    precision_ok = base["precision"] >= multi["precision"]
    fast = elapsed < 60.0
    detail = (
        f"recall {multi['recall']:.4f} vs baseline {base['recall']:.4f}+0.15 -> {recall_ok}; "
        f"precision baseline {base['precision']:.4f} >= {multi['precision']:.4f} -> {precision_ok}; "
        f"{elapsed:.1f}s"
    )
    with capsys.disabled():
        print("\n" + out)
    report(2, "baseline vs multimodal direction on the seed-42 dataset", recall_ok and precision_ok and fast, detail)
    assert precision_ok and fast
    assert recall_ok, detail


def test_c3_dbscan_oracle():
    rng = np.random.default_rng(2024)
    instances = 60
    agree = 0
    for _ in range(instances):
        n = int(rng.integers(5, 201))
        d = int(rng.integers(1, 9))
        k = int(rng.integers(1, 6))
        centres = rng.uniform(-4, 4, size=(k, d))
        pts = centres[rng.integers(k, size=n)] + rng.normal(scale=rng.uniform(0.2, 1.0), size=(n, d))
        eps = float(rng.uniform(0.2, 1.5))
        min_samples = int(rng.integers(1, 8))
        got = dbscan(pts, ClusterParams(eps, min_samples))
        agree += same_partition(got, dbscan_bruteforce(pts, eps, min_samples))
    ok = agree == instances
    report(3, "DBSCAN equals brute force up to relabeling", ok, f"{agree}/{instances} instances")
    assert ok


def test_c4_levenshtein_oracle():
    rng = random.Random(4)
    corpus = sorted({"".join(rng.choice("abcd") for _ in range(rng.randint(0, 8))) for _ in range(120)})
    pairs = list(itertools.combinations(corpus, 2))
    mismatches = sum(levenshtein(a, b) != levenshtein_recursive(a, b) for a, b in pairs)
    triples = [tuple(rng.choice(corpus) for _ in range(3)) for _ in range(1000)]
    axiom_failures = 0
    for x, y, z in triples:
        dxy, dyz, dxz = levenshtein(x, y), levenshtein(y, z), levenshtein(x, z)
        axiom_failures += dxy != levenshtein(y, x)
        axiom_failures += dxz > dxy + dyz
    ok = len(pairs) >= 2000 and mismatches == 0 and axiom_failures == 0
    report(4, "Levenshtein DP equals recursion; metric axioms hold", ok,
           f"{len(pairs)} pairs, {mismatches} mismatches, {axiom_failures} axiom failures")
    assert ok


def _reconstruction_error(x, k):
    m = pca_fit(x, k)
    approx = m.mean + m.transform(x) @ m.components
    return float(np.sum((x - approx) ** 2))


def test_c5_pca_numerics():
    rng = np.random.default_rng(5)
    worst_ortho = worst_var = 0.0
    monotone = True
    for _ in range(20):
        x = rng.normal(size=(50, 10)) @ rng.normal(size=(10, 10))
        model = pca_fit(x, 10)
        c = model.components
        worst_ortho = max(worst_ortho, float(np.abs(c @ c.T - np.eye(c.shape[0])).max()))
        vals, _ = covariance_eig(x)
        worst_var = max(worst_var, float(np.abs(model.explained_variance - vals[: c.shape[0]]).max()))
        errs = [_reconstruction_error(x, k) for k in range(1, 10)]
        monotone &= all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    ok = worst_ortho <= 1e-8 and worst_var <= 1e-6 and monotone
    report(5, "PCA orthonormality, eigenvalues, reconstruction monotone", ok,
           f"ortho {worst_ortho:.1e}, variance {worst_var:.1e}")
    assert ok


def test_c6_fusion_arithmetic():
    rng = np.random.default_rng(6)
    w = FusionWeights()
    triples = rng.uniform(-1, 1, size=(1000, 3))
    arith_ok = True
    for t, b, d in triples:
        f = w.fuse(t, b, d)
        arith_ok &= abs(f - (0.4 * t + 0.35 * b + 0.25 * d)) <= 1e-12
        arith_ok &= min(t, b, d) - 1e-12 <= f <= max(t, b, d) + 1e-12

    n = 60
    base = rng.normal(size=(6, 6))
    text = base[rng.integers(6, size=n)] + 0.4 * rng.normal(size=(n, 6))
    beh = base[rng.integers(6, size=n), :4] + 0.4 * rng.normal(size=(n, 4))
    dev = rng.normal(size=(n, 3))
    emitted = {(p.i, p.j) for p in score_pairs(text, beh, dev, w, chunk_size=97)}
    ref = naive_scores(text.tolist(), beh.tolist(), dev.tolist(), (0.4, 0.35, 0.25), 0.75)
    strict = score_pairs(np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)), FusionWeights(threshold=1.0)) == []
    ok = arith_ok and emitted == set(ref) and strict
    report(6, "fusion weighted sum, bounds and naive-loop set equality", ok, f"{len(ref)} pairs above threshold")
    assert ok


def _run_artifacts(out):
    assert main(["generate", "--seed", "42", "-o", str(out)]) == 0
    data = out / "Simulated_CRM_Dataset.csv"
    assert main(["dedupe", str(data), "--workers", "1"]) == 0
    assert main(["baseline", str(data)]) == 0
    return {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}


def test_c7_determinism(tmp_path, capsys):
    first = _run_artifacts(tmp_path / "a")
    second = _run_artifacts(tmp_path / "b")
    ok = len(first) == 5 and first == second
    report(7, "generate + dedupe + baseline byte-identical across runs", ok, f"{len(first)} files")
    assert ok


def _one_edit(s, rng):
    pos = rng.randrange(len(s))
    op = rng.choice(("sub", "ins", "del"))
    letter = rng.choice([c for c in "abcdefghijklmnopqrstuvwxyz" if c != s[pos]])
    if op == "sub":
        return s[:pos] + letter + s[pos + 1:]
    if op == "ins":
        return s[:pos] + letter + s[pos:]
    return s[:pos] + s[pos + 1:]


def test_c8_embedding_locality():
    rng = random.Random(8)
    letters = "abcdefghijklmnopqrstuvwxyz"
    trials, wins = 1000, 0
    for _ in range(trials):
        a = "".join(rng.choice(letters) for _ in range(rng.randint(10, 20)))
        b = "".join(rng.choice(letters) for _ in range(rng.randint(10, 20)))
        va, vp, vb = embed_batch([a, _one_edit(a, rng), b])
        wins += cosine(va, vp) > cosine(va, vb)
    ok = wins >= 0.95 * trials
    report(8, "edit-distance-1 variants are closer than random strings", ok, f"{wins}/{trials}")
    assert ok


def test_c9_performance(default_dataset, monkeypatch):
    ds, _ = default_dataset
    n = len(ds)
    chunk = 1 << 16
    peak = []
    real_block = fusion._score_block

    def spy(t, b, d, start, stop, w):
        peak.append((stop - start) * t.shape[0])
        return real_block(t, b, d, start, stop, w)

    monkeypatch.setattr(fusion, "_score_block", spy)
    cfg = RunConfig(workers=1, chunk_size=chunk)
    start = time.perf_counter()
    run_pipeline(ds, cfg, cluster=True)
    elapsed = time.perf_counter() - start
    ok = n >= 999 and elapsed < 60.0 and peak and max(peak) <= chunk and sum(peak) >= n * (n - 1) // 2
    report(9, "full pipeline under 60 s with bounded scoring blocks", ok,
           f"{n} records, {elapsed:.2f}s, largest block {max(peak)} <= {chunk}")
    assert ok
