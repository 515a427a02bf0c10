"""Acceptance gate: ten checks with pinned tolerances, one verdict line each.

Run with `pytest tests/test_acceptance.py -rA` (or -s) to see every verdict
line; a failed assert carries the same line in its message.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from hnhn.autodiff import Tensor, matmul, segment_mean_weighted, tensor_sum, Tape
from hnhn.bench import run_scaling_bench
from hnhn.cli import main
from hnhn.data import load_labels, run_ingest, split_labeled
from hnhn.gradcheck import gradcheck_model
from hnhn.hypergraph import normalization_tables, read_hypergraph
from hnhn.model import forward, init_model
from hnhn.rng import CounterRng
from hnhn.synthetic import identity_features, planted_two_communities, random_hypergraph
from hnhn.training import TrainConfig, train_edge_classifier, train_node_classifier
from hnhn.verify import run_fano_suite, run_lemma_suite, run_spectral_suite

CITESEER_DIR = Path(__file__).resolve().parents[1] / "data" / "citeseer"


def _verdict(label: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
    print(line)
    assert passed, line


def test_criterion_01_lemma_suite_100_instances():
    started = time.perf_counter()
    results = run_lemma_suite(count=100, seed=0)
    elapsed = time.perf_counter() - started
    ok = all(r.passed for r in results) and elapsed < 10.0
    detail = "; ".join(f"{r.name} {r.detail}" for r in results)
    _verdict(
        "criterion 1 (expansion identities, 100 instances)",
        ok,
        f"{detail}; {elapsed:.2f}s < 10s",
    )


def test_criterion_02_fano_distinguishability():
    started = time.perf_counter()
    results = run_fano_suite(seed=0)
    elapsed = time.perf_counter() - started
    by_name = {r.name: r for r in results}
    ok = (
        by_name["fano-clique-identical"].passed
        and by_name["fano-model-separates"].passed
        and by_name["fano-relabeling-count"].passed
        and elapsed < 60.0
    )
    _verdict(
        "criterion 2 (Fano separation + 30 relabelings)",
        ok,
        f"{by_name['fano-clique-identical'].detail}; "
        f"{by_name['fano-model-separates'].detail}; "
        f"{by_name['fano-relabeling-count'].detail}; {elapsed:.2f}s < 60s",
    )


def test_criterion_03_spectral_relation():
    results = run_spectral_suite(count=20, seed=0)
    ok = all(r.passed for r in results)
    _verdict(
        "criterion 3 (star/clique spectra, 20 instances)",
        ok,
        "; ".join(r.detail for r in results),
    )


def test_criterion_04_gradient_fidelity():
    worst = gradcheck_model("small", step=1e-6)
    _verdict(
        "criterion 4 (finite-difference gradients, 10-node fixture)",
        worst < 1e-4,
        f"max relative error {worst:.3g} < 1e-4",
    )


def test_criterion_05_scatter_matches_dense_operator():
    worst_forward = worst_backward = 0.0
    for k in range(100):
        rng = CounterRng(1000 + k)
        n_src = 1 + int(rng.integers(30, 1)[0])
        n_tgt = 1 + int(rng.integers(30, 1)[0])
        d = 1 + int(rng.integers(6, 1)[0])
        lists = []
        for _ in range(n_tgt):
            size = int(rng.integers(min(n_src, 5) + 1, 1)[0])
            lists.append(sorted(int(i) for i in rng.permutation(n_src)[:size]))
        weights = rng.uniform(0.1, 2.0, (1, n_src)).reshape(-1)
        divisors = rng.uniform(0.5, 3.0, (1, n_tgt)).reshape(-1)

        dense = np.zeros((n_tgt, n_src))
        for t, ids in enumerate(lists):
            dense[t, ids] = 1.0
        dense = dense * weights[None, :] / divisors[:, None]

        x = Tensor(rng.uniform(-1.0, 1.0, (n_src, d)), requires_grad=True)
        r = Tensor(rng.uniform(-1.0, 1.0, (d, 1)))
        tape = Tape()
        out = segment_mean_weighted(x, lists, weights, divisors, tape)
        loss = tensor_sum(matmul(out, r, tape), tape)
        tape.backward(loss)

        worst_forward = max(
            worst_forward, float(np.max(np.abs(out.values - dense @ x.values)))
        )
        upstream = np.ones((n_tgt, 1)) @ r.values.T
        worst_backward = max(
            worst_backward, float(np.max(np.abs(x.grad - dense.T @ upstream)))
        )
    ok = worst_forward < 1e-10 and worst_backward < 1e-10
    _verdict(
        "criterion 5 (gather/scatter vs dense operator, 100 instances)",
        ok,
        f"forward {worst_forward:.3g}, backward {worst_backward:.3g}, both < 1e-10",
    )


def test_criterion_06_zero_exponents_are_plain_means():
    worst = 0.0
    for seed in range(5):
        h = random_hypergraph(10 + seed, 6 + seed, seed=seed, max_size=4)
        model = init_model(
            4, 5, n_classes=3, n_layers=2, dropout_rate=0.0, seed=seed + 50
        )
        features = CounterRng(seed + 100).uniform(-1.0, 1.0, (h.n, 4))
        out = forward(model, h, normalization_tables(h, 0.0, 0.0), Tensor(features))

        x = features @ model.input_weight.values + model.input_bias.values
        for layer in range(model.n_layers):
            gathered = np.zeros((h.m, x.shape[1]))
            for j, members in enumerate(h.edge_to_nodes):
                if members:
                    gathered[j] = x[list(members)].mean(axis=0)
            edge = np.maximum(
                gathered @ model.edge_weights[layer].values
                + model.edge_biases[layer].values,
                0.0,
            )
            scattered = np.zeros((h.n, edge.shape[1]))
            for i, incident in enumerate(h.node_to_edges):
                if incident:
                    scattered[i] = edge[list(incident)].mean(axis=0)
            x = np.maximum(
                scattered @ model.node_weights[layer].values
                + model.node_biases[layer].values,
                0.0,
            )
        logits = x @ model.node_head_weight.values + model.node_head_bias.values
        worst = max(worst, float(np.max(np.abs(out.node_logits.values - logits))))
    _verdict(
        "criterion 6 (alpha=beta=0 equals mean aggregation)",
        worst < 1e-12,
        f"max deviation {worst:.3g} < 1e-12",
    )


def test_criterion_07_planted_two_communities():
    h, labels = planted_two_communities(n=200, m=60, seed=0)
    features = identity_features(h.n)
    started = time.perf_counter()
    hits = []
    for seed in range(5):
        train_mask, _ = split_labeled(labels, 0.10, seed=seed)
        config = TrainConfig(seed=seed)
        _, metrics = train_node_classifier(h, features, labels, train_mask, config)
        hits.append(metrics.final_test_acc)
    elapsed = time.perf_counter() - started
    passing = sum(acc >= 0.90 for acc in hits)
    ok = passing >= 4 and elapsed < 60.0
    _verdict(
        "criterion 7 (planted communities, 10% labels, 5 seeds)",
        ok,
        f"{passing}/5 seeds >= 0.90 (accs: "
        + ", ".join(f"{a:.3f}" for a in hits)
        + f"); {elapsed:.1f}s < 60s",
    )


@pytest.mark.skipif(
    not (CITESEER_DIR / "docs.tsv").is_file(),
    reason="criterion 8 skipped: no CiteSeer corpus at data/citeseer/"
    " (docs.tsv, relations.tsv, labels.tsv)",
)
def test_criterion_08_citeseer_reproduction(tmp_path):
    out = tmp_path / "citeseer"
    run_ingest(
        CITESEER_DIR / "docs.tsv",
        CITESEER_DIR / "relations.tsv",
        CITESEER_DIR / "labels.tsv",
        out,
        mode="cocite",
        feature_kind="bow",
    )
    h = read_hypergraph(out / "hypergraph.txt")
    from hnhn.autodiff import read_tensor

    with open(out / "features.bin", "rb") as fh:
        features = read_tensor(fh)
    labels = load_labels(out / "labels.csv")
    edge_labels = load_labels(out / "edge_labels.csv")
    if len(labels) < h.n:
        labels = np.concatenate([labels, np.full(h.n - len(labels), -1, dtype=np.int64)])
    if len(edge_labels) < h.m:
        edge_labels = np.concatenate(
            [edge_labels, np.full(h.m - len(edge_labels), -1, dtype=np.int64)]
        )

    node_accs, edge_accs = [], []
    for seed in range(5):
        node_mask, _ = split_labeled(labels, 0.15, seed=seed)
        _, metrics = train_node_classifier(
            h, features, labels, node_mask, TrainConfig(seed=seed)
        )
        node_accs.append(metrics.final_test_acc)
        edge_mask, _ = split_labeled(edge_labels, 0.15, seed=seed)
        _, edge_metrics = train_edge_classifier(
            h, features, edge_labels, edge_mask, TrainConfig(seed=seed)
        )
        edge_accs.append(edge_metrics.final_test_acc)
    node_mean = 100.0 * float(np.mean(node_accs))
    edge_mean = 100.0 * float(np.mean(edge_accs))
    ok = abs(node_mean - 64.8) <= 5.0 and abs(edge_mean - 62.79) <= 5.0
    _verdict(
        "criterion 8 (CiteSeer within +-5 points)",
        ok,
        f"node {node_mean:.2f} vs 64.8, edge {edge_mean:.2f} vs 62.79",
    )


def test_criterion_09_scaling_exponent():
    points, exponent = run_scaling_bench(seed=0, repeats=3)
    sweep = ", ".join(f"{p.scale}x={p.seconds:.3f}s" for p in points)
    _verdict(
        "criterion 9 (incidence scaling exponent)",
        exponent <= 1.5,
        f"fitted exponent {exponent:.3f} <= 1.5 ({sweep})",
    )


def test_criterion_10_train_is_byte_deterministic(tmp_path):
    import csv

    from hnhn.autodiff import write_tensor
    from hnhn.hypergraph import write_hypergraph

    h, labels = planted_two_communities(n=24, m=8, seed=0, min_size=3, max_size=5)
    root = tmp_path / "data"
    root.mkdir()
    write_hypergraph(h, root / "hypergraph.txt")
    with open(root / "features.bin", "wb") as fh:
        write_tensor(fh, identity_features(h.n))
    with open(root / "labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "label"])
        for i, label in enumerate(labels):
            writer.writerow([i, int(label)])

    flags = [
        "train", "--data", str(root),
        "--epochs", "120", "--hidden", "32", "--dropout", "0.3",
        "--label-rate", "0.5", "--seed", "9",
    ]
    first, second = tmp_path / "run1.csv", tmp_path / "run2.csv"
    assert main([*flags, "--out", str(first)]) == 0
    assert main([*flags, "--out", str(second)]) == 0
    identical = first.read_bytes() == second.read_bytes()
    _verdict(
        "criterion 10 (byte-identical metrics CSV)",
        identical,
        f"two runs, {len(first.read_bytes())} bytes each, identical={identical}",
    )
