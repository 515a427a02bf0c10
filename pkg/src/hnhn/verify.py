"""Executable structural checks: expansion identities on random instances,
the Fano-plane separation witness, and the star/clique spectral relation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expansion import (
    check_clique_product,
    check_linear_collapse,
    check_weight_tied,
    clique_adjacency,
    count_fano_relabelings,
    incidence_matrix,
    star_adjacency,
    symmetric_eigenvalues,
)
from .model import distinguishability_test
from .rng import CounterRng
from .synthetic import random_hypergraph

CLIQUE_IDENTICAL_TOL = 1e-12
MODEL_DIFFER_TOL = 1e-6
SPECTRAL_TOL = 1e-7
FANO_RELABELING_COUNT = 30


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_instance(k: int, seed: int, max_n: int = 20, max_m: int = 20):
    rng = CounterRng(seed * 100_003 + k)
    n = 2 + int(rng.integers(max_n - 1, 1)[0])
    m = 1 + int(rng.integers(max_m, 1)[0])
    d = 1 + int(rng.integers(8, 1)[0])
    h = random_hypergraph(n, m, seed=seed * 7919 + k, max_size=min(4, n))
    return h, d, rng


def run_lemma_suite(count: int = 100, seed: int = 0) -> list[CheckResult]:
    """Clique-product, linear-collapse, and weight-tied checks on `count`
    seeded random hypergraphs (n, m <= 20, feature dim <= 8)."""
    product_ok = collapse_ok = tied_ok = 0
    for k in range(count):
        h, d, rng = _random_instance(k, seed)
        x_v = rng.uniform(-1.0, 1.0, (h.n, d))
        w_e = rng.uniform(-1.0, 1.0, (d, d))
        w_v = rng.uniform(-1.0, 1.0, (d, d))
        b_e = rng.uniform(-1.0, 1.0, (1, d))
        b_v = rng.uniform(-1.0, 1.0, (1, d))
        product_ok += check_clique_product(h)
        collapse_ok += check_linear_collapse(h, x_v, w_e, w_v, b_e, b_v)
        tied_ok += check_weight_tied(h, x_v, w_e, b_e, layers=2)
    return [
        CheckResult(
            "clique-product", product_ok == count, f"{product_ok}/{count} exact"
        ),
        CheckResult(
            "linear-collapse", collapse_ok == count, f"{collapse_ok}/{count} within 1e-9"
        ),
        CheckResult(
            "weight-tied", tied_ok == count, f"{tied_ok}/{count} within 1e-9"
        ),
    ]


def run_fano_suite(seed: int = 0) -> list[CheckResult]:
    """Clique convolution cannot separate the Fano pair, the two-phase model
    can, and exactly 30 relabelings share the complete-graph expansion."""
    diffs = distinguishability_test(seed=seed)
    relabelings = count_fano_relabelings()
    return [
        CheckResult(
            "fano-clique-identical",
            diffs["clique_diff"] < CLIQUE_IDENTICAL_TOL,
            f"clique outputs identical, max |diff| = {diffs['clique_diff']:.3g}",
        ),
        CheckResult(
            "fano-model-separates",
            diffs["model_diff"] > MODEL_DIFFER_TOL,
            f"HNHN outputs differ, max |diff| = {diffs['model_diff']:.3g}",
        ),
        CheckResult(
            "fano-relabeling-count",
            relabelings == FANO_RELABELING_COUNT,
            f"{relabelings} distinct relabelings (expected {FANO_RELABELING_COUNT})",
        ),
    ]


def spectral_deviations(h) -> tuple[float, float]:
    """(worst lambda^2 membership gap, worst symmetry gap) for one hypergraph.

    The square of the bipartite adjacency is block diagonal with the two
    incidence Gram blocks, so every eigenvalue squared must appear in the
    clique adjacency spectrum or the edge-side Gram spectrum. The edge-side
    block only contributes when m > n (extra zeros); for m <= n membership
    in the clique spectrum alone already holds.
    """
    a = incidence_matrix(h)
    b_eigs = np.asarray(symmetric_eigenvalues(star_adjacency(h)))
    c_eigs = np.asarray(symmetric_eigenvalues(clique_adjacency(h)))
    gram_eigs = np.asarray(symmetric_eigenvalues(a.T @ a))
    pool = np.concatenate([c_eigs, gram_eigs])
    membership = max(float(np.min(np.abs(lam * lam - pool))) for lam in b_eigs)
    symmetry = float(np.max(np.abs(b_eigs + b_eigs[::-1])))
    return membership, symmetry


def run_spectral_suite(count: int = 20, seed: int = 0) -> list[CheckResult]:
    """On random hypergraphs with n + m <= 60: every star-expansion
    eigenvalue squared appears in the clique spectrum, and the star spectrum
    is symmetric about zero."""
    worst_membership = worst_symmetry = 0.0
    for k in range(count):
        rng = CounterRng(seed * 100_019 + k)
        n = 5 + int(rng.integers(25, 1)[0])
        m = 2 + int(rng.integers(min(20, 60 - n) - 1, 1)[0])
        h = random_hypergraph(n, m, seed=seed * 104_729 + k, max_size=min(5, n))
        membership, symmetry = spectral_deviations(h)
        worst_membership = max(worst_membership, membership)
        worst_symmetry = max(worst_symmetry, symmetry)
    return [
        CheckResult(
            "spectral-membership",
            worst_membership < SPECTRAL_TOL,
            f"max |lambda^2 - mu| = {worst_membership:.3g}",
        ),
        CheckResult(
            "spectral-symmetry",
            worst_symmetry < SPECTRAL_TOL,
            f"max |lambda + (-lambda)| = {worst_symmetry:.3g}",
        ),
    ]


SUITES = {
    "lemmas": run_lemma_suite,
    "fano": run_fano_suite,
    "spectral": run_spectral_suite,
}


def run_suites(which: str = "all", seed: int = 0) -> list[CheckResult]:
    if which == "all":
        names = list(SUITES)
    elif which in SUITES:
        names = [which]
    else:
        raise ValueError(f"unknown suite {which!r}; choose from {sorted(SUITES)} or all")
    results = []
    for name in names:
        results.extend(SUITES[name](seed=seed))
    return results
