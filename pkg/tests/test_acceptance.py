"""Acceptance suite: one test per release criterion.

Tolerances and runtime budgets are fixed; see the README for the expected
outcome of each test.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
import yaml

from hgnoise.cli import main
from hgnoise.config import RunConfig
from hgnoise.decoder import bias_bound, d_table, decode_series, series_coefficients, solve_exact
from hgnoise.experiments import run
from hgnoise.hypergraph import Hypergraph, build_k4
from hgnoise.noise import PauliChannel
from hgnoise.pec import pec_approx, pec_exact
from hgnoise.sampler import THREADS_ENV, convolve, exact_powers, l1, power_support_check, support_propagation_check
from hgnoise.distribution import Distribution
from hgnoise.verifier import random_kraus, verify_twirl, verify_two_copy

from conftest import random_graph, random_prob

# Published closed forms and decimal tables, copied verbatim.
RATIONAL_TABLES = {
    (2, 0): ["3/2", "-1/2"],
    (2, 1): ["7/4", "-1", "1/4"],
    (3, 0): ["111/64", "-53/64", "-3/64", "9/64"],
}
DECIMAL_TABLES = {
    (4, 0): [1.65527344, -0.237304688, -1.18847656, 0.83307812, 0.0517578125, -0.0947265625,
             -0.0185546875, -0.0009756525],
    (5, 0): [1.37901783, 1.03779793, -2.91566753, 0.900688171, 1.32462502, -0.464344025,
             -0.370359421, 0.041007996, 0.059091568, 0.010728836, 0.00059604],
    (5, 1): [1.60532922, 0.736049414, -3.75050509, 2.34237552, 1.59005195, -1.54467821,
             -0.470942257, 0.415027142, 0.142522156, -0.0376999378, -0.02361834, -0.00372529,
             -0.00018626],
    (5, 2): [1.81749614, 0.3311715566, -4.41529479, 4.31002729, 1.19872184, -3.1739106,
             0.0270242803, 1.16613880, 0.021392014, -0.254116021, -0.043117907, 0.023052337,
             0.009534415, 0.0012805685, 0.0000582077],
}
DECIMAL_TOL = 1e-6


def test_coefficient_regression():
    start = time.perf_counter()
    for ws, expected in RATIONAL_TABLES.items():
        series_coefficients.cache_clear()
        assert list(series_coefficients(*ws).coeffs) == [Fraction(c) for c in expected], ws
    mismatches = []
    for ws, expected in DECIMAL_TABLES.items():
        got = series_coefficients(*ws).floats
        if len(got) != len(expected):
            mismatches.append(f"{ws}: {len(got)} coefficients, table has {len(expected)}")
            continue
        for j, (g, e) in enumerate(zip(got, expected)):
            if abs(g - e) > DECIMAL_TOL:
                mismatches.append(f"{ws} c{j}: computed {g:.10g}, table {e:.10g}")
    assert time.perf_counter() - start < 1.0
    assert not mismatches, "; ".join(mismatches)


def test_exact_decoder_roundtrip():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        p = random_prob(n, float(rng.uniform(0.0, 0.2)), rng)
        worst = max(worst, l1(solve_exact(convolve(p, p)), p))
    assert worst <= 1e-9
    assert time.perf_counter() - start < 30


def test_protocol_certification():
    rng = np.random.default_rng(99)
    start = time.perf_counter()
    for i in range(20):
        n = (2, 3, 4)[i % 3]
        graph = random_graph(n, rng, max_edges=5)
        p = random_prob(n, float(rng.uniform(0.01, 0.3)), rng)
        rep = verify_two_copy(graph, p)
        assert rep.max_uniform_dev <= 1e-12
        assert rep.max_conv_dev <= 1e-10
        assert rep.max_uprime_spread <= 1e-10
        assert rep.passed
    k4 = build_k4()
    pauli = PauliChannel.from_rates(4, {(0, 0): 0.7, (0b0011, 0b0100): 0.2, (0b1000, 0b1000): 0.1})
    assert verify_twirl(k4, pauli).passed
    assert verify_twirl(k4, random_kraus(4, 4, rng)).passed
    assert time.perf_counter() - start < 120


def test_series_decoder_bias():
    rng = np.random.default_rng(5)
    delta = 0.05
    for n in range(2, 9):
        for _ in range(3):
            p = random_prob(n, delta, rng)
            powers = exact_powers(convolve(p, p), 3)
            bias = {ws: l1(decode_series(powers, series_coefficients(*ws)), p) for ws in ((2, 0), (3, 0))}
            assert bias[(3, 0)] < bias[(2, 0)]
            for (w, s), b in bias.items():
                assert b <= 10 * bias_bound(w, s, delta)


def test_fig4_ratio():
    delta = 0.05
    cfg = RunConfig.from_dict({
        "experiment": "fig4", "seed": 11, "n_values": list(range(2, 11)), "deltas": [delta], "pairs": 500,
    })
    start = time.perf_counter()
    rows = run(cfg).tables["fig4"]
    assert time.perf_counter() - start < 600
    means = np.array([r["mean_ratio"] for r in rows])
    assert np.all((means >= 0.4) & (means <= 0.65))
    # settles onto a plateau no higher than 1/2 + delta as n grows
    steps = np.abs(np.diff(means))
    assert steps[-3:].max() < steps[:3].max()
    assert 0.5 <= means[-1] <= 0.5 + delta


def test_fig5_union_jack():
    cfg = RunConfig.from_dict({"experiment": "fig5", "seed": 7})
    start = time.perf_counter()
    res = run(cfg)
    assert time.perf_counter() - start < 900
    assert res.meta["n"] == 18
    delta = res.meta["delta"]
    assert 0.07 <= delta <= 0.12
    final = {(r["w"], r["s"]): r["l1_error"] for r in res.tables["fig5"] if r["measurements"] == 100_000}
    assert final[(3, 0)] < delta
    assert final[(3, 0)] < final[(2, 0)]


def test_pec_identities():
    rng = np.random.default_rng(8)
    for n in range(1, 11):
        for delta in (0.01, 0.1, 0.3):
            p = random_prob(n, delta, rng)
            q = pec_exact(p).q
            assert abs(q.total() - 1.0) <= 1e-10
            assert l1(convolve(q, p), Distribution.point(n)) <= 1e-10
            if delta <= 0.1:
                approx = pec_approx(p)
                assert approx.l1_norm == pytest.approx(1 + 2 * delta, abs=1e-12)
                assert l1(convolve(approx.q, p), Distribution.point(n)) <= 8 * delta**2


def test_support_propagation():
    rng = np.random.default_rng(21)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        p = random_prob(n, float(rng.uniform(0.0, 0.3)), rng, support=int(rng.integers(1, 12)))
        size = int(rng.integers(1, len(p) + 1))
        others = [m for m in p.support() if m != 0]
        chosen = rng.choice(others, size=min(size, len(others)), replace=False).tolist() if others else []
        A = {0, *chosen}
        eps, mass = support_propagation_check(p, A)
        assert mass >= 1 - 2 * eps - 1e-12
        mu = convolve(p, p)
        for j in range(4):
            eps_mu, mass_j = power_support_check(mu, A, j)
            assert mass_j >= 1 - (j + 1) * eps_mu - 1e-12


def test_dmax_scaling_and_eta():
    for w in range(4, 13):
        _, d_max = d_table(w)
        assert 0.8 <= float(d_max) / (w / 4) <= 1.2, w
    for w in range(2, 9):
        for s in range(0, 6):
            assert series_coefficients(w, s).eta <= 5119


def _outputs(tmp_path, tag, threads, seed):
    d = tmp_path / tag
    d.mkdir()
    dist = tmp_path / "p.json"
    if not dist.exists():
        assert main(["tailor", "--preset", "k4", "--noise", "depolarizing", "--tau", "0.05", "--out", str(dist)]) == 0
    cfg = tmp_path / "fig5.yaml"
    cfg.write_text(yaml.safe_dump({
        "experiment": "fig5", "shots": [2000, 70000], "graph": {"rows": 1, "cols": 2}, "ws": [[2, 0], [3, 0]],
    }))
    t = ["--threads", str(threads)]
    assert main(t + ["sample", "--dist", str(dist), "--shots", "150000", "--max-power", "3",
                     "--seed", str(seed), "--estimator", "subsets", "--out", str(d / "batch.json")]) == 0
    assert main(t + ["sample", "--dist", str(dist), "--shots", "150000", "--max-power", "2",
                     "--seed", str(seed), "--format", "csv", "--out", str(d / "batch.csv")]) == 0
    assert main(t + ["verify-protocol", "--preset", "k4", "--seed", str(seed), "--out", str(d / "verify.json")]) == 0
    assert main(t + ["experiment", "fig3", "--seed", str(seed), "--out", str(d / "fig3")]) == 0
    assert main(t + ["experiment", "fig5", "--seed", str(seed), "--config", str(cfg), "--out", str(d / "fig5")]) == 0
    return {str(f.relative_to(d)): f.read_bytes() for f in sorted(d.rglob("*")) if f.is_file()}


def test_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    one = _outputs(tmp_path, "a", 1, 7)
    four = _outputs(tmp_path, "b", 4, 7)
    again = _outputs(tmp_path, "c", 3, 7)
    other = _outputs(tmp_path, "d", 4, 8)
    assert len(one) == 8
    assert one == four == again
    assert other["batch.json"] != one["batch.json"]
