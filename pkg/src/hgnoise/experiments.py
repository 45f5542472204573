"""Desk-scale recipes for the three numerical studies.

Each recipe is a pure function of its :class:`RunConfig`; outputs are CSV
and JSON text, so reruns with the same seed are byte-identical whatever the
thread count.

* ``fig3``: exact decoder on K4 with a random noisy input; l1 error vs shots.
* ``fig4``: mean ratio ``|p1 - p2|_1 / |mu1 - mu2|_1`` over random pairs.
* ``fig5``: series decoders on the 18-qubit Union Jack state; l1 error vs
  measurement events, plus the Hamming-weight histogram of p.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .decoder import decode_series, series_coefficients, solve_exact
from .distribution import Distribution
from .hypergraph import Hypergraph, max_vertex_neighbors
from .noise import PRESET_KINDS, PauliChannel, preset_local
from .sampler import convolve, hamming_histogram, l1, sample_powers
from .tailoring import dominant_support, overlap_sq, tailored_distribution
from .transform import fwht

SCHEMA_VERSION = 1


@dataclass
class ExperimentResult:
    name: str
    tables: dict[str, list[dict]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def files(self) -> dict[str, str]:
        out = {f"{name}.csv": _csv_text(name, rows) for name, rows in self.tables.items()}
        out[f"{self.name}_meta.json"] = json.dumps(self.meta, indent=2, sort_keys=True) + "\n"
        return out

    def write(self, out_dir: str | Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in self.files().items():
            path = out_dir / name
            path.write_text(text)
            written.append(path)
        return written


def _csv_text(schema: str, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: hgnoise.{schema}/{SCHEMA_VERSION}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def child_seed(seed: int, *keys: int) -> int:
    """Deterministic integer seed for sub-task ``keys`` of a run."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


def random_channel(graph: Hypergraph, p0: float, rng: np.random.Generator) -> PauliChannel:
    """Random Pauli channel whose tailored distribution has ``p_0 = p0`` exactly.

    Error weights are Dirichlet-uniform over all non-identity Paulis; the
    total error rate is then solved for, since ``p_0`` is affine in it.
    """
    n = graph.n
    if n > 6:
        raise ValueError("random channels enumerate all 4^n Paulis; n <= 6")
    paulis = [(bx, bz) for bx in range(1 << n) for bz in range(1 << n) if bx or bz]
    weights = rng.dirichlet(np.ones(len(paulis)))
    back = sum(w * overlap_sq(graph, bx, bz) for w, (bx, bz) in zip(weights, paulis))
    mass = (1.0 - p0) / (1.0 - back)
    if not 0.0 <= mass <= 1.0:
        raise ValueError(f"cannot reach p0={p0} with this draw")
    rates = {(0, 0): 1.0 - mass}
    rates.update({key: mass * w for key, w in zip(paulis, weights)})
    return PauliChannel.from_rates(n, rates)


def make_channel(graph: Hypergraph, noise: dict, rng: np.random.Generator) -> PauliChannel:
    kind = noise["kind"]
    if kind == "random":
        return random_channel(graph, float(noise.get("p0", 0.819)), rng)
    return preset_local(graph.n, graph, kind, float(noise["tau"]), noise.get("cutoff", 4))


def normalized(p: Distribution) -> Distribution:
    total = p.total()
    return Distribution(p.n, {m: v / total for m, v in p.entries.items()}, p.kind)


def exp_fig3(cfg: RunConfig) -> ExperimentResult:
    graph = cfg.build_graph()
    rng = np.random.default_rng(child_seed(cfg.seed, 0))
    channel = make_channel(graph, cfg.noise, rng)
    p = normalized(tailored_distribution(graph, channel))
    tracked = [m for m, _ in sorted(p.entries.items(), key=lambda kv: (-kv[1], kv[0]))][: cfg.components]

    rows = []
    for i, shots in enumerate(cfg.shots):
        batch = sample_powers(p, int(shots), 0, child_seed(cfg.seed, 1, i), threads=None)
        est, info = solve_exact(batch.empirical(0), return_info=True)
        row = {"shots": int(shots), "l1_error": l1(est, p), "clamped": info["clamped"]}
        for m in tracked:
            row[f"p_{m:#x}"] = est[m]
        rows.append(row)
    meta = {
        "experiment": "fig3",
        "seed": cfg.seed,
        "n": graph.n,
        "p0": p[0],
        "noise": cfg.noise,
        "true_components": {hex(m): p[m] for m in tracked},
    }
    return ExperimentResult("fig3", {"fig3": rows}, meta)


def random_near_identity(n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Dense vector with ``v_0 ~ U[1 - delta, 1]`` and Dirichlet-uniform rest."""
    v = np.empty(1 << n)
    v0 = rng.uniform(1.0 - delta, 1.0)
    v[0] = v0
    v[1:] = (1.0 - v0) * rng.dirichlet(np.ones((1 << n) - 1))
    return v


def _square(p: np.ndarray) -> np.ndarray:
    spec = fwht(p)
    return fwht(spec * spec, inplace=True) / p.size


def ratio_sample(n: int, delta: float, pairs: int, draw: str, rng: np.random.Generator) -> np.ndarray:
    ratios = np.empty(pairs)
    for i in range(pairs):
        if draw == "p":
            p1, p2 = random_near_identity(n, delta, rng), random_near_identity(n, delta, rng)
            mu1, mu2 = _square(p1), _square(p2)
        else:
            mu1, mu2 = random_near_identity(n, delta, rng), random_near_identity(n, delta, rng)
        # decode both laws, as a measured pipeline would
        d1 = solve_exact(Distribution.from_dense(mu1), atol=0.0).to_dense()
        d2 = solve_exact(Distribution.from_dense(mu2), atol=0.0).to_dense()
        ratios[i] = np.abs(d1 - d2).sum() / np.abs(mu1 - mu2).sum()
    return ratios


def exp_fig4(cfg: RunConfig) -> ExperimentResult:
    rows = []
    for di, delta in enumerate(cfg.deltas):
        for n in cfg.n_values:
            rng = np.random.default_rng(child_seed(cfg.seed, di, n))
            r = ratio_sample(n, float(delta), cfg.pairs, cfg.draw, rng)
            rows.append({
                "n": n,
                "delta": delta,
                "pairs": cfg.pairs,
                "mean_ratio": float(r.mean()),
                "std_ratio": float(r.std(ddof=1)) if r.size > 1 else 0.0,
                "half_plus_delta": 0.5 + delta,
            })
    meta = {"experiment": "fig4", "seed": cfg.seed, "draw": cfg.draw, "pairs": cfg.pairs}
    return ExperimentResult("fig4", {"fig4": rows}, meta)


def preset_infidelities(graph: Hypergraph, tau: float, cutoff: int) -> dict[str, float]:
    return {
        kind: tailored_distribution(graph, preset_local(graph.n, graph, kind, tau, cutoff)).infidelity()
        for kind in PRESET_KINDS
    }


def exp_fig5(cfg: RunConfig) -> ExperimentResult:
    graph = cfg.build_graph()
    noise = cfg.noise
    cutoff = noise.get("cutoff", 4)
    channel = preset_local(graph.n, graph, noise["kind"], float(noise["tau"]), cutoff)
    raw = tailored_distribution(graph, channel)
    p = normalized(raw)
    delta = p.infidelity()

    tables = [(tuple(ws), series_coefficients(*ws)) for ws in cfg.ws]
    max_power = max(t.a_ws for _, t in tables) - 1
    rows = []
    for i, shots in enumerate(cfg.shots):
        batch = sample_powers(p, int(shots), max_power, child_seed(cfg.seed, i), estimator=cfg.estimator)
        for (w, s), table in tables:
            est = decode_series(batch, table)
            rows.append({
                "measurements": int(shots),
                "w": w,
                "s": s,
                "p_samples": int(shots) * 2 * table.a_ws,
                "l1_error": l1(est, p),
                "negativity": est.negativity(),
            })

    hist = hamming_histogram(p)
    hist_rows = [{"weight": k, "mass": float(v)} for k, v in enumerate(hist)]
    meta = {
        "experiment": "fig5",
        "seed": cfg.seed,
        "n": graph.n,
        "edges": len(graph.edges),
        "max_vertex_neighbors": max_vertex_neighbors(graph),
        "noise": noise,
        "delta": delta,
        "truncation_deficit": channel.deficit,
        "support_size": len(p),
        "dominant_support_size_eps_0.01": len(dominant_support(p, 0.01)),
        "delta_by_preset": preset_infidelities(graph, float(noise["tau"]), cutoff),
        "estimator": cfg.estimator,
        "samples_per_measurement": {f"{w},{s}": 2 * t.a_ws for (w, s), t in tables},
        "true_mu0": convolve(p, p)[0],
    }
    return ExperimentResult("fig5", {"fig5": rows, "fig5_hist": hist_rows}, meta)


RECIPES = {"fig3": exp_fig3, "fig4": exp_fig4, "fig5": exp_fig5}


def run(cfg: RunConfig) -> ExperimentResult:
    return RECIPES[cfg.experiment](cfg)
