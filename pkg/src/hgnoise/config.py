"""Run configuration for the experiment recipes.

Configs are YAML files.  Every key except ``seed`` has a per-experiment
default, so the smallest valid file is::

    experiment: fig3
    seed: 7

Full schema (all optional except ``experiment`` and ``seed``)::

    experiment: fig3 | fig4 | fig5
    seed: int
    out: results/                      # output directory
    graph:                             # fig3 and fig5
      preset: k4 | union_jack          # or  file: graph.json
      rows: 2
      cols: 3
    noise:
      kind: depolarizing | x | z | xz | xz_total | random
      tau: 0.005
      cutoff: 4                        # weight truncation K
      p0: 0.819                        # target fidelity for kind=random
    shots: [1000, 10000, 100000]       # strictly increasing
    ws: [[2, 0], [2, 1], [3, 0]]       # fig5 decoders
    estimator: subsets | prefix        # fig5 power estimator
    components: 4                      # fig3: tracked entries of p
    n_values: [2, 3, 4]                # fig4
    deltas: [0.02, 0.05, 0.1]          # fig4
    pairs: 500                         # fig4
    draw: p | mu                       # fig4: which law is drawn at random
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .hypergraph import Hypergraph, build_k4, build_union_jack
from .noise import PRESET_KINDS

EXPERIMENTS = ("fig3", "fig4", "fig5")

_DEFAULTS = {
    "fig3": {
        "graph": {"preset": "k4"},
        "noise": {"kind": "random", "p0": 0.819},
        "shots": [100, 300, 1000, 3000, 10000, 30000, 100000, 300000, 1000000],
        "components": 4,
    },
    "fig4": {
        "n_values": [2, 3, 4, 5, 6, 7, 8, 9, 10],
        "deltas": [0.02, 0.05, 0.1],
        "pairs": 500,
        "draw": "p",
    },
    "fig5": {
        "graph": {"preset": "union_jack", "rows": 2, "cols": 3},
        "noise": {"kind": "depolarizing", "tau": 0.005, "cutoff": 4},
        "shots": [1000, 3000, 10000, 30000, 100000],
        "ws": [[2, 0], [2, 1], [3, 0]],
        "estimator": "subsets",
    },
}


@dataclass
class RunConfig:
    experiment: str
    seed: int
    out: str = "results"
    graph: dict = field(default_factory=dict)
    noise: dict = field(default_factory=dict)
    shots: list[int] = field(default_factory=list)
    ws: list[list[int]] = field(default_factory=list)
    estimator: str = "subsets"
    components: int = 4
    n_values: list[int] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    pairs: int = 500
    draw: str = "p"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        exp = data.get("experiment")
        if exp not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
        if "seed" not in data or data["seed"] is None:
            raise ValueError("seed is mandatory")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged = {**_DEFAULTS[exp], **data}
        for key in ("graph", "noise"):
            if key in _DEFAULTS[exp] and key in data:
                merged[key] = {**_DEFAULTS[exp][key], **data[key]}
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ValueError("config file must hold a mapping")
        return cls.from_dict(data)

    def validate(self) -> None:
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.experiment in ("fig3", "fig5"):
            if not self.shots or any(int(s) < 1 for s in self.shots):
                raise ValueError("shots must be a nonempty list of positive integers")
            if any(b <= a for a, b in zip(self.shots, self.shots[1:])):
                raise ValueError("shots schedule must be strictly increasing")
        if self.experiment == "fig5":
            if not self.ws:
                raise ValueError("ws must list at least one (w, s) pair")
            for pair in self.ws:
                if len(pair) != 2 or pair[0] < 2 or pair[1] < 0:
                    raise ValueError(f"bad (w, s) pair {pair}")
            if self.estimator not in ("prefix", "subsets"):
                raise ValueError("estimator must be 'prefix' or 'subsets'")
            kind = self.noise.get("kind")
            if kind not in PRESET_KINDS:
                raise ValueError(f"fig5 noise kind must be one of {PRESET_KINDS}")
        if self.experiment == "fig3":
            kind = self.noise.get("kind")
            if kind != "random" and kind not in PRESET_KINDS:
                raise ValueError(f"unknown noise kind {kind!r}")
            if kind == "random" and not 0 < float(self.noise.get("p0", 0)) <= 1:
                raise ValueError("noise.p0 must lie in (0, 1]")
        if self.experiment == "fig4":
            if not self.n_values or any(not 1 <= n <= 20 for n in self.n_values):
                raise ValueError("n_values must lie in [1, 20]")
            if not self.deltas or any(not 0 < d < 0.5 for d in self.deltas):
                raise ValueError("deltas must lie in (0, 0.5)")
            if self.pairs < 1:
                raise ValueError("pairs must be >= 1")
            if self.draw not in ("p", "mu"):
                raise ValueError("draw must be 'p' or 'mu'")

    def build_graph(self) -> Hypergraph:
        spec = self.graph
        if "file" in spec:
            with open(spec["file"]) as fh:
                return Hypergraph.from_json(json.load(fh))
        preset = spec.get("preset")
        if preset == "k4":
            return build_k4()
        if preset == "union_jack":
            return build_union_jack(int(spec.get("rows", 2)), int(spec.get("cols", 3)))
        raise ValueError(f"unknown graph preset {preset!r}")
