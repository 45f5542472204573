import csv
import io

import numpy as np
import pytest

from hgnoise.config import RunConfig
from hgnoise.experiments import child_seed, random_channel, run
from hgnoise.hypergraph import build_k4
from hgnoise.tailoring import tailored_distribution


def _rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema: hgnoise.")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_config_minimal():
    cfg = RunConfig.from_dict({"experiment": "fig5", "seed": 3})
    assert cfg.noise["tau"] == 0.005 and cfg.ws == [[2, 0], [2, 1], [3, 0]]
    cfg = RunConfig.from_dict({"experiment": "fig5", "seed": 3, "noise": {"kind": "z"}})
    assert cfg.noise == {"kind": "z", "tau": 0.005, "cutoff": 4}


@pytest.mark.parametrize("data", [
    {"experiment": "fig3"},
    {"experiment": "fig9", "seed": 1},
    {"experiment": "fig3", "seed": 1, "bogus": 2},
    {"experiment": "fig3", "seed": 1, "shots": [100, 100]},
    {"experiment": "fig3", "seed": -1},
    {"experiment": "fig5", "seed": 1, "ws": [[1, 0]]},
    {"experiment": "fig4", "seed": 1, "deltas": [0.7]},
    {"experiment": "fig4", "seed": 1, "draw": "q"},
])
def test_config_rejects(data):
    with pytest.raises(ValueError):
        RunConfig.from_dict(data)


def test_config_load(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("experiment: fig4\nseed: 2\nn_values: [2, 3]\npairs: 5\n")
    cfg = RunConfig.load(path)
    assert cfg.n_values == [2, 3] and cfg.pairs == 5


def test_child_seed_distinct():
    assert child_seed(1, 0) != child_seed(1, 1) != child_seed(2, 0)
    assert child_seed(1, 0) == child_seed(1, 0)


def test_random_channel_hits_p0():
    g = build_k4()
    ch = random_channel(g, 0.819, np.random.default_rng(0))
    assert tailored_distribution(g, ch)[0] == pytest.approx(0.819, abs=1e-12)


def test_fig3_tiny():
    cfg = RunConfig.from_dict({"experiment": "fig3", "seed": 7, "shots": [1000, 100000]})
    res = run(cfg)
    rows = _rows(res.files()["fig3.csv"])
    assert [int(r["shots"]) for r in rows] == [1000, 100000]
    assert float(rows[1]["l1_error"]) < float(rows[0]["l1_error"])
    assert res.meta["p0"] == pytest.approx(0.819)
    assert res.files() == run(cfg).files()


def test_fig4_tiny():
    cfg = RunConfig.from_dict({"experiment": "fig4", "seed": 7, "n_values": [2, 3], "deltas": [0.05], "pairs": 20})
    rows = _rows(run(cfg).files()["fig4.csv"])
    assert len(rows) == 2
    for r in rows:
        assert 0.3 < float(r["mean_ratio"]) < 0.7


def test_fig5_tiny(tmp_path):
    cfg = RunConfig.from_dict({
        "experiment": "fig5", "seed": 7, "shots": [500, 1000],
        "graph": {"rows": 1, "cols": 1}, "ws": [[2, 0]],
    })
    res = run(cfg)
    rows = _rows(res.files()["fig5.csv"])
    assert len(rows) == 2 and int(rows[0]["p_samples"]) == 500 * 4
    assert res.meta["n"] == 5
    written = res.write(tmp_path)
    assert {p.name for p in written} == {"fig5.csv", "fig5_hist.csv", "fig5_meta.json"}
