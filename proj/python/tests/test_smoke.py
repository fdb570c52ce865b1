import numpy as np
import pytest

import rrk


def random_queries(pts, count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        a, b, c = rng.uniform(-0.1, 1.1, 3)
        lo, hi = sorted(rng.uniform(-0.1, 1.1, 2))
        yield a, b, c, lo, hi


@pytest.mark.parametrize("structure", ["linear", "fast"])
@pytest.mark.parametrize("kind", ["uniform", "clustered", "adversarial-duplicates"])
def test_matches_oracle(structure, kind):
    pts = rrk.generate(kind, 300, seed=4)
    ix = rrk.Index.build(pts, structure)
    assert len(ix) == 300
    assert ix.structure == structure
    for q in random_queries(pts, 50, 9):
        want = rrk.oracle(pts, *q)
        assert ix.query(*q) == want
        assert ix.any(*q) == bool(want)


def test_diagonal_prefix():
    pts = rrk.generate("diagonal", 20)
    ix = rrk.Index.build(pts, "fast")
    assert ix.query(5, 5, 5, 1, 20) == [1, 2, 3, 4, 5]
    assert ix.query(5, 5, 5, 6, 20) == []


def test_stats_space_and_audit():
    pts = rrk.generate("uniform", 500, seed=2)
    ix = rrk.Index.build(pts, "linear", rho=2, t0=16)
    ids, st = ix.query_stats(0.9, 0.9, 0.9, 0.0, 1.0)
    assert st["reported"] == len(ids) > 0
    assert st["nodes_visited"] >= st["canonical_units"]
    sp = ix.space()
    assert sp["design_bits_total"] == sum(sp["design_bits"].values())
    rep = ix.audit()
    assert rep["ok"], rep["failures"]
    assert rep["decode_hops_max"] <= rep["decode_hop_bound"]


def test_save_load(tmp_path):
    pts = rrk.generate("clustered", 400, seed=3)
    ix = rrk.Index.build(pts, "fast")
    path = str(tmp_path / "ix.rrk")
    ix.save(path)
    back = rrk.Index.load(path)
    assert back.space() == ix.space()
    for q in random_queries(pts, 30, 1):
        assert back.query(*q) == ix.query(*q)


def test_bad_inputs(tmp_path):
    with pytest.raises(ValueError):
        rrk.Index.build(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        rrk.Index.build(rrk.generate("uniform", 5), "quadtree")
    bad = tmp_path / "bad.rrk"
    bad.write_bytes(b"RRK1 not really")
    with pytest.raises(ValueError):
        rrk.Index.load(str(bad))
