import cmath
import math

import pytest

import tiling


def test_hexagon_counts_match_product_formula():
    for a, b, c in [(1, 1, 1), (2, 2, 2), (2, 3, 1), (3, 3, 3)]:
        g = tiling.hexagon_region(a, b, c)
        assert tiling.count_matchings(g) == tiling.macmahon(a, b, c)
    assert tiling.count_matchings(tiling.hexagon_region(3, 3, 3)) == 980


def test_enumeration_and_edge_probabilities_agree():
    g = tiling.random_region(4, 3, 2, 3, 4)
    ms = tiling.enumerate_matchings(g)
    assert len(ms) == tiling.count_matchings(g)
    probs = tiling.edge_probabilities(g)
    for w in range(len(g)):
        for slot, b in enumerate(g.neighbors(w)):
            if b < 0:
                continue
            freq = sum(m[w] == b for m in ms) / len(ms)
            assert probs[w][slot] == pytest.approx(freq, abs=1e-9)


def test_render_is_deterministic_and_rejects_bad_matchings():
    g = tiling.hexagon_region(1, 1, 1)
    ms = tiling.enumerate_matchings(g)
    assert len(ms) == 2
    svgs = [tiling.render_tiling(g, m) for m in ms]
    assert svgs[0] != svgs[1]
    assert svgs[0] == tiling.render_tiling(g, ms[0])
    assert svgs[0].count("<polygon") == 3
    with pytest.raises(tiling.TilingError):
        tiling.render_tiling(g, [0, 0, 0])


def test_heights_change_by_thirds():
    g = tiling.hexagon_region(2, 2, 2)
    m = tiling.enumerate_matchings(g, 100)[0]
    h = tiling.heights(g, m)
    assert len(h) > 0
    for v in h.values():
        assert abs(3 * v - round(3 * v)) < 1e-12


def test_planar_patch_walk_is_a_martingale_locally():
    p = tiling.PlanarParams(B=complex(1.1, 0.1), C=complex(0.35, 0.9), lam=cmath.exp(1.3j))
    g = tiling.planar_patch(p, 6)
    assert g.validate() == []
    v = g.nearest_interior_vertex(0j)
    rates = g.rates(v)
    drift = sum(r * (g.points[t] - g.points[v]) for t, r in rates)
    speed = sum(r * abs(g.points[t] - g.points[v]) ** 2 for t, r in rates)
    assert abs(drift) < 1e-12
    assert speed == pytest.approx(1.0, abs=1e-12)
    vs, ts, end = tiling.sample_walk(g, v, 5.0, seed=3)
    assert vs[0] == v and ts[0] == 0 and end == 5.0
    assert vs == tiling.sample_walk(g, v, 5.0, seed=3)[0]
    tree = tiling.wilson_tree(g, 2)
    assert all((t == -1) == b for t, b in zip(tree, g.boundary))


def test_disk_green():
    assert tiling.disk_green(0.3, 0.5j) == pytest.approx(tiling.disk_green(0.5j, 0.3))
    assert tiling.disk_green(0.2, cmath.exp(0.7j)) == pytest.approx(0, abs=1e-12)
    assert tiling.disk_green(0, 0.5) == pytest.approx(-math.log(0.5) / (2 * math.pi))


def test_config_round_trip():
    c = tiling.RunConfig()
    c.delta = 1 / 64
    c.project = False
    tol = c.tolerances
    tol.update({"gff_correlation": 0.85, "confidence": 0.9})
    c.tolerances = tol
    d = tiling.parse_config(c.to_text())
    assert d == c and d.hash() == c.hash()
    with pytest.raises(tiling.TilingError):
        tiling.parse_config("[run]\ndelta = fast\n")
    bad = tiling.RunConfig()
    bad.u_radius = 1.5
    with pytest.raises(tiling.TilingError):
        bad.validate()
