import json
import math

import numpy as np
import pytest

from shorlab.analysis import (
    akb_map,
    all_figures,
    efficiency_split,
    heatmap_grid,
    invertibility_mask,
    k_histogram_figure,
    k_locations,
    modular_inverse_map,
    rank_count_series,
    residue_map,
    ridge_angle_histogram,
    ridge_mask,
    ridge_metrics,
    variance_per_a,
    write_figures,
)
from shorlab.circuit import build_shor_circuit
from shorlab.postprocess import AbPair, parse_counts
from shorlab.simulator import decode_distribution, run_exact, sample


@pytest.fixture(scope="module")
def noiseless_pairs(calibrated):
    d = run_exact(build_shor_circuit(5, 1, 7, calibrated))
    return parse_counts(sample(d, 16384, seed=1), 5, calibrated)


def test_heatmap_examples(noiseless_pairs, calibrated):
    g = heatmap_grid([AbPair(0, 0, 9)], 32).grid
    assert g[0, 0] == 9 and np.count_nonzero(g) == 1
    full = heatmap_grid(noiseless_pairs, 32).grid
    assert full.sum() == 16384
    assert np.count_nonzero(full) == 32
    assert set(zip(*np.nonzero(full))) == ridge_mask(7, 32, "ab")


def test_ridge_mask():
    assert ridge_mask(0, 32, "ab") == {(0, v) for v in range(32)}
    for k in range(32):
        assert len(ridge_mask(k, 32, "ab")) == 32
        assert len(ridge_mask(k, 32, "ba")) == 32
    assert all((a + 7 * b) % 32 == 0 for a, b in ridge_mask(7, 32, "ab"))
    # q_index 23 under the main-script parse: b + 23a == 0 is the same set as a + 7b == 0
    assert ridge_mask(23, 32, "ba") == ridge_mask(7, 32, "ab")


def test_ridge_mask_matches_simulation_n2(calibrated):
    d = decode_distribution(run_exact(build_shor_circuit(2, 1, 1, calibrated)), calibrated)
    assert d.support() == ridge_mask(1, 4, "ab")


def test_residue_map():
    g = residue_map(7, 32).grid
    assert g[0, 0] == 0
    assert g[1, 9] == 0  # 1 + 63 = 64
    assert all(g[a, 0] == a for a in range(32))


def test_efficiency_split(noiseless_pairs, calibrated):
    inv, non = efficiency_split(noiseless_pairs, 32)
    assert inv + non == 16384
    # half the ridge b-values are odd; sampling noise only
    assert abs(inv - 8192) < 5 * math.sqrt(16384 * 0.25)
    assert efficiency_split([AbPair(3, 0, 5), AbPair(1, 0, 2)], 32) == (0, 7)
    exact = decode_distribution(run_exact(build_shor_circuit(5, 1, 7, calibrated)), calibrated)
    odd_mass = sum(p for a, b, p in exact.items() if b % 2)
    assert odd_mass == pytest.approx(0.5, abs=1e-12)


def test_ridge_angles():
    f = ridge_angle_histogram([AbPair(0, 1, 3)], 32)
    assert f.rows == ((0.0, 3),)
    f = ridge_angle_histogram([AbPair(31, 1, 2)], 32)
    assert f.rows == ((round(math.pi / 4, 2), 2),)
    assert ridge_angle_histogram([], 32).rows == ()
    assert ridge_angle_histogram([AbPair(5, 2, 4)], 32).rows == ()  # b not invertible
    with pytest.raises(ValueError):
        ridge_angle_histogram([], 32, 0)


def test_ridge_angle_matches_paper_code():
    pairs = [AbPair(a, b, a + b + 1) for a in range(32) for b in range(1, 32, 2)]
    want: dict[float, int] = {}
    for p in pairs:
        angle = math.atan2(-p.a % 32, p.b) % math.pi
        want[round(angle, 2)] = want.get(round(angle, 2), 0) + p.count
    got = dict(ridge_angle_histogram(pairs, 32).rows)
    assert got == want


def test_variance():
    uniform = [AbPair(a, b, 4) for a in range(8) for b in range(8)]
    assert all(v == 0 for _, v in variance_per_a(uniform, 8).rows)
    spike = variance_per_a([AbPair(3, 5, 10)], 8).rows
    assert [a for a, v in spike if v] == [3]
    m, N = 10, 8
    assert spike[3][1] == pytest.approx(m * m * (N - 1) / N**2)


def test_rank_series(noiseless_pairs):
    rows = rank_count_series(noiseless_pairs).rows
    assert len(rows) == 32
    counts = [c for _, c in rows]
    assert counts == sorted(counts, reverse=True)
    assert rank_count_series([AbPair(0, 0, 1)]).rows == ((0, 1),)


def test_rank_series_exact_flat_head(calibrated):
    d = decode_distribution(run_exact(build_shor_circuit(5, 1, 7, calibrated)), calibrated)
    probs = sorted((p for _, _, p in d.items()), reverse=True)
    assert np.allclose(probs[:32], 1 / 32, atol=1e-12)
    assert np.allclose(probs[32:], 0, atol=1e-12)


def test_invertibility_and_inverse_map(noiseless_pairs):
    mask = dict(invertibility_mask(noiseless_pairs, 32).rows)
    assert all(mask[b] == 0 for b in range(0, 32, 2))
    grid = modular_inverse_map(noiseless_pairs, 32).grid
    units = list(range(1, 32, 2))
    sub = grid[np.ix_(units, units)] > 0
    assert sub.sum(axis=0).max() <= 1 and sub.sum(axis=1).max() <= 1
    assert grid.sum() == sum(mask.values())


def test_k_histogram_point_mass(noiseless_pairs):
    hist = dict(k_histogram_figure(noiseless_pairs, 32).rows)
    assert {k for k, v in hist.items() if v} == {7}
    locs = k_locations(noiseless_pairs, 32, 7).rows
    assert sum(c for _, _, c in locs) == hist[7]
    assert sum(c for _, c in akb_map(noiseless_pairs, 32, 7).rows) == 16384
    assert dict(akb_map(noiseless_pairs, 32, 7).rows)[0] == 16384


def test_metrics(noiseless_pairs):
    m = ridge_metrics(noiseless_pairs, 32, 7)
    assert m.on_ridge_mass == 1.0
    assert m.top_k[0][0] == 7
    assert 0 <= m.invertible_mass <= 1


def test_all_figures_and_manifest(noiseless_pairs, tmp_path):
    figs = all_figures(noiseless_pairs, 32, 7)
    assert len(figs) == 12
    assert len({f.name for f in figs}) == 12
    for f in figs:
        if f.kind == "grid":
            assert f.grid.shape == (32, 32)
    manifest = write_figures(figs, tmp_path, "run123")
    doc = json.loads(manifest.read_text())
    assert [e["name"] for e in doc["figures"]] == [f.name for f in figs]
    assert all(e["source_run"] == "run123" for e in doc["figures"])
    heat = (tmp_path / "raw_count_heatmap.csv").read_text().splitlines()
    assert heat[0] == "a,b,count" and len(heat) == 1 + 1024


def test_k_argmax_survives_moderate_noise(calibrated):
    # Regression pin: with eps <= 0.9 and a 0.01 readout flip the true k still dominates.
    from shorlab.postprocess import aggregate_k_histogram
    from shorlab.simulator import apply_noise

    d = run_exact(build_shor_circuit(5, 1, 7, calibrated))
    for eps in (0.0, 0.5, 0.9):
        pairs = parse_counts(sample(apply_noise(d, eps, 0.01), 16384, seed=4), 5, calibrated)
        hist = aggregate_k_histogram(pairs, 32)
        assert int(np.argmax(hist)) == 7
