import math

import numpy as np
import pytest

import bandflow as bf


def tridiag(d, e):
    return bf.BandedMatrix.tridiagonal(np.asarray(d, float), np.asarray(e, float))


def test_matrix_roundtrip():
    h = tridiag([1, 2, 3], [1, 1])
    dense = h.to_dense()
    assert dense.shape == (3, 3)
    assert np.array_equal(dense, dense.T)
    assert h[0, 2] == 0.0
    again = bf.BandedMatrix.from_dense(dense)
    assert again.bandwidth == 1
    assert np.array_equal(again.to_dense(), dense)


def test_flow_matches_numpy_eigvalsh():
    rng = np.random.default_rng(7)
    a = np.zeros((12, 12))
    for k in range(3):
        vals = rng.uniform(-1, 1, 12 - k)
        a += np.diag(vals, k) + (np.diag(vals, -k) if k else 0)
    result = bf.integrate_flow(bf.BandedMatrix.from_dense(a))
    assert result.converged
    assert result.final.bandwidth == 2
    diag = result.final.diagonal()
    expected = np.linalg.eigvalsh(a)
    assert np.max(np.abs(np.sort(diag) - expected)) < 1e-8
    assert result.diagnostics.trace_drift < 1e-9


def test_oracle_agrees_with_numpy():
    d = np.array([0.3, -1.2, 0.8, 2.0, 0.1])
    e = np.array([0.5, 0.4, -0.9, 0.2])
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    expected = np.linalg.eigvalsh(dense)
    assert np.allclose(bf.eigenvalues_tridiag(d, e), expected, atol=1e-11)
    assert np.allclose(bf.eigenvalues_dense(dense), expected, atol=1e-11)
    assert bf.sturm_count(d, e, 0.0) == int(np.sum(expected < 0.0))


def test_wegner_fills_band():
    cfg = bf.FlowConfig()
    cfg.generator = bf.Generator.WEGNER
    cfg.snapshot_ells = [0.05]
    result = bf.integrate_flow(tridiag([1, 2, 4], [1, 1]), cfg)
    assert abs(result.snapshots[0].matrix[0, 2]) > 1e-4


def test_lipkin_blocks_and_rpa():
    p = bf.LipkinParams(xi0=1.0, v0=0.8 / (4 * 25), two_j=50)
    a = bf.build_lipkin_block(p, bf.LipkinBlock.A)
    b = bf.build_lipkin_block(p, bf.LipkinBlock.B)
    assert a.dim + b.dim == 51
    levels = np.sort(np.concatenate([bf.eigenvalues(a), bf.eigenvalues(b)]))
    gap = levels[1] - levels[0]
    assert bf.lipkin_rpa_gap(p) == pytest.approx(0.6)
    assert gap == pytest.approx(0.6, rel=0.15)
    with pytest.raises(bf.DomainError):
        bf.lipkin_rpa_gap(bf.LipkinParams(v0=1.0, two_j=2))


def test_spinboson_delta_zero_closed_form():
    p = bf.SpinBosonParams(delta=0.0, lambda_=1.5, omega=1.0)
    report = bf.spectrum_spinboson(p, levels=[0, 1, 2, 3])
    assert report.converged
    for row in report.rows:
        assert row.eps_flow == pytest.approx(row.n - 1.5**2 / 4, abs=1e-6)


def test_fnx_and_bessel():
    p = bf.SpinBosonParams(delta=0.5, lambda_=1.0)
    assert bf.spinboson_fnx(50, 0.0, p) == pytest.approx(1.0, abs=1e-12)
    assert bf.bessel_j0(2.404825557695773) == pytest.approx(0.0, abs=1e-12)
    z = 2.0 * math.sqrt(50)
    assert bf.spinboson_fnx(50, 1.0, p) == pytest.approx(bf.bessel_j0(z), abs=1e-12)


def test_fig1_small_grid():
    report = bf.fig1(n_list=[10], delta_over_omega=[1.0])
    assert report.converged
    (row,) = report.rows
    assert row.rel_err_asym1 < 0.025


def test_compare_generators_default():
    report = bf.compare_generators(scaled_ells=[0.0, 0.1, 1.0])
    mielke = [r.max_abs for r in report.rows if r.generator == bf.Generator.MIELKE and r.offset == 2]
    assert mielke and max(mielke) == 0.0
    assert np.allclose(report.mielke_final_diagonal, report.oracle_eigenvalues, atol=1e-9)


def test_cli_in_process(tmp_path):
    path = tmp_path / "h.txt"
    tridiag([1, 2, 3], [1, 1]).save(str(path))
    status, out, err = bf.cli("flow", path)
    assert status == 0
    assert "converged" in out + err
    status, _, err = bf.cli("flow", tmp_path / "missing.txt")
    assert status == 3


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        bf.BandedMatrix(3, 5)
    with pytest.raises(bf.InputError):
        tridiag([1, 2], [1, 1])
