from __future__ import annotations

import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from mbqc_evolve.executor import ErrorSpec
from mbqc_evolve.oracle import ExactEvolver, KitaevParams, TrotterEvolver, hamiltonian
from mbqc_evolve.spectral import (
    SpectralConfig,
    absolute_errors,
    analyze,
    config_dict,
    config_hash,
    error_experiment,
    exact_series,
    find_peaks,
    kitaev_initial_state,
    match_peaks,
    min_trotter_steps,
    overlap_series,
    phi_M_shift_check,
    precision_report,
    spectral_function,
    sum_rule,
    write_metadata,
    write_peaks,
    write_spectrum,
)

SMALL = SpectralConfig(L=400, domega=0.02, eta=0.05)


def lorentzian_spectrum(cfg, centers, weights):
    om = cfg.omegas[:, None]
    return (np.asarray(weights) * cfg.eta / np.pi / ((om - np.asarray(centers)) ** 2 + cfg.eta**2)).sum(axis=1)


@pytest.fixture(scope="module")
def chain2():
    p = KitaevParams(2, 0.4)
    return p, kitaev_initial_state(2)


# ----------------------------------------------------------------------
# grid and overlaps


def test_config_grid():
    cfg = SpectralConfig(L=1272, domega=0.01, eta=0.02)
    assert cfg.dt * cfg.L * cfg.domega == pytest.approx(2 * np.pi)
    assert cfg.omegas[0] == pytest.approx(-6.36)
    assert cfg.m_indices[cfg.L // 2] == 0
    for bad in ({"L": 1}, {"domega": 0.0}, {"eta": -1.0}):
        with pytest.raises(ValueError):
            SpectralConfig(**{"L": 10, "domega": 0.1, "eta": 0.1, **bad})


def test_overlap_series_basics(rng):
    h = hamiltonian(KitaevParams(3, 0.3))
    psi = random_state(3, rng)
    ov = overlap_series(ExactEvolver(h, psi), psi, SMALL)
    assert ov[0] == pytest.approx(1.0)
    e, v = np.linalg.eigh(h)
    eig = overlap_series(ExactEvolver(h, v[:, 1]), v[:, 1], SMALL)
    assert np.allclose(eig, np.exp(-1j * e[1] * SMALL.times))


def test_exact_and_trotter_overlaps_agree(chain2):
    p, psi = chain2
    cfg = SpectralConfig(L=60, domega=0.05, eta=0.05)
    a = overlap_series(ExactEvolver(hamiltonian(p), psi), psi, cfg)
    b = overlap_series(TrotterEvolver(p, 4000, psi), psi, cfg)
    assert np.abs(a - b).max() < 10 * cfg.delta_t


# ----------------------------------------------------------------------
# spectral function


def test_flat_series_peaks_at_zero():
    a = spectral_function(np.ones(SMALL.L), SMALL)
    assert SMALL.omegas[np.argmax(a)] == 0.0
    peaks = find_peaks(a, SMALL)
    assert len(peaks) == 1 and abs(peaks[0].omega) < SMALL.domega / 2


def test_eigenstate_single_peak():
    cfg = SpectralConfig(L=1272, domega=0.01, eta=0.02)
    E = -1.2345
    ov = np.exp(-1j * E * cfg.times)
    a = spectral_function(ov, cfg)
    peaks = find_peaks(a, cfg)
    assert len(peaks) == 1
    assert abs(peaks[0].omega - E) < cfg.domega / 2
    assert peaks[0].weight == pytest.approx(1.0, abs=2e-2)
    assert sum_rule(a, cfg) < 1e-2


def test_literal_endpoint_sums_to_two(rng):
    ov = np.exp(-1j * rng.normal(size=3)[:, None] * SMALL.times).mean(axis=0)
    lit = spectral_function(ov, SMALL, endpoint="literal")
    half = spectral_function(ov, SMALL)
    assert SMALL.domega * lit.sum() == pytest.approx(2.0, abs=1e-12)
    assert sum_rule(half, SMALL) < 1e-12
    assert np.allclose(lit - half, SMALL.dt / (2 * np.pi))


def test_spectral_function_argument_checks():
    with pytest.raises(ValueError):
        spectral_function(np.ones(3), SMALL)
    with pytest.raises(ValueError):
        spectral_function(np.ones(SMALL.L), SMALL, endpoint="open")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=SMALL.L) + 1j * rng.normal(size=SMALL.L)
    y = rng.normal(size=SMALL.L) + 1j * rng.normal(size=SMALL.L)
    lhs = spectral_function(a * x + b * y, SMALL)
    rhs = a * spectral_function(x, SMALL) + b * spectral_function(y, SMALL)
    assert np.abs(lhs - rhs).max() < 1e-9 * (1 + np.abs(rhs).max())


# ----------------------------------------------------------------------
# peaks


def test_find_peaks_single_and_double_lorentzian():
    one = find_peaks(lorentzian_spectrum(SMALL, [0.513], [1.0]), SMALL)
    assert len(one) == 1 and abs(one[0].omega - 0.513) < SMALL.domega / 2
    two = find_peaks(lorentzian_spectrum(SMALL, [-1.0, 1.5], [0.7, 0.3]), SMALL)
    assert [round(p.omega, 1) for p in two] == [-1.0, 1.5]
    assert [p.weight for p in two] == pytest.approx([0.7, 0.3], abs=0.02)


def test_find_peaks_argument_checks():
    with pytest.raises(ValueError):
        find_peaks(np.array([]), SMALL)
    with pytest.raises(ValueError):
        find_peaks(np.ones(SMALL.L), SMALL, threshold_fraction=0.0)


def test_eigen_consistency_and_weights():
    p = KitaevParams(4, 0.4)
    psi = kitaev_initial_state(4)
    cfg = SpectralConfig(L=1272, domega=0.01, eta=0.02)
    s = exact_series(p, cfg, psi)
    ev = ExactEvolver(hamiltonian(p), psi)
    assert max(match_peaks(s.peaks, ev.evals)) < cfg.domega
    # weight whose Lorentzian height clears the peak threshold three times over
    floor = 1e-3 * s.spectrum.max() * np.pi * cfg.eta
    for e, w in zip(ev.evals, ev.weights()):
        if w > 3 * floor:
            assert min(abs(q.omega - e) for q in s.peaks) < cfg.domega
    total = sum(q.weight for q in s.peaks)
    assert abs(total - 1) < max(2 * s.sum_rule_deviation, 0.05)


def test_eta_robustness(chain2):
    p, psi = chain2
    wide = exact_series(p, SpectralConfig(L=1272, domega=0.01, eta=0.04), psi)
    sharp = exact_series(p, SpectralConfig(L=1272, domega=0.01, eta=0.02), psi)
    assert len(wide.peaks) == len(sharp.peaks)
    for a, b in zip(wide.peaks, sharp.peaks):
        assert abs(a.omega - b.omega) < 0.01 / 2
        assert b.height > a.height


# ----------------------------------------------------------------------
# minimum steps and precision


def test_min_steps_at_time_zero(chain2):
    p, psi = chain2
    assert min_trotter_steps(p, SMALL, 0, psi) == 1
    with pytest.raises(ValueError):
        min_trotter_steps(p, SMALL, SMALL.L, psi)
    with pytest.raises(ValueError):
        min_trotter_steps(p, SMALL, 1, psi, criterion="peaks")


def test_min_steps_grow_with_time(chain2):
    p, psi = chain2
    cfg = SpectralConfig(L=46, domega=0.01, eta=0.02)
    m = [min_trotter_steps(p, cfg, n, psi, m_max=2**16) for n in (1, 10, 30)]
    assert m[0] <= m[1] <= m[2]
    assert min_trotter_steps(p, cfg, 10, psi, m_max=2**16, criterion="state") >= m[1]


def test_min_steps_cap_raises(chain2):
    p, psi = chain2
    cfg = SpectralConfig(L=46, domega=0.01, eta=0.02)
    with pytest.raises(RuntimeError):
        min_trotter_steps(p, cfg, 40, psi, m_max=4)


def test_precision_report_definition():
    cfg = SpectralConfig(L=46, domega=0.01, eta=0.02)
    r = precision_report([1, 10, 20, 40], cfg, g=0.4)
    assert r.chi[0] == 0
    assert r.chi[1] == pytest.approx(1 / (0.01 * 46 * 10))
    doubled = precision_report([1, 20, 40, 80], cfg, g=0.4)
    assert np.allclose(np.array(doubled.chi) * 2, r.chi)
    assert r.min_g_chi == pytest.approx(0.4 * min(r.chi[1:]))
    with pytest.raises(ValueError):
        precision_report([0, 1], cfg, g=0.1)


# ----------------------------------------------------------------------
# error experiments


def test_phi_shift_identity_and_rescaling(chain2):
    p, psi = chain2
    cfg = SpectralConfig(L=1272, domega=0.01, eta=0.02)
    zero = phi_M_shift_check(p, cfg, 0.0, psi)
    assert max(abs(x) for x in zero.relative_shifts) == 0
    r = phi_M_shift_check(p, cfg, 0.01, psi)
    # stretched time axis scales every energy by 1 + delta_phi
    for c, rel in zip(r.clean, r.relative_shifts):
        assert abs(rel * c.omega - 0.01 * c.omega) < cfg.domega / 2
    assert abs(r.sum_rule_change) < cfg.delta_f


def test_zero_errors_give_identical_spectra():
    cfg = SpectralConfig(L=200, domega=0.05, eta=0.05)
    ex = error_experiment(KitaevParams(2, 0.4), cfg, ErrorSpec({}), seed=0, M=50)
    assert np.array_equal(ex.clean.spectrum, ex.perturbed.spectrum)
    assert ex.max_shift() == 0 and not ex.new_peaks


def test_absolute_errors_scale_relative_entries():
    spec = ErrorSpec({"phi": 0.5}, symmetric_matched=True, relative=True)
    errs = absolute_errors(spec, 2)
    assert errs == {f"{r}_{q}": pytest.approx(0.25 * np.pi) for r in ("phi", "psi3") for q in (1, 2)}
    with pytest.raises(TypeError):
        error_experiment("hubbard", SMALL, spec)


# ----------------------------------------------------------------------
# files


def test_csv_headers_and_hash(tmp_path):
    cfg = SpectralConfig(L=64, domega=0.1, eta=0.1)
    conf = config_dict(cfg)
    h = config_hash(conf)
    assert h == config_hash(dict(reversed(list(conf.items()))))
    a = spectral_function(np.ones(cfg.L), cfg)
    for path, header in [
        (write_spectrum(tmp_path / "s.csv", a, cfg, h), ["m", "omega", "A"]),
        (write_peaks(tmp_path / "p.csv", find_peaks(a, cfg), h), ["peak_index", "omega", "weight"]),
    ]:
        lines = path.read_text().splitlines()
        assert h in lines[0]
        rows = list(csv.reader(lines[1:]))
        assert rows[0] == header
    meta = json.loads(write_metadata(tmp_path / "m.json", conf, {"x": 1}).read_text())
    assert meta["config_hash"] == h


def test_analyze_matches_pieces(chain2):
    p, psi = chain2
    ev = ExactEvolver(hamiltonian(p), psi)
    s = analyze(ev, psi, SMALL)
    assert np.array_equal(s.spectrum, spectral_function(s.overlaps, SMALL))
    assert s.sum_rule_deviation == sum_rule(s.spectrum, SMALL)
