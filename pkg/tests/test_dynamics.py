import numpy as np
import pytest

from kerrcat.dynamics import (LindbladConfig, RampProtocol, RampSegment,
                              default_n_pairs, evolve, fit_decaying_cosine,
                              lindblad_rhs, rabi_map, run_protocol,
                              tx_lifetime, well_projectors, well_signal)
from kerrcat.fock import HamiltonianParams, build_hamiltonian, parity_operator
from kerrcat.spectra import eigensystem, localized_pair, tunnel_splitting


def cfg_of(p, **kw):
    return LindbladConfig(params=p, **kw)


# -- right-hand side -------------------------------------------------------------

def test_rhs_thermal_state_is_fixed_point():
    nth = 0.05
    dim = 20
    p = HamiltonianParams(delta=1.3, eps2=0.0, dim=dim)
    cfg = cfg_of(p, kappa=0.04, n_th=nth, t_final=1.0, n_pairs=1)
    ratio = nth / (1.0 + nth)
    pops = ratio ** np.arange(dim)
    rho = np.diag(pops / pops.sum()).astype(complex)
    out = lindblad_rhs(rho, cfg)
    assert np.abs(out).max() < 1e-14


def test_rhs_closed_limit_is_commutator():
    p = HamiltonianParams(delta=2.0, eps2=0.7, dim=16)
    cfg = cfg_of(p, kappa=0.0, t_final=1.0, n_pairs=1)
    rng = np.random.default_rng(0)
    m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    h = build_hamiltonian(p)
    expected = -1j * (h @ rho - rho @ h)
    assert np.abs(lindblad_rhs(rho, cfg) - expected).max() < 1e-14


def test_rhs_traceless_and_hermiticity_preserving():
    p = HamiltonianParams(delta=1.0, eps2=0.5, dim=14)
    cfg = cfg_of(p, kappa=0.03, n_th=0.1, t_final=1.0, n_pairs=1)
    rng = np.random.default_rng(4)
    m = rng.normal(size=(14, 14)) + 1j * rng.normal(size=(14, 14))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    out = lindblad_rhs(rho, cfg)
    assert abs(np.trace(out)) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12


def test_rhs_dimension_mismatch():
    p = HamiltonianParams(delta=1.0, eps2=0.5, dim=14)
    cfg = cfg_of(p, t_final=1.0, n_pairs=1)
    with pytest.raises(ValueError):
        lindblad_rhs(np.eye(10, dtype=complex), cfg)


def test_config_validation():
    p = HamiltonianParams(delta=1.0, eps2=0.5, dim=14)
    with pytest.raises(ValueError):
        LindbladConfig(params=p, t_final=0.0)
    with pytest.raises(ValueError):
        LindbladConfig(params=p, t_final=1.0, kappa=-0.1)


# -- evolution -------------------------------------------------------------------

def test_damped_fock_state_photon_decay():
    # populations obey the photon birth-death chain for any number-conserving H
    p = HamiltonianParams(delta=0.5, eps2=0.0, dim=12)
    cfg = cfg_of(p, kappa=0.05, n_th=0.0, t_final=60.0, initial_state=3,
                 n_samples=61, method="rk4", n_pairs=1)
    traj = evolve(cfg)
    expected = 3.0 * np.exp(-0.05 * traj.times)
    assert np.abs(traj.nbar - expected).max() < 1e-5
    assert np.abs(traj.trace - 1.0).max() < 1e-7


def test_rabi_frequency_matches_splitting():
    p = HamiltonianParams(delta=1.0, eps2=0.11, dim=60)
    de = tunnel_splitting(p).abs_delta_e
    cfg = cfg_of(p, t_final=3 * 2 * np.pi / de, n_samples=601, n_pairs=1)
    traj = evolve(cfg)
    freq, _ = fit_decaying_cosine(traj.times, traj.s)
    assert abs(freq - de) / de < 0.01
    # closed evolution conserves <H> (here via constant purity/trace and s-range)
    assert np.abs(traj.trace - 1.0).max() < 1e-12
    assert traj.s.max() <= 1 + 1e-9


def test_cancellation_freezes_well_signal():
    p = HamiltonianParams(delta=2.0, eps2=0.11, dim=60)
    cfg = cfg_of(p, t_final=100.0, n_samples=201, n_pairs=1)
    traj = evolve(cfg)
    assert np.abs(traj.s - traj.s[0]).max() < 1e-4


def test_closed_energy_conservation():
    p = HamiltonianParams(delta=1.5, eps2=0.8, dim=40)
    h = build_hamiltonian(p)
    cfg = cfg_of(p, t_final=50.0, n_samples=51, n_pairs=1)
    sys_es = eigensystem(h)
    right, _ = localized_pair(sys_es, 0)
    e0 = right @ h @ right
    traj = evolve(cfg)
    rho_f = traj.rho_final
    e1 = float(np.real(np.trace(h @ rho_f)))
    assert abs(e1 - e0) < 1e-7 * max(1.0, abs(e0))


def test_thermal_fixed_point_reached():
    p = HamiltonianParams(delta=1.3, eps2=0.0, dim=16)
    cfg = cfg_of(p, kappa=0.02, n_th=0.05, t_final=2500.0,
                 initial_state="vacuum", n_samples=126, method="expm", n_pairs=1)
    traj = evolve(cfg)
    assert abs(traj.nbar[-1] - 0.05) < 1e-4
    assert abs(traj.trace[-1] - 1.0) < 1e-7


def test_rk4_and_expm_agree():
    p = HamiltonianParams(delta=2.0, eps2=1.0, dim=20)
    common = dict(kappa=0.02, n_th=0.05, t_final=25.0, n_samples=26, n_pairs=1)
    t_rk4 = evolve(cfg_of(p, **common, method="rk4"))
    t_expm = evolve(cfg_of(p, **common, method="expm", rank=20))
    assert np.abs(t_rk4.s - t_expm.s).max() < 1e-8
    assert np.abs(t_rk4.nbar - t_expm.nbar).max() < 1e-8


def test_positivity_and_trace_long_horizon():
    p = HamiltonianParams(delta=2.0, eps2=2.17, dim=30)
    cfg = cfg_of(p, kappa=0.02, n_th=0.05, t_final=200.0, n_samples=101,
                 method="expm", rank=30)
    traj = evolve(cfg)
    assert np.abs(traj.trace - 1.0).max() < 1e-7
    assert traj.min_eig.min() > -1e-7
    assert np.abs(traj.purity - np.clip(traj.purity, 0, 1 + 1e-8)).max() == 0


def test_positivity_and_trace_rk4_short_horizon():
    p = HamiltonianParams(delta=2.0, eps2=2.17, dim=24)
    cfg = cfg_of(p, kappa=0.02, n_th=0.05, t_final=30.0, n_samples=31,
                 method="rk4")
    traj = evolve(cfg)
    assert np.abs(traj.trace - 1.0).max() < 1e-7
    assert traj.min_eig.min() > -1e-7


def test_trajectory_csv(tmp_path):
    p = HamiltonianParams(delta=1.0, eps2=0.5, dim=16)
    traj = evolve(cfg_of(p, t_final=5.0, n_samples=6, n_pairs=1))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,s,tr,purity,n"
    assert len(lines) == 7


# -- well signal -----------------------------------------------------------------

def test_well_signal_localized_states():
    p = HamiltonianParams(delta=1.0, eps2=2.0, dim=50)
    es = eigensystem(build_hamiltonian(p))
    right, left = localized_pair(es, 0)
    rho_r = np.outer(right, right).astype(complex)
    assert well_signal(rho_r, es, 1) == pytest.approx(1.0, abs=1e-6)
    mixed = (np.outer(right, right) + np.outer(left, left)) / 2
    assert well_signal(mixed.astype(complex), es, 1) == pytest.approx(0.0, abs=1e-12)
    pi = parity_operator(50)
    rho_flip = pi @ rho_r @ pi
    assert well_signal(rho_flip, es, 1) == pytest.approx(-1.0, abs=1e-6)
    assert well_signal(rho_flip, es, 1) == pytest.approx(
        -well_signal(rho_r, es, 1), abs=1e-12)


def test_default_n_pairs_follows_ebk():
    assert default_n_pairs(HamiltonianParams(delta=1.0, eps2=4.0)) == 1
    assert default_n_pairs(HamiltonianParams(delta=9.0, eps2=4.0)) == 4
    assert default_n_pairs(HamiltonianParams(delta=-1.0, eps2=0.1)) == 1


def test_well_projector_rank_guard():
    p = HamiltonianParams(delta=0.5, eps2=0.2, dim=12)
    es = eigensystem(build_hamiltonian(p))
    with pytest.raises(ValueError):
        well_projectors(es, 0)


# -- rabi map and lifetimes --------------------------------------------------------

def test_rabi_map_fits_and_cancellation():
    p0 = HamiltonianParams(delta=1.0, eps2=0.11, dim=60)
    de1 = tunnel_splitting(p0).abs_delta_e
    t_grid = np.linspace(0.0, 3 * 2 * np.pi / de1, 301)
    table = rabi_map(p0, "delta", [1.0, 2.0], t_grid)
    fits = {f["value"]: f for f in table.meta["fits"]}
    assert abs(fits[1.0]["frequency"] - de1) / de1 < 0.02
    assert fits[2.0]["frequency"] < 1e-3
    prob = table.column("prob")
    assert prob.min() > -1e-9 and prob.max() < 1 + 1e-9
    assert len(table.rows) == 2 * 301


def test_rabi_frequency_decreases_with_drive():
    freqs = []
    for eps2 in (0.3, 0.6, 1.0):
        p = HamiltonianParams(delta=3.0, eps2=eps2, dim=70)
        de = tunnel_splitting(p).abs_delta_e
        t_grid = np.linspace(0.0, 3 * 2 * np.pi / de, 301)
        table = rabi_map(p, "eps2", [eps2], t_grid)
        freqs.append(table.meta["fits"][0]["frequency"])
    assert freqs[0] > freqs[1] > freqs[2]


TX_GOLDEN_D2 = 2621.7   # delta=2, eps2=2.17, kappa=1/50, n_th=0.05, dim=60


def test_tx_lifetime_golden_and_certification():
    p = HamiltonianParams(delta=2.0, eps2=2.17, dim=60)
    cfg = cfg_of(p, kappa=1 / 50, n_th=0.05, t_final=6000.0)
    est = tx_lifetime(cfg)
    assert not est.lower_bound
    assert est.trace_error < 1e-6
    assert est.t_x == pytest.approx(TX_GOLDEN_D2, rel=0.02)


def test_tx_requires_dissipation():
    p = HamiltonianParams(delta=2.0, eps2=2.17, dim=40)
    with pytest.raises(ValueError):
        tx_lifetime(cfg_of(p, kappa=0.0, t_final=100.0))


def test_tx_lower_bound_flag():
    # delta = 2 cancellation point with a horizon far too short to see decay
    p = HamiltonianParams(delta=2.0, eps2=2.17, dim=40)
    cfg = cfg_of(p, kappa=1 / 50, n_th=0.05, t_final=40.0, dt=1.0)
    est = tx_lifetime(cfg)
    assert est.lower_bound
    assert est.t_x == pytest.approx(40.0, rel=0.1)


# -- ramps -------------------------------------------------------------------------

def test_protocol_validation():
    with pytest.raises(ValueError):
        RampSegment(0.0, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        RampProtocol((RampSegment(1.0, 1, 1, 2, 1), RampSegment(1.0, 1, 1, 1.5, 1)))
    prot = RampProtocol((RampSegment(2.0, 1, 1, 2, 1), RampSegment(3.0, 1, 2, 1, 1)))
    assert prot.total_duration == 5.0
    assert prot.values_at(2.0) == (1.0, 1.0)
    assert prot.values_at(3.5) == (1.5, 1.0)
    assert prot.values_at(99.0) == (2.0, 1.0)


def test_round_trip_ramp_is_adiabatic_at_cancellation():
    ramp = 20 * np.pi
    segs = (RampSegment(ramp, 2.0, 2.0, 2.0, 0.11),
            RampSegment(ramp, 2.0, 2.0, 0.11, 2.0))
    p = HamiltonianParams(delta=2.0, eps2=2.0, dim=32)
    cfg = cfg_of(p, t_final=1.0, n_samples=41, n_pairs=1)
    traj = run_protocol(RampProtocol(segs), cfg)
    assert abs(traj.s[-1] - traj.s[0]) < 1e-3


def test_hold_half_rabi_flips_sign():
    p = HamiltonianParams(delta=1.0, eps2=0.11, dim=60)
    de = tunnel_splitting(p).abs_delta_e
    prot = RampProtocol((RampSegment(np.pi / de, 1.0, 1.0, 0.11, 0.11),))
    traj = run_protocol(prot, cfg_of(p, t_final=1.0, n_samples=21, n_pairs=1))
    assert traj.s[0] == pytest.approx(1.0, abs=1e-9)
    assert traj.s[-1] == pytest.approx(-1.0, abs=1e-6)


def test_hold_at_cancellation_leaves_signal():
    p = HamiltonianParams(delta=2.0, eps2=0.11, dim=60)
    prot = RampProtocol((RampSegment(10.0, 2.0, 2.0, 0.11, 0.11),))
    traj = run_protocol(prot, cfg_of(p, t_final=1.0, n_samples=21, n_pairs=1))
    assert abs(traj.s[-1] - traj.s[0]) < 1e-3
