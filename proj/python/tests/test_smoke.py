# Smoke tests for the python bindings: each touches one slice of the API
# end to end. Heavier numerics live in the C++ suites.

import math
import os

import pytest

import nobs


def small_grid():
    return nobs.Grid(nx=31, dx=1.0 / 30, nt=50, dt=0.125 / 50)


def test_grid_and_errors():
    g = small_grid()
    assert g.n_levels() == 51
    assert g == nobs.Grid(31, 1.0 / 30, 50, 0.125 / 50)
    with pytest.raises(nobs.GridMismatch):
        nobs.Grid(1, 0.1, 5, 0.1)
    assert issubclass(nobs.GridMismatch, nobs.Error)


def test_simulate_and_observer_round():
    g = small_grid()
    params = nobs.ReactionDiffusionParams.one_peak(1.0, 4.0, 2.0)
    ic = nobs.sample_ic_sine(nobs.IcSpec(), 0, g)
    plant = nobs.simulate_reaction_diffusion(ic, params, g, nobs.RdScheme.ImplicitEuler)
    a = plant.array()
    assert a.shape == (1, 51, 31)
    assert a[0, 0, 0] == 0.0  # pinned left end

    ms = nobs.extract_measurements(plant, nobs.MeasurementKind.DirichletAt1)
    gain = nobs.ExponentialGain.sample(4.0, 2.0, 1.0, g)
    est = nobs.run_observer_reaction_diffusion(
        ms, gain, params, g, ic, nobs.RdScheme.ImplicitEuler
    )
    # Truth-initialized observer reproduces the plant step for step.
    assert nobs.relative_l2(est, plant) == 0.0


def test_prescribed_time_gain_identity():
    cfg = nobs.PrescribedTimeGain(T=0.6, mu=1.0, n_terms=8, clamp=0.594)
    # At the measured boundary the series collapses to mu*T^3/(2*(T-t)^3).
    t = 0.45
    want = 0.6**3 / (2.0 * (0.6 - t) ** 3)
    assert math.isclose(nobs.gain_prescribed_time(1.0, t, cfg), want, rel_tol=1e-12)
    with pytest.raises(nobs.TimeOutOfRange):
        nobs.gain_prescribed_time(0.5, 0.6, cfg)


def test_traffic_plant_stays_at_equilibrium():
    p = nobs.ArzParams.reference(0.12, 10.0)
    g = nobs.Grid(nx=51, dx=10.0, nt=100, dt=0.2)
    ic_rho = [p.rho_star] * g.nx
    ic_v = [p.v_star] * g.nx
    inflow = [p.q_star] * g.n_levels()
    outflow = [p.v_star] * g.n_levels()
    traj = nobs.simulate_arz(ic_rho, ic_v, p, g, inflow, outflow)
    a = traj.array()
    assert a.shape == (2, 101, 51)
    assert abs(a[0, -1, 25] - p.rho_star) < 1e-12
    assert abs(a[1, -1, 25] - p.v_star) < 1e-12


def test_dataset_io_and_containers(tmp_path):
    cfg = nobs.GenerateConfig()
    cfg.n = 3
    cfg.seed = 5
    g = small_grid()
    ds = nobs.generate_dataset(cfg, g)
    assert len(ds.records) == 3
    assert ds.records[0].meta["record"] == 0.0

    path = os.path.join(tmp_path, "ds.bin")
    nobs.write_dataset(ds, path)
    back = nobs.read_dataset(path)
    assert back.grid == ds.grid
    assert (back.records[1].target.array() == ds.records[1].target.array()).all()

    apath = os.path.join(tmp_path, "arrays.bin")
    nobs.write_arrays(apath, {"a": [1.0, 2.5], "b": [0.0]})
    arr = nobs.read_arrays(apath)
    assert arr["a"] == [1.0, 2.5]
    with pytest.raises(nobs.HeaderMismatch):
        nobs.read_dataset(apath)


def test_train_eval_checkpoint_cycle(tmp_path):
    cfg = nobs.GenerateConfig()
    cfg.n = 2
    cfg.seed = 1
    g = nobs.Grid(nx=17, dx=1.0 / 16, nt=7, dt=0.125 / 7)
    ds = nobs.generate_dataset(cfg, g)

    net = nobs.FnoConfig()
    net.n_layers = 2
    net.width = 8
    net.modes_x = 4
    net.modes_t = 3
    model = nobs.make_feedforward_model(ds, net, seed=0)
    assert model.parameter_names()[0] == "p1_w"

    tc = nobs.TrainConfig()
    tc.epochs = 30
    tc.batch = 2
    tc.lr = 2e-3
    tc.log_every = 0
    res = nobs.train_feedforward(model, ds, tc)
    assert len(res.epoch_loss) == 30
    assert res.epoch_loss[-1] < res.epoch_loss[0]

    report = nobs.evaluate(model, ds)
    assert len(report.per_record) == 2
    assert report.mean_rel_l2 == pytest.approx(sum(report.per_record) / 2)

    ck = nobs.Checkpoint()
    ck.model = model
    ck.meta = {"epochs": float(tc.epochs)}
    path = os.path.join(tmp_path, "model.ck")
    nobs.write_checkpoint(path, ck)
    again = nobs.read_checkpoint(path)
    pred_a = nobs.feedforward_predict(model, ds.records[0], g).array()
    pred_b = nobs.feedforward_predict(again.model, ds.records[0], g).array()
    assert (pred_a == pred_b).all()
    with pytest.raises(nobs.MissingCheckpoint):
        nobs.read_checkpoint(os.path.join(tmp_path, "nope.ck"))
