import math

import pytest

import frailtycr


SHARED_MODEL = {
    "hazards": {
        "individual1": [{"family": "constant", "rate": 1.0}],
        "individual2": [{"family": "constant", "rate": 1.0}],
    },
    "frailty": {"law": "shared_gamma", "sigma": 1.0},
}

DIRICHLET_MODEL = {
    "hazards": {
        "individual1": [{"family": "constant", "rate": 1.0}] * 2,
        "individual2": [{"family": "constant", "rate": 1.0}] * 2,
    },
    "frailty": {"law": "dirichlet_gamma", "alpha1": [1.0, 1.0], "alpha2": [2.0, 2.0],
                "sigma": 1.0},
}


def test_version():
    assert frailtycr.__version__ == "0.1.0"


def test_known_closed_form_values():
    m = frailtycr.model_from_dict(SHARED_MODEL)
    assert frailtycr.joint_subdensity(m, 1.0, 1.0, 1, 1) == pytest.approx(2.0 / 27.0, abs=1e-12)
    assert frailtycr.joint_survival(m, 1.0, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert frailtycr.marginal_subdist(m, 1, 1, 1.0) == pytest.approx(0.5, abs=1e-9)
    assert frailtycr.gamma_laplace(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    d = frailtycr.model_from_dict(DIRICHLET_MODEL)
    assert frailtycr.joint_subdist(d, 1.0, 1.0, 1, 2) == pytest.approx(1.0 / 12.0, abs=1e-13)


def test_model_json_round_trip():
    m = frailtycr.model_from_dict(SHARED_MODEL)
    again = frailtycr.Model.from_json(m.to_json())
    assert again.to_json() == m.to_json()
    assert m.num_causes(1) == 1


def test_invalid_model_raises():
    bad = {"hazards": SHARED_MODEL["hazards"], "frailty": {"law": "shared_gamma", "sigma": -1}}
    with pytest.raises(ValueError):
        frailtycr.model_from_dict(bad)


def test_simulation_is_deterministic_and_round_trips(tmp_path):
    m = frailtycr.model_from_dict(SHARED_MODEL)
    ds1 = frailtycr.simulate(m, 200, seed=7)
    ds2 = frailtycr.simulate(m, 200, seed=7)
    assert ds1.records == ds2.records
    assert len(ds1) == 200

    path = tmp_path / "data.csv"
    ds1.write(str(path))
    back = frailtycr.read_dataset(str(path))
    assert back.records == ds1.records
    assert back.seed == 7


def test_oracle_agrees_with_closed_form():
    m = frailtycr.model_from_dict(SHARED_MODEL)
    closed = frailtycr.joint_subdist(m, 1.0, 1.0, 1, 1)
    quad = frailtycr.quad_joint_subdist(m, 1.0, 1.0, 1, 1)
    assert quad["value"] == pytest.approx(closed, abs=1e-6)
    mc = frailtycr.mc_joint_subdist(m, 1.0, 1.0, 1, 1, n=20000, seed=3)
    assert abs(mc["value"] - closed) <= 4.0 * mc["std_error"]


def test_dirichlet_invariance_report():
    d = frailtycr.model_from_dict(DIRICHLET_MODEL)
    report = frailtycr.verify_dirichlet_invariance(d, 2.0, 0.5, [0.5, 1.0], [0.5, 1.5])
    assert report["pass"] is True
    assert report["max_diff"] < 1e-12
    control = frailtycr.verify_dirichlet_invariance(d, 2.0, 0.5, [0.5, 1.0], [0.5, 1.5],
                                                    sigma_perturb=0.1)
    assert control["pass"] is False


def test_frailty_sampling_and_grids():
    m = frailtycr.model_from_dict(SHARED_MODEL)
    draws = frailtycr.sample_frailty(m, 500, seed=11)
    assert len(draws) == 500
    mean = sum(d[0][0] for d in draws) / len(draws)
    assert abs(mean - 1.0) < 0.2  # unit-mean frailty, loose smoke band

    t1, t2 = frailtycr.default_grid(m, count=4, hmin=0.1, hmax=2.0)
    assert len(t1) == 4 and t1[0] < t1[-1]

    est = frailtycr.mc_subdensity(m, 1.0, 1.0, 1, 1, n=20000, seed=5)
    assert abs(est["value"] - 2.0 / 27.0) <= 4.0 * est["std_error"]


def test_fit_smoke():
    truth = frailtycr.model_from_dict({
        "hazards": {
            "individual1": [{"family": "weibull", "shape": 1.5, "scale": 1.0}],
            "individual2": [{"family": "weibull", "shape": 1.5, "scale": 1.0}],
        },
        "frailty": {"law": "shared_gamma", "sigma": 0.7},
    })
    ds = frailtycr.simulate(truth, 1000, seed=42)
    start = frailtycr.auto_init(ds, truth)
    fit = frailtycr.fit_mle(ds, start)
    assert fit["converged"] is True
    assert math.isfinite(fit["log_likelihood"])
    assert abs(fit["parameters"]["sigma"] - 0.7) < 0.25
