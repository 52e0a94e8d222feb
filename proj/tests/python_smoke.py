"""End-to-end smoke test for the python bindings."""

import math
import tempfile
import os

import _rheoflow as rf


def test_rheology():
    law = rf.CarreauParams(k0=2.0, k_inf=0.0, lambda_=2.0, n=1.2)
    assert math.isclose(rf.carreau_eval(0.0, law), 2.0, rel_tol=1e-14)
    assert math.isclose(rf.carreau_eval(1.0, law), 1.28878802995450850, rel_tol=1e-13)
    assert math.isclose(rf.viscosity_eval(law, 1.0), rf.carreau_eval(1.0, law), rel_tol=0)

    power = rf.PowerLawParams(k0=2.0, n=1.5)
    assert rf.viscosity_eval(power, 4.0) == 1.0

    try:
        rf.CarreauParams(k0=-1.0, k_inf=0.0, lambda_=2.0, n=1.2)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid Carreau parameters accepted")


def test_dataset_roundtrip():
    ds = rf.RheologyDataset("smoke", [(0.5, 2.0), (1.0, 1.8), (2.0, 1.5)])
    assert ds.max_shear_rate() == 2.0
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "ds.csv")
        rf.save_dataset_csv(ds, path)
        back = rf.load_dataset_csv(path)
        assert back.samples == ds.samples


def test_fit_and_model_io():
    law = rf.CarreauParams(k0=2.0, k_inf=0.0, lambda_=2.0, n=1.6)
    ds = rf.sample_carreau_dataset(law, n_samples=60, t_max=70.0, seed=3)
    out = rf.fit(ds, architecture=[1, 24, 12, 1], epochs=3000, seed=3)
    model = out["model"]
    assert model.sign in (-1, 1)
    mid = model(35.0)
    assert abs(mid - rf.carreau_eval(35.0, law)) < 0.2

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.json")
        rf.save_model(model, path)
        back = rf.load_model(path)
        assert back(35.0) == mid
        try:
            rf.load_model(os.path.join(tmp, "missing.json"))
        except ValueError:
            pass
        else:
            raise AssertionError("missing model file accepted")
    return model


def test_verify():
    law = rf.CarreauParams(k0=2.0, k_inf=0.0, lambda_=2.0, n=2.0)
    cert = rf.verify(law, n_samples=40, t_max=70.0, generations=200, seed=0)
    assert cert["satisfied"]
    assert abs(cert["r"] - 2.0) < 0.1


def test_solve_and_study():
    law = rf.CarreauParams(k0=2.0, k_inf=0.0, lambda_=2.0, n=2.0)
    res = rf.solve(law, mesh=4, degree=2, r=2.0)
    assert 0.0 < res["err_u"] < 0.5
    assert res["iterations"] <= 2

    study = rf.convergence_study(law, degree=2, meshes=[4, 8], r=2.0)
    assert abs(study["slope_u"] - 2.0) < 0.2


def main():
    test_rheology()
    test_dataset_roundtrip()
    test_fit_and_model_io()
    test_verify()
    test_solve_and_study()
    print("python smoke: ok")


if __name__ == "__main__":
    main()
