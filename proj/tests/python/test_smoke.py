import math

import numpy as np
import pytest

import softdd


def test_delta_coefficients():
    c = softdd.coefficients("delta:pi").as_dict()
    assert c["upsilon"] == pytest.approx(0.0, abs=1e-14)
    assert c["upsilon2"] == pytest.approx(-1.0, abs=1e-14)
    assert c["zeta"] == pytest.approx(0.25, abs=1e-14)


def test_g010_row_matches_frozen_values():
    c = softdd.coefficients("G010_pi")
    assert c.upsilon == pytest.approx(0.210687317535, abs=1e-10)
    assert c.upsilon2 == pytest.approx(-0.708556805083, abs=1e-10)


def test_unknown_shape_raises():
    with pytest.raises(softdd.Error, match="UnknownShape"):
        softdd.shape("no_such_shape")


def test_cumulants_of_hard_4p_have_zero_first_order_field():
    model = softdd.RateModel.nmr(0.01, 0.02, np.array([0.0, 0.0, 0.05]))
    seq = softdd.Sequence("4p", "delta:pi")
    cum = softdd.cumulants(seq, model)
    assert cum.gamma0.shape == (3, 3)
    assert np.allclose(cum.period_rotation, np.eye(3), atol=1e-12)
    sym = 0.5 * (cum.gamma0 + cum.gamma0.T)
    assert np.all(np.linalg.eigvalsh(sym) >= -1e-12)


def test_propagation_stays_orthogonal_without_relaxation():
    model = softdd.RateModel.nmr(0.0, 0.0)
    seq = softdd.Sequence("X Y -X Y", "G010_pi")
    rec = softdd.propagate(seq, model, n_periods=2, dt=1.0 / 64)
    q = rec.Q[-1]
    assert np.allclose(q @ q.T, np.eye(3), atol=1e-8)
    assert rec.times[-1] == pytest.approx(8.0)
    assert rec.fidelity()[-1] == pytest.approx(1.0, abs=1e-8)


def test_noise_is_reproducible():
    spec = softdd.NoiseSpec()
    spec.T_total = 16.0
    spec.seed = softdd.derive_seed(7, 3)
    a = softdd.generate_noise(spec).samples
    b = softdd.generate_noise(spec).samples
    assert a.shape[0] == 3
    assert np.array_equal(a, b)


def test_redistribution_fidelity_at_zero():
    assert softdd.redistribution_fidelity(0.0, 0.01, 0.2) == pytest.approx(1.0)
    assert softdd.redistribution_fidelity(1e6, 0.01, 0.2) == pytest.approx(0.5, abs=1e-6)


def test_catalogues_are_exposed():
    assert "4p" in softdd.sequence_names()
    assert "G010_pi" in softdd.shape_names()
    assert "fig3" in softdd.preset_names()


def test_closed_form_criterion_passes():
    (res,) = softdd.verify(only=[6], jobs=1)
    assert res["id"] == 6
    assert res["passed"], res
