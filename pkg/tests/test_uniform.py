import numpy as np
import pytest

from opsample.errors import PreconditionError
from opsample.identifiers import uniform_train
from opsample.model import OperatorModel, SampledOutput, apply_train, random_haar_operator, random_operator
from opsample.uniform import (
    WindowFunction,
    haar_reconstruct,
    make_filter,
    reconstruct_uniform,
    verify_norm_identity_uniform,
    wks_reconstruct,
)


# -- filters ---------------------------------------------------------------------


def test_critical_filter_lattice_zeros():
    f = make_filter(1.0, 1.0)
    assert f.kind == "critical_sinc"
    assert f(0.0) == 1.0
    m = np.array([-5, -2, -1, 1, 3, 7])
    assert np.max(np.abs(f(m))) < 1e-15


def test_trapezoid_filter_frozen_values():
    f = make_filter(1.0, 0.8)
    assert f.kind == "trapezoid"
    # mpmath oracle
    assert f(0.5) == pytest.approx(0.626199352713346121559, abs=1e-15)
    assert f(2.5) == pytest.approx(0.0810569469138702171551, abs=1e-15)


def test_filter_even():
    f = make_filter(1.0, 0.8)
    x = np.linspace(0.01, 40, 997)
    assert np.max(np.abs(f(x) - f(-x))) <= 1e-15


def test_filter_transform_by_quadrature():
    # phi is real and even: phi_hat(nu) = int phi(x) cos(2 pi nu x) dx
    f = make_filter(1.0, 0.8)
    dx = 0.5
    x = np.arange(1, 1_000_001) * dx
    phi = f(x)
    nus = np.array([0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.7, 0.9])
    ft = np.array([dx * (f(0.0) + 2 * np.sum(phi * np.cos(2 * np.pi * v * x))) for v in nus])
    flat = np.abs(nus) <= 0.4
    assert np.max(np.abs(ft[flat] - 1)) <= 1e-6
    assert np.max(np.abs(ft[nus >= 0.6])) <= 1e-6
    assert ft[4] == pytest.approx(f.spectrum(0.5), abs=1e-6)


def test_filter_preconditions():
    with pytest.raises(PreconditionError):
        make_filter(1.0, 1.2)
    with pytest.raises(PreconditionError):
        make_filter(0.0, 1.0)


def test_window_function():
    r = WindowFunction(0.5, 1.0)
    assert np.array_equal(r(np.array([-0.1, 0.0, 0.3, 0.5, 0.7])), [0, 1, 1, 1, 0])
    with pytest.raises(PreconditionError):
        WindowFunction(1.5, 1.0)


# -- classical expansion ----------------------------------------------------------


def test_wks_critical_sinc():
    f = make_filter(1.0, 1.0)
    n = np.arange(-60, 61)
    x = np.linspace(-10, 10, 201)
    est = wks_reconstruct(n, np.sinc(n), f, x)
    assert np.max(np.abs(est - np.sinc(x))) <= 1e-9


def test_wks_zero_samples():
    f = make_filter(1.0, 0.8)
    assert not np.any(wks_reconstruct(np.arange(-5, 6), np.zeros(11), f, np.linspace(-2, 2, 9)))


def test_wks_exponential_oversampled():
    f = make_filter(1.0, 0.8)
    nu0 = 0.3 * 0.8
    n = np.arange(-64, 65)
    x = np.linspace(-8, 8, 161)
    est = wks_reconstruct(n, np.exp(2j * np.pi * nu0 * n), f, x)
    assert np.max(np.abs(est - np.exp(2j * np.pi * nu0 * x))) <= 1e-3


def test_wks_rejects_off_lattice():
    with pytest.raises(PreconditionError):
        wks_reconstruct([0.0, 0.5], [1, 1], make_filter(1.0, 1.0), [0.0])


# -- operator reconstruction --------------------------------------------------------


def _uniform_output(model, T=1.0, pad=16):
    lo = int(np.floor(model.n_min * model.spacing / T)) - pad
    hi = int(np.ceil(model.n_max * model.spacing / T)) + pad
    shifts = np.arange(lo, hi + 1) * T
    return apply_train(model, uniform_train(T, (lo - 2, hi + 2)), shifts)


def test_critical_round_trip():
    m = random_operator(1.0, 1.0, (-64, 64), 64, 7)
    out = apply_train(m, uniform_train(1.0, (-70, 70)), np.arange(-64, 65))
    rep = reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 1.0), truth=m, trim=0)
    assert rep.max_error <= 1e-9
    assert rep.notes["filter"] == "critical_sinc"


def test_zero_output_gives_zero_model():
    m = OperatorModel(1.0, 1.0, -4, 4, np.zeros((9, 4)))
    out = apply_train(m, uniform_train(1.0, (-8, 8)), np.arange(-4, 5))
    rep = reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 1.0), truth=m, trim=0)
    assert not np.any(rep.estimate.coeffs)


def test_oversampled_round_trip():
    m = random_operator(1.25, 1.0, (-64, 64), 8, 3)
    out = _uniform_output(m, pad=64)
    rep = reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 0.8), truth=m)
    assert rep.max_error <= 1e-3
    assert rep.notes["filter"] == "trapezoid"


def test_reconstruction_is_linear():
    f = make_filter(1.0, 0.8)
    m1 = random_operator(1.25, 1.0, (-16, 16), 4, 1)
    m2 = random_operator(1.25, 1.0, (-16, 16), 4, 2)
    y1, y2 = _uniform_output(m1), _uniform_output(m2)
    a, b = 0.7 - 0.2j, -1.3
    y = SampledOutput(y1.base_grid, y1.shifts, a * y1.values + b * y2.values)
    kw = dict(spacing=1.25, lattice_window=(-16, 16))
    r = reconstruct_uniform(y, 1.0, 1.0, f, **kw).estimate.coeffs
    r1 = reconstruct_uniform(y1, 1.0, 1.0, f, **kw).estimate.coeffs
    r2 = reconstruct_uniform(y2, 1.0, 1.0, f, **kw).estimate.coeffs
    assert np.max(np.abs(r - (a * r1 + b * r2))) <= 1e-12


def test_reconstruct_uniform_preconditions():
    m = random_operator(1.0, 1.0, (-4, 4), 4, 0)
    out = apply_train(m, uniform_train(1.0, (-8, 8)), np.arange(-4, 5))
    with pytest.raises(PreconditionError):
        reconstruct_uniform(out, 1.0, 1.5, make_filter(1.0, 1.0), truth=m)
    with pytest.raises(PreconditionError):
        reconstruct_uniform(out, 0.5, 0.5, make_filter(1.0, 1.0), truth=m)
    with pytest.raises(PreconditionError):
        reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 1.0))


# -- norm identity -------------------------------------------------------------------


def test_norm_identity_critical():
    m = random_operator(1.0, 1.0, (-64, 64), 64, 7)
    out = apply_train(m, uniform_train(1.0, (-70, 70)), np.arange(-64, 65))
    assert verify_norm_identity_uniform(m, out, 1.0).residual <= 1e-12


def test_norm_identity_zero():
    m = OperatorModel(1.0, 1.0, -2, 2, np.zeros((5, 4)))
    out = apply_train(m, uniform_train(1.0, (-4, 4)), np.arange(-2, 3))
    ni = verify_norm_identity_uniform(m, out, 1.0)
    assert ni.hs_norm_sq == 0 and ni.scaled_output_norm_sq == 0 and ni.residual == 0


def test_norm_identity_short_support():
    # output on [T', T) is zero, so integrating over [0, T') suffices
    m = random_operator(1.0, 0.5, (-16, 16), 8, 5)
    out = apply_train(m, uniform_train(1.0, (-20, 20)), np.arange(-16, 17))
    assert verify_norm_identity_uniform(m, out, 1.0).residual <= 1e-12


# -- Haar class ------------------------------------------------------------------------


def test_haar_single_cell():
    from opsample.model import HaarModel

    m = HaarModel(0, 0, np.array([[1.0]]))
    out = apply_train(m, uniform_train(1.0, (-1, 1)), [0.0])
    rep = haar_reconstruct(out, m)
    assert rep.estimate.heights[0, 0] == 1.0


def test_haar_random_integers_exact():
    m = random_haar_operator((-8, 8), 16, 4)
    out = apply_train(m, uniform_train(1.0, (-10, 9)), np.arange(-8, 9))
    rep = haar_reconstruct(out, m)
    assert rep.max_error == 0
    assert np.array_equal(rep.estimate.heights, m.heights)


def test_haar_zero():
    from opsample.model import HaarModel

    m = HaarModel(-2, 2, np.zeros((5, 4)))
    out = apply_train(m, uniform_train(1.0, (-4, 3)), np.arange(-2, 3))
    assert not np.any(haar_reconstruct(out, m).estimate.heights)
