import math

import numpy as np
import pytest

from opsample.errors import PreconditionError, SingularSystemError
from opsample.identifiers import derivative_train
from opsample.model import OperatorModel, eval_h, random_operator
from opsample.multichannel import (
    derivative_kernels,
    derivative_outputs,
    derivative_two_channel_reconstruct,
    dft_coefficients,
    dft_mixing_matrix,
    general_mixing_matrix,
    leibniz_residual,
    multichannel_norm_identity,
    multichannel_outputs,
    pns_general_kernel,
    pns_general_reconstruct,
    pns_kernels,
    pns_outputs,
    pns_two_channel_reconstruct,
    random_mixing_coefficients,
    reconstruct_multichannel_dft,
    reconstruct_multichannel_general,
)
from opsample.uniform import make_filter, reconstruct_uniform

# -- mixing matrices -----------------------------------------------------------------


def test_dft_matrix_trivial():
    A = dft_mixing_matrix(1, 1, 0)
    assert A.entries.shape == (1, 1) and A.entries[0, 0] == 1


def test_dft_matrix_two_by_two():
    A = dft_mixing_matrix(1, 2, 0).entries
    assert np.allclose(A, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("k", range(4))
def test_dft_matrix_unitary(k):
    A = dft_mixing_matrix(2, 2, k)
    assert np.max(np.abs(A.entries @ A.entries.conj().T - np.eye(4))) <= 1e-14
    c = np.random.default_rng(k).standard_normal(4) + 1j
    assert np.linalg.norm(A.entries @ c) == pytest.approx(np.linalg.norm(c), rel=1e-12)
    assert A.condition == pytest.approx(1.0)


def test_general_matrix_with_dft_weights_is_scaled_dft():
    c = dft_coefficients(2, 2)
    for k in range(-3, 5):
        G = general_mixing_matrix(c, k).entries
        assert np.allclose(G / 2, dft_mixing_matrix(2, 2, k).entries, atol=1e-14)


def test_random_mixing_well_conditioned():
    c = random_mixing_coefficients(2, 2, 9)
    conds = [general_mixing_matrix(c, k).condition for k in range(4)]
    assert max(conds) < 10
    assert np.allclose(conds, conds[0])


# -- DFT channels ----------------------------------------------------------------------


def test_direct_summation_two_by_one():
    M, N = 2, 1
    m = random_operator(0.5, 1.0, (-6, 6), 8, 3)
    outs = multichannel_outputs(m, M, N)
    w = np.exp(2j * np.pi / (M * N))
    for j, out in enumerate(outs):
        for row in (0, 5, 11):
            k = int(round(out.shifts[row] * M))
            for i, t in enumerate(out.base_grid.points):
                x = t + k / M
                ref = 0
                for n in range(k - 40, k + 1):
                    lag = x - n / M
                    if 0 <= lag < m.temporal_support:
                        ref += w ** (j * n) * eval_h(m, lag, x)
                assert abs(out.values[row, i] - ref) <= 1e-12


def test_zero_model_channels():
    m = OperatorModel(0.5, 2.0, -3, 3, np.zeros((7, 8)))
    outs = multichannel_outputs(m, 2, 2)
    assert len(outs) == 4
    assert all(not np.any(o.values) for o in outs)


def test_class_mismatch():
    with pytest.raises(PreconditionError):
        multichannel_outputs(random_operator(1.0, 2.0, (-3, 3), 4, 0), 2, 2)
    with pytest.raises(PreconditionError):
        multichannel_outputs(random_operator(0.5, 3.0, (-3, 3), 6, 0), 2, 2)


def test_dft_round_trip_and_norm_identity():
    m = random_operator(0.5, 2.0, (-32, 32), 16, 5)
    outs = multichannel_outputs(m, 2, 2)
    rep = reconstruct_multichannel_dft(outs, 2, 2, truth=m)
    assert rep.max_error <= 1e-9
    assert rep.norm_residual <= 1e-12
    assert multichannel_norm_identity(m, outs, 2, 2) <= 1e-12


def test_dft_single_channel_equals_uniform():
    m = random_operator(1.0, 1.0, (-16, 16), 8, 6)
    (out,) = multichannel_outputs(m, 1, 1)
    a = reconstruct_multichannel_dft([out], 1, 1, truth=m).estimate.coeffs
    b = reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 1.0), truth=m).estimate.coeffs
    assert np.max(np.abs(a - b)) <= 1e-12


def test_dft_short_support():
    m = random_operator(0.5, 1.5, (-16, 16), 12, 7)
    rep = reconstruct_multichannel_dft(multichannel_outputs(m, 2, 2), 2, 2, truth=m)
    assert rep.max_error <= 1e-9


def test_wrong_channel_count():
    m = random_operator(0.5, 2.0, (-4, 4), 8, 0)
    outs = multichannel_outputs(m, 2, 2)
    with pytest.raises(PreconditionError):
        reconstruct_multichannel_dft(outs[:3], 2, 2, truth=m)


# -- general mixing ---------------------------------------------------------------------


def test_general_with_dft_weights_matches_dft():
    m = random_operator(0.5, 2.0, (-16, 16), 8, 8)
    outs = multichannel_outputs(m, 2, 2)
    a = reconstruct_multichannel_dft(outs, 2, 2, truth=m).estimate.coeffs
    b = reconstruct_multichannel_general(outs, dft_coefficients(2, 2), 2, 2, truth=m).estimate.coeffs
    assert np.max(np.abs(a - b)) <= 1e-12


def test_general_random_mixing():
    m = random_operator(0.5, 2.0, (-32, 32), 16, 9)
    c = random_mixing_coefficients(2, 2, 9)
    rep = reconstruct_multichannel_general(multichannel_outputs(m, 2, 2, c), c, 2, 2, truth=m)
    assert rep.max_error <= 1e-8
    assert rep.condition < 10


def test_channel_permutation_invariance():
    m = random_operator(0.5, 2.0, (-16, 16), 8, 10)
    c = random_mixing_coefficients(2, 2, 10)
    outs = multichannel_outputs(m, 2, 2, c)
    perm = [2, 0, 3, 1]
    a = reconstruct_multichannel_general(outs, c, 2, 2, truth=m).estimate.coeffs
    b = reconstruct_multichannel_general([outs[p] for p in perm], c[perm], 2, 2, truth=m).estimate.coeffs
    assert np.max(np.abs(a - b)) <= 1e-12


def test_rank_deficient_mixing_raises():
    m = random_operator(0.5, 2.0, (-8, 8), 8, 11)
    c = random_mixing_coefficients(2, 2, 11)
    c[3] = c[1]
    outs = multichannel_outputs(m, 2, 2, c)
    with pytest.raises(SingularSystemError):
        reconstruct_multichannel_general(outs, c, 2, 2, truth=m)


# -- periodic nonuniform -----------------------------------------------------------------


def half_band_quadrature(x, alpha):
    # inverse transform of the frequency-domain definitions of S1 and S2
    g, w = np.polynomial.legendre.leggauss(400)
    nu_lo, nu_hi = 0.25 * (g - 1), 0.25 * (g + 1)
    w = 0.25 * w
    e = np.exp(1j * np.pi * alpha)
    lo = np.exp(2j * np.pi * np.outer(x, nu_lo)) @ w
    hi = np.exp(2j * np.pi * np.outer(x, nu_hi)) @ w
    f = 2 / (e - 1)
    return f * (e * lo - hi), f * (-lo + e * hi)


@pytest.mark.parametrize("alpha", [0.37, 0.5, 0.9])
def test_pns_kernels_against_quadrature(alpha):
    x = np.linspace(-10, 10, 2001)
    S1, S2 = pns_kernels(alpha)
    Q1, Q2 = half_band_quadrature(x, alpha)
    assert np.max(np.abs(S1(x) - Q1)) <= 1e-8
    assert np.max(np.abs(S2(x) - Q2)) <= 1e-8


def test_pns_kernels_near_zero():
    S1, S2 = pns_kernels(0.37)
    x = np.array([-1e-9, 0.0, 1e-9])
    assert np.allclose(S1(x), S1(np.array([0.0]))[0], atol=1e-8)
    assert np.allclose(S2(x), S2(np.array([0.0]))[0], atol=1e-8)


def test_pns_alpha_range():
    for a in (0.0, 1.0, 1.5):
        with pytest.raises(PreconditionError):
            pns_kernels(a)


def test_polyphase_kernel_matches_closed_form():
    alphas = (0.0, 0.37)
    y = np.linspace(-20, 20, 801)
    for j, S in enumerate(pns_kernels(0.37)):
        G = pns_general_kernel(alphas, 1, 2, j)
        assert np.max(np.abs(G(y) - S(y))) <= 1e-12


@pytest.mark.parametrize("alphas,M,N", [((0.0, 0.37), 1, 2), ((0.1, 0.6, 1.3, 1.8), 2, 2), ((0.0, 0.4, 1.1), 1, 3)])
def test_polyphase_kernel_cardinal(alphas, M, N):
    MN = M * N
    for j in range(MN):
        S = pns_general_kernel(alphas, M, N, j)
        for i in range(MN):
            for n in range(-3, 4):
                v = S(np.array(n * N + alphas[i] - alphas[j]))
                assert abs(v - (1.0 if (i == j and n == 0) else 0.0)) <= 1e-12


def test_uniform_offsets_give_sinc():
    # alpha_j = j/M turns the interleaved trains into one uniform train
    M, N = 2, 2
    alphas = np.arange(M * N) / M
    y = np.linspace(-7, 7, 301)
    for j in range(M * N):
        assert np.max(np.abs(pns_general_kernel(alphas, M, N, j)(y) - np.sinc(M * y))) <= 1e-12


def test_uniform_offsets_match_dft_path():
    M, N = 2, 2
    m = random_operator(0.5, 2.0, (-16, 16), 16, 12)
    rep = pns_general_reconstruct(pns_outputs(m, np.arange(4) / M, N, 8), np.arange(4) / M, M, N, truth=m, trim=0)
    dft = reconstruct_multichannel_dft(multichannel_outputs(m, M, N), M, N, truth=m)
    assert rep.max_error <= 1e-8
    assert np.max(np.abs(rep.estimate.coeffs - dft.estimate.coeffs)) <= 1e-8


@pytest.fixture(scope="module")
def pns_setup():
    m = random_operator(1.0, 2.0, (-32, 32), 8, 13)
    return m, pns_outputs(m, (0.0, 0.37), 2.0, 256)


def test_pns_general_matches_closed_form(pns_setup):
    m, outs = pns_setup
    a = pns_two_channel_reconstruct(outs, 0.37, truth=m).estimate.coeffs
    b = pns_general_reconstruct(outs, (0.0, 0.37), 1, 2, truth=m).estimate.coeffs
    assert np.max(np.abs(a - b)) <= 1e-6


def test_pns_frame_section_is_close(pns_setup):
    # finite-section dual frame: a looser cross-check of the polyphase path
    m, outs = pns_setup
    rep = pns_general_reconstruct(outs, (0.0, 0.37), 1, 2, method="frame_section", section=256, truth=m)
    assert rep.max_error <= 0.1


def test_pns_truncation_error_shrinks():
    m = random_operator(1.0, 2.0, (-16, 16), 4, 14)
    errs = [pns_two_channel_reconstruct(pns_outputs(m, (0.0, 0.37), 2.0, p), 0.37, truth=m).max_error
            for p in (64, 256, 1024)]
    assert errs[0] > errs[1] > errs[2]


def test_pns_zero_outputs(pns_setup):
    m, outs = pns_setup
    zero = [o.scaled(0) for o in outs]
    assert not np.any(pns_two_channel_reconstruct(zero, 0.37, truth=m).estimate.coeffs)
    assert not np.any(pns_general_reconstruct(zero, (0.0, 0.37), 1, 2, truth=m).estimate.coeffs)


def test_pns_duplicate_offsets(pns_setup):
    m, outs = pns_setup
    with pytest.raises(PreconditionError):
        pns_general_reconstruct(outs, (0.37, 0.37), 1, 2, truth=m)


# -- derivative sampling -----------------------------------------------------------------


def test_derivative_kernels_interpolate():
    S, T = derivative_kernels()
    n = np.arange(-6, 7) * 2.0
    assert np.allclose(S(n), (n == 0).astype(float), atol=1e-15)
    assert np.max(np.abs(T(n))) <= 1e-15
    h = 1e-6
    dS = (S(n + h) - S(n - h)) / (2 * h)
    dT = (T(n + h) - T(n - h)) / (2 * h)
    assert np.max(np.abs(dS)) <= 1e-8
    assert np.allclose(dT, (n == 0).astype(float), atol=1e-8)


def test_derivative_truncation_error_shrinks():
    m = random_operator(1.0, 2.0, (-16, 16), 4, 15)
    errs = []
    for pad in (64, 256, 1024):
        o0, o1 = derivative_outputs(m, pad)
        errs.append(derivative_two_channel_reconstruct(o0, o1, truth=m).max_error)
    assert errs[0] > errs[1] > errs[2]


def test_flat_derivative_channel():
    # h(t, x) = sinc^2((x - t)/2) has zero slope at x = t + 2n
    L = 64
    a = np.sinc(np.arange(-L, L + 1) / 2) ** 2
    m = OperatorModel(1.0, 2.0, -L, L, np.repeat(a[:, None], 8, axis=1))
    o0, o1 = derivative_outputs(m, 64)
    assert np.max(np.abs(o1.values)) <= 1e-3
    full = derivative_two_channel_reconstruct(o0, o1, truth=m).estimate.coeffs
    only_s = derivative_two_channel_reconstruct(o0, o1.scaled(0), truth=m).estimate.coeffs
    assert np.max(np.abs(full - only_s)) <= 1e-4


def test_leibniz_consistency():
    m = random_operator(1.0, 2.0, (-16, 16), 8, 16)
    tr = derivative_train(2.0, 1, (-12, 12))
    assert leibniz_residual(m, tr, np.arange(-8, 9) * 2.0) <= 1e-4


def test_derivative_class_mismatch():
    m = random_operator(1.0, 1.0, (-4, 4), 4, 0)
    o0, o1 = derivative_outputs(random_operator(1.0, 2.0, (-4, 4), 4, 0), 4)
    with pytest.raises(PreconditionError):
        derivative_two_channel_reconstruct(o0, o1, truth=m)
