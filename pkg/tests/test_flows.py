import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bundlex import Affine, OverShear, Polynomial, Shear, flow_at, matrix_log, recognize_flow
from bundlex.autgroup import AutomorphismWord, as_word, relative_residual
from bundlex.errors import NoKnownFlow, NonDiagonalizable, SingularMatrix
from bundlex.flows import (
    AffineFlow,
    BranchWarning,
    ConjugatedFlow,
    LinearFlow,
    OverShearFlow,
    ShearFlow,
)

from oracles import expm_series
from randgen import random_elementary, random_matrix, random_points, random_word

z1 = Polynomial.variable(2, 0)
J = np.array([[0, -1], [1, 0]], dtype=complex)


def test_log_identity_is_zero():
    assert np.allclose(matrix_log(np.eye(3)), 0)


def test_log_quarter_rotation():
    a = matrix_log(J)
    assert np.allclose(a, np.pi / 2 * J, atol=1e-12)
    assert np.max(np.abs(expm_series(a) - J)) < 1e-9


def test_log_jordan_block():
    a = matrix_log([[1, 1], [0, 1]])
    assert np.allclose(a, [[0, 1], [0, 0]], atol=1e-14)


def test_log_scalar_times_jordan_block():
    m = np.array([[2, 3, 0], [0, 2, 3], [0, 0, 2]], dtype=complex)
    assert np.max(np.abs(expm_series(matrix_log(m)) - m)) < 1e-9


def test_log_singular_rejected():
    with pytest.raises(SingularMatrix):
        matrix_log([[1, 2], [2, 4]])


def test_log_defective_mixed_spectrum_rejected():
    with pytest.raises(NonDiagonalizable):
        matrix_log([[1, 1, 0], [0, 1, 0], [0, 0, 2]])


def test_log_negative_axis_warns_and_still_inverts():
    m = np.diag([-2.0, 1.0])
    with pytest.warns(BranchWarning):
        a = matrix_log(m)
    assert np.isclose(a[0, 0], np.log(2) - 1j * np.pi)
    assert np.max(np.abs(expm_series(a) - m)) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_exp_log_random_diagonalizable(n):
    rng = np.random.default_rng(n)
    worst = 0.0
    for _ in range(100):
        m = random_matrix(rng, n) * rng.uniform(0.5, 2)
        worst = max(worst, np.max(np.abs(expm_series(matrix_log(m)) - m)))
    assert worst < 1e-9


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_exp_log_property(seed, n):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if np.linalg.cond(vec) > 1e3:
        vec = np.eye(n)
    lam = np.exp(rng.uniform(-1, 1, n) + 1j * rng.uniform(-3.1, 3.1, n))
    m = vec @ np.diag(lam) @ np.linalg.inv(vec)
    assert np.max(np.abs(expm_series(matrix_log(m)) - m)) < 1e-9


def test_recognize_shear():
    f = recognize_flow(Shear(1, z1**2))
    assert isinstance(f, ShearFlow)
    z = np.array([[2.0, 1.0]])
    # S^t adds t q
    assert np.allclose(f.apply(0.5, z), [[2.0, 3.0]])


def test_recognize_overshear():
    f = recognize_flow(OverShear(1, z1))
    assert isinstance(f, OverShearFlow)
    z = np.array([[1.0, 2.0]])
    assert np.allclose(f.apply(0.5, z), [[1.0, 2.0 * np.exp(0.5)]])


def test_recognize_swap_linear():
    m = np.array([[0, 1j], [1, 0]])
    f = recognize_flow(Affine(m))
    assert isinstance(f, LinearFlow)
    assert np.max(np.abs(expm_series(f.generator) - m)) < 1e-9


def test_recognize_affine_uses_homogeneous_generator():
    e = Affine([[1, 0], [0, 2]], [1, 1])
    f = recognize_flow(e)
    assert isinstance(f, AffineFlow)
    assert f.generator.shape == (3, 3)
    assert np.allclose(f.generator[-1], 0)
    # homogeneous matrix is a Jordan block here; the time-1 map must still be e
    z = random_points(np.random.default_rng(8), 100, 2)
    assert np.max(relative_residual(e(z), f.apply(1.0, z))) < 1e-9
    assert np.max(relative_residual(f.apply(0.7, z), f.apply(0.3, f.apply(0.4, z)))) < 1e-9


def test_recognize_pure_translation():
    f = recognize_flow(Affine(np.eye(2), [1, 2j]))
    z = np.array([[0.0, 0.0]])
    assert np.allclose(f.apply(0.25, z), [[0.25, 0.5j]])


def test_recognize_rejects_defective_affine():
    with pytest.raises(NoKnownFlow):
        recognize_flow(Affine([[1, 1, 0], [0, 1, 0], [0, 0, 2]]))


def test_flow_at_one_is_the_shear():
    q = z1**3 - 2j
    e = flow_at(ShearFlow(1, q), 1)
    assert isinstance(e, Shear) and e.q == q


def test_half_flow_twice_is_time_one():
    flow = LinearFlow(matrix_log(J))
    half = as_word(flow_at(flow, 0.5))
    one = as_word(flow_at(flow, 1))
    z = random_points(np.random.default_rng(0), 100, 2)
    assert np.max(relative_residual(one(z), half(half(z)))) < 1e-9


def test_negative_axis_flow_flagged():
    f = recognize_flow(Affine(np.diag([-1.0, 1.0])))
    assert f.branch_rotated
    z = random_points(np.random.default_rng(1), 50, 2)
    assert np.max(relative_residual(z * [-1, 1], f.apply(1.0, z))) < 1e-9


def test_conjugated_flow_time_one():
    base = recognize_flow(Shear(1, z1))
    c = AutomorphismWord((Affine([[0, 1], [1, 0]]),))
    f = ConjugatedFlow(base, c)
    target = c.then(as_word(Shear(1, z1))).then(c.inverse())
    z = random_points(np.random.default_rng(2), 100, 2)
    assert np.max(relative_residual(target(z), f.apply(1.0, z))) < 1e-9
    assert np.max(relative_residual(target(z), f.at(1.0)(z))) < 1e-9


def test_per_point_times():
    f = recognize_flow(Affine(random_matrix(np.random.default_rng(3), 2), [1, 0]))
    z = random_points(np.random.default_rng(4), 5, 2)
    t = np.linspace(-1, 1, 5) + 0.3j
    batch = f.apply(t, z)
    single = np.stack([f.apply(complex(ti), zi[None])[0] for ti, zi in zip(t, z)])
    assert np.allclose(batch, single, rtol=1e-12)


def _elementaries(seed, count):
    rng = np.random.default_rng(seed)
    return [random_elementary(rng, int(rng.integers(2, 4))) for _ in range(count)]


@pytest.mark.parametrize("e", _elementaries(11, 100), ids=lambda e: type(e).__name__)
def test_time_one_consistency(e):
    f = recognize_flow(e)
    z = random_points(np.random.default_rng(5), 100, e.dimension)
    assert np.max(relative_residual(as_word(e)(z), as_word(flow_at(f, 1))(z))) < 1e-9
    assert np.max(relative_residual(as_word(e)(z), f.apply(1.0, z))) < 1e-9


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_group_law(seed, complex_times):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    e = random_elementary(rng, n)
    flows = [recognize_flow(e), ConjugatedFlow(recognize_flow(e), random_word(rng, n, 2, maxdeg=2, overshear=False))]
    z = random_points(rng, 100, n)
    s, t = rng.uniform(-1, 1, (2, 100))
    if complex_times:
        s = s + 1j * rng.uniform(-0.5, 0.5, 100)
        t = t + 1j * rng.uniform(-0.5, 0.5, 100)
    for f in flows:
        lhs = f.apply(s + t, z)
        rhs = f.apply(s, f.apply(t, z))
        assert np.max(relative_residual(lhs, rhs)) < 1e-9


def test_zero_time_is_identity():
    z = random_points(np.random.default_rng(6), 20, 2)
    for e in (Shear(1, z1), OverShear(1, z1), Affine(J, [1, 1])):
        assert np.allclose(recognize_flow(e).apply(0.0, z), z)
