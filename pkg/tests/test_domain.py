"""Configuration-space types and amplitude-tensor evaluation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stardelta.domain import (
    ABOVE,
    BELOW,
    OFFDIAG,
    AmplitudeTensor,
    MomentumPair,
    QuadrantPoint,
    make_config,
)


def test_make_config_valid():
    cfg = make_config(3, 1.0)
    assert cfg.n == 3 and cfg.c == 1.0 and cfg.lam == 1.0
    assert cfg.basis_size == 12  # 2*9 - 6
    assert make_config(5, -2.0).basis_size == 40


def test_make_config_rejects_small_n():
    with pytest.raises(ValueError):
        make_config(2, 1.0)


def test_make_config_rejects_nonfinite_coupling():
    with pytest.raises(ValueError):
        make_config(4, float("inf"))
    with pytest.raises(ValueError):
        make_config(4, float("nan"))


def test_momentum_pair_energy_shell():
    m = MomentumPair.from_k1(0.6)
    assert m.k2 == pytest.approx(0.8)
    with pytest.raises(ValueError):
        MomentumPair(0.6, 0.9)
    # complex pairs on the shell are allowed at the type level
    MomentumPair(1j, math.sqrt(2.0))


@given(st.floats(min_value=0.0, max_value=1.0))
def test_momentum_partner_roundtrip(k1):
    m = MomentumPair.from_k1(k1)
    assert abs(m.k1**2 + m.k2**2 - 1.0) <= 1e-12
    assert m.swapped().k1 == m.k2


def test_quadrant_point_sector_consistency():
    QuadrantPoint(1, 1, 0.5, 0.2, ABOVE)
    QuadrantPoint(1, 2, 0.5, 0.2, OFFDIAG)
    with pytest.raises(ValueError):
        QuadrantPoint(1, 2, 0.5, 0.2, ABOVE)
    with pytest.raises(ValueError):
        QuadrantPoint(2, 2, 0.5, 0.2, OFFDIAG)
    with pytest.raises(ValueError):
        QuadrantPoint(1, 1, -0.5, 0.2, ABOVE)


def test_empty_tensor_evaluates_to_zero():
    t = AmplitudeTensor.zero()
    m = MomentumPair.from_k1(0.6)
    p = QuadrantPoint(1, 2, 1.0, 2.0, OFFDIAG)
    assert t.value(p, m) == 0
    assert t.derivative(p, m, "dx") == 0


def test_single_entry_at_origin():
    t = AmplitudeTensor({(1, 2, OFFDIAG, 1, 1, 1): 1.0})
    m = MomentumPair.from_k1(0.6)
    p = QuadrantPoint(1, 2, 0.0, 0.0, OFFDIAG)
    assert t.value(p, m) == pytest.approx(1.0)


def test_single_entry_derivative_at_origin():
    # d/dx exp(i*0.6*x + i*0.8*y) at the origin is 0.6i
    t = AmplitudeTensor({(1, 2, OFFDIAG, 1, 1, 1): 1.0})
    m = MomentumPair.from_k1(0.6)
    p = QuadrantPoint(1, 2, 0.0, 0.0, OFFDIAG)
    assert t.derivative(p, m, "dx") == pytest.approx(0.6j)
    assert t.derivative(p, m, "dy") == pytest.approx(0.8j)


def test_assignment_slot_swaps_momenta():
    t = AmplitudeTensor({(1, 2, OFFDIAG, 1, 1, 2): 1.0})
    m = MomentumPair.from_k1(0.6)
    p = QuadrantPoint(1, 2, 1.0, 0.0, OFFDIAG)
    # slot 2 means x carries k2 = 0.8
    assert t.value(p, m) == pytest.approx(np.exp(0.8j))


def test_offdiagonal_sector_collapses():
    t = AmplitudeTensor({(1, 2, ABOVE, 1, 1, 1): 2.0})
    m = MomentumPair.from_k1(0.6)
    assert t.get(1, 2, BELOW, 1, 1, 1) == 2.0
    va = t.value_array(1, 2, ABOVE, [1.0], [2.0], m)
    vb = t.value_array(1, 2, BELOW, [1.0], [2.0], m)
    assert va[0] == vb[0]


def _random_tensor(rng, n=3, entries=8):
    table = {}
    for _ in range(entries):
        i, j = rng.integers(1, n + 1, size=2)
        sector = OFFDIAG if i != j else (ABOVE if rng.random() < 0.5 else BELOW)
        key = (
            int(i),
            int(j),
            sector,
            int(rng.choice([-1, 1])),
            int(rng.choice([-1, 1])),
            int(rng.choice([1, 2])),
        )
        table[key] = complex(rng.normal(), rng.normal())
    return AmplitudeTensor(table)


def test_linearity_of_evaluation():
    rng = np.random.default_rng(7)
    m = MomentumPair.from_k1(0.37)
    t1 = _random_tensor(rng)
    t2 = _random_tensor(rng)
    combo = AmplitudeTensor.combine([(2.0 - 1.0j, t1), (0.5j, t2)])
    for _ in range(20):
        i, j = rng.integers(1, 4, size=2)
        sector = OFFDIAG if i != j else ABOVE
        x, y = rng.uniform(0, 10, size=2)
        lhs = combo.value_array(int(i), int(j), sector, x, y, m)[0]
        rhs = (2.0 - 1.0j) * t1.value_array(int(i), int(j), sector, x, y, m)[0] + 0.5j * t2.value_array(
            int(i), int(j), sector, x, y, m
        )[0]
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_derivative_matches_finite_differences():
    rng = np.random.default_rng(11)
    m = MomentumPair.from_k1(0.45)
    t = _random_tensor(rng, entries=10)
    h = 1e-5
    for key in list(t.support()):
        i, j, sector = key
        x, y = rng.uniform(1.0, 8.0, size=2)
        for direction in ("dx", "dy"):
            exact = t.derivative_array(i, j, sector, x, y, m, direction)[0]
            if direction == "dx":
                plus = t.value_array(i, j, sector, x + h, y, m)[0]
                minus = t.value_array(i, j, sector, x - h, y, m)[0]
            else:
                plus = t.value_array(i, j, sector, x, y + h, m)[0]
                minus = t.value_array(i, j, sector, x, y - h, m)[0]
            approx = (plus - minus) / (2 * h)
            assert abs(exact - approx) <= 1e-7 * max(1.0, abs(exact))


@settings(max_examples=30)
@given(
    st.floats(min_value=0.05, max_value=0.95),
    st.floats(min_value=0.0, max_value=9.0),
    st.floats(min_value=0.0, max_value=9.0),
)
def test_eigen_equation_per_plane_wave(k1, x, y):
    # every stored wave satisfies -(dxx + dyy) psi = psi because
    # k1^2 + k2^2 = 1 on the shell
    t = AmplitudeTensor({(1, 1, ABOVE, 1, -1, 2): 1.5 - 0.5j})
    m = MomentumPair.from_k1(k1)
    k_x = m.k2
    k_y = -m.k1
    v = t.value_array(1, 1, ABOVE, x, y, m)[0]
    laplacian = -(1j * k_x) ** 2 * v - (1j * k_y) ** 2 * v
    assert laplacian == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_serialisation_roundtrip():
    rng = np.random.default_rng(3)
    t = _random_tensor(rng, entries=12)
    back = AmplitudeTensor.from_rows(t.to_rows())
    assert dict(back.items()) == pytest.approx(dict(t.items()))


def test_with_scaled_entry():
    t = AmplitudeTensor({(1, 2, OFFDIAG, 1, 1, 1): 2.0})
    t2 = t.with_scaled_entry((1, 2, OFFDIAG, 1, 1, 1), 1.001)
    assert t2.get(1, 2, OFFDIAG, 1, 1, 1) == pytest.approx(2.002)
    assert t.get(1, 2, OFFDIAG, 1, 1, 1) == 2.0
    with pytest.raises(KeyError):
        t.with_scaled_entry((2, 2, ABOVE, 1, 1, 1), 2.0)
