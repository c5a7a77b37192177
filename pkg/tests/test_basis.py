"""Two-particle products, the full basis, and the diagonal closed form."""

import numpy as np
import pytest

from stardelta.basis import (
    build_basis,
    circular_distance,
    closed_form_at_complex_momentum,
    complex_momentum_profile,
    cycle_completing_tensor,
    diagonal_closed_form,
    family_counts,
    product_state,
)
from stardelta.domain import ABOVE, BELOW, OFFDIAG, MomentumPair, make_config
from stardelta.oneparticle import LARGER, NEUTRAL, SMALLER, phi, scattering_wave, xi_solution
from stardelta.verifier import basis_rank

CFG3 = make_config(3, 1.0)
M68 = MomentumPair.from_k1(0.6)


def _branches(i, j, sector):
    if i != j:
        return NEUTRAL, NEUTRAL
    return (LARGER, SMALLER) if sector == ABOVE else (SMALLER, LARGER)


def test_circular_distance():
    assert circular_distance(1, 3, 3) == 1
    assert circular_distance(1, 3, 4) == 2
    assert circular_distance(2, 5, 5) == 2
    assert circular_distance(4, 4, 5) == 0


def test_phi_phi_00_is_cosine_product():
    state = product_state(CFG3, ("phi_phi", 0, 0), (1, 2), M68)
    rng = np.random.default_rng(1)
    for _ in range(20):
        i, j = rng.integers(1, 4, size=2)
        sector = OFFDIAG if i != j else ABOVE
        x, y = rng.uniform(0, 9, size=2)
        got = state.tensor.value_array(int(i), int(j), sector, x, y, M68)[0]
        assert got == pytest.approx(np.cos(0.6 * x) * np.cos(0.8 * y), abs=1e-13)


def test_psi_psi_matches_factorwise_oracle():
    state = product_state(CFG3, ("psi_psi", 1, 2), (1, 2), M68)
    got = state.tensor.value_array(1, 3, OFFDIAG, 1.0, 2.0, M68)[0]
    oracle = scattering_wave(CFG3, 1).value(1, 1.0, 0.6) * scattering_wave(CFG3, 2).value(3, 2.0, 0.8)
    assert got == pytest.approx(oracle, abs=1e-12)


def test_product_matches_factorwise_oracle_all_quadrants():
    rng = np.random.default_rng(8)
    xi = xi_solution(CFG3)
    for kind in (("phi_phi", 1, 2), ("psi_psi", 3, 1)):
        for assignment in ((1, 2), (2, 1)):
            state = product_state(CFG3, kind, assignment, M68)
            fx = phi(CFG3, kind[1]) if kind[0] == "phi_phi" else scattering_wave(CFG3, kind[1])
            gy = phi(CFG3, kind[2]) if kind[0] == "phi_phi" else scattering_wave(CFG3, kind[2])
            ks = (M68.k1, M68.k2) if assignment == (1, 2) else (M68.k2, M68.k1)
            for _ in range(15):
                i, j = (int(v) for v in rng.integers(1, 4, size=2))
                sector = OFFDIAG if i != j else (ABOVE if rng.random() < 0.5 else BELOW)
                bx, by = _branches(i, j, sector)
                x, y = rng.uniform(0, 9, size=2)
                got = state.tensor.value_array(i, j, sector, x, y, M68)[0]
                oracle = fx.value(i, x, ks[0], bx) * gy.value(j, y, ks[1], by)
                assert got == pytest.approx(oracle, abs=1e-12)
    # the antisymmetrised phi/xi product against its two-term oracle
    state = product_state(CFG3, ("phi_xi_antisym", 2), (1, 2), M68)
    ph = phi(CFG3, 2)
    for _ in range(15):
        i, j = (int(v) for v in rng.integers(1, 4, size=2))
        sector = OFFDIAG if i != j else (ABOVE if rng.random() < 0.5 else BELOW)
        bx, by = _branches(i, j, sector)
        x, y = rng.uniform(0, 9, size=2)
        got = state.tensor.value_array(i, j, sector, x, y, M68)[0]
        oracle = ph.value(i, x, 0.6, bx) * xi.value(j, y, 0.8, by) - xi.value(i, x, 0.6, bx) * ph.value(
            j, y, 0.8, by
        )
        assert got == pytest.approx(oracle, abs=1e-12)


def test_phi_xi_antisym_exchange_rule():
    # the antisymmetrised product obeys psi_12(x, y) = -psi_21(y, x) with
    # the sector flipped along with the coordinates; at x = y the two
    # sector branches are therefore opposite across the assignments
    s12 = product_state(CFG3, ("phi_xi_antisym", 1), (1, 2), M68)
    s21 = product_state(CFG3, ("phi_xi_antisym", 1), (2, 1), M68)
    rng = np.random.default_rng(6)
    for _ in range(20):
        i, j = (int(v) for v in rng.integers(1, 4, size=2))
        sector = OFFDIAG if i != j else (ABOVE if rng.random() < 0.5 else BELOW)
        flipped = sector if i != j else (BELOW if sector == ABOVE else ABOVE)
        x, y = rng.uniform(0, 9, size=2)
        v = s12.tensor.value_array(i, j, sector, x, y, M68)[0]
        w = s21.tensor.value_array(j, i, flipped, y, x, M68)[0]
        assert w == pytest.approx(-v, abs=1e-12)
    t = 2.5
    va = s12.tensor.value_array(1, 1, ABOVE, t, t, M68)[0]
    vb = s21.tensor.value_array(1, 1, BELOW, t, t, M68)[0]
    assert vb == pytest.approx(-va, abs=1e-12)


def test_product_state_rejects_bad_indices():
    with pytest.raises(ValueError):
        product_state(CFG3, ("psi_psi", 0, 1), (1, 2), M68)
    with pytest.raises(ValueError):
        product_state(CFG3, ("phi_phi", 4, 0), (1, 2), M68)
    with pytest.raises(ValueError):
        product_state(CFG3, ("phi_xi_antisym", 5), (1, 2), M68)
    with pytest.raises(ValueError):
        product_state(CFG3, ("psi_psi", 1, 1), (2, 2), M68)


@pytest.mark.parametrize(
    "n,expected",
    [(3, (9, 0, 3)), (4, (16, 4, 4)), (5, (25, 10, 5))],
)
def test_family_counts(n, expected):
    cfg = make_config(n, 1.0)
    elements = build_basis(cfg, M68)
    counts = family_counts(elements)
    assert len(elements) == 2 * n * n - 2 * n
    assert (counts["antisym"], counts["sym_offdiag"], counts["sym_diag"]) == expected


def test_build_basis_rejects_zero_coupling():
    with pytest.raises(ValueError):
        build_basis(make_config(3, 0.0), M68)


def test_build_basis_warns_at_degenerate_momentum():
    m_eq = MomentumPair.from_k1(1.0 / np.sqrt(2.0))
    with pytest.warns(UserWarning):
        build_basis(CFG3, m_eq)


def test_exchange_symmetry():
    rng = np.random.default_rng(12)
    elements = build_basis(CFG3, M68)
    for el in elements:
        sign = -1.0 if el.family == "antisym" else 1.0
        for _ in range(20):
            i, j = (int(v) for v in rng.integers(1, 4, size=2))
            sector = OFFDIAG if i != j else (ABOVE if rng.random() < 0.5 else BELOW)
            swapped_sector = sector if i != j else (BELOW if sector == ABOVE else ABOVE)
            x, y = rng.uniform(0, 9, size=2)
            v = el.tensor.value_array(i, j, sector, x, y, el.momentum)[0]
            w = el.tensor.value_array(j, i, swapped_sector, y, x, el.momentum)[0]
            assert w == pytest.approx(sign * v, abs=1e-12)


def test_sym_offdiag_vanishes_on_diagonal_quadrants():
    cfg = make_config(5, 2.0)
    rng = np.random.default_rng(3)
    for el in build_basis(cfg, M68):
        if el.family != "sym_offdiag":
            continue
        for _ in range(10):
            i = int(rng.integers(1, 6))
            sector = ABOVE if rng.random() < 0.5 else BELOW
            x, y = rng.uniform(0, 9, size=2)
            v = el.tensor.value_array(i, i, sector, x, y, el.momentum)[0]
            assert abs(v) <= 1e-13


def test_cycle_completer_vanishes_on_diagonal_quadrants():
    t = cycle_completing_tensor(CFG3, M68)
    rng = np.random.default_rng(4)
    for _ in range(20):
        i = int(rng.integers(1, 4))
        sector = ABOVE if rng.random() < 0.5 else BELOW
        x, y = rng.uniform(0, 9, size=2)
        assert abs(t.value_array(i, i, sector, x, y, M68)[0]) <= 1e-13


@pytest.mark.parametrize("n", [3, 4, 5])
def test_basis_rank_full(n):
    cfg = make_config(n, 1.0)
    elements = build_basis(cfg, M68)
    rank, svals = basis_rank(elements, seed=17)
    assert rank == len(elements)
    assert svals[-1] / svals[0] > 1e-8


def test_eigen_equation_per_entry():
    # every stored plane wave sits on the unit energy shell, so the
    # two-dimensional eigen-equation holds entry by entry
    for el in build_basis(CFG3, M68):
        for (_i, _j, _sector, sig, tau, slot), _amp in el.tensor.items():
            kx = sig * (el.momentum.k1 if slot == 1 else el.momentum.k2)
            ky = tau * (el.momentum.k2 if slot == 1 else el.momentum.k1)
            assert abs(kx * kx + ky * ky - 1.0) <= 1e-12


# -- diagonal closed form -----------------------------------------------------


def test_closed_form_on_diagonal_cut():
    # at x = y only the cosine terms survive
    cfg = make_config(3, 1.3)
    m = MomentumPair.from_k1(0.6)
    k = (m.k1 + m.k2) / 2
    kp = (m.k1 - m.k2) / 2
    for x in (0.7, 2.2, 5.1):
        got = diagonal_closed_form(cfg, 1, m, x, x)
        expected = cfg.n * (
            -(2 * k / cfg.c) * np.sin(kp * 2 * x) + (2 * kp / cfg.c) * np.sin(k * 2 * x)
        )
        assert got == pytest.approx(expected, abs=1e-12)


def test_closed_form_zero_at_origin():
    assert diagonal_closed_form(CFG3, 2, M68, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n,c", [(3, 1.0), (4, -1.5), (5, 0.7)])
def test_closed_form_matches_tensor(n, c):
    # the sector tag must match the side of the cut the point lies on;
    # evaluating a branch on the far side is an analytic continuation
    # and differs from the |x-y| closed form by the sign of the odd terms
    cfg = make_config(n, c)
    m = MomentumPair.from_k1(0.6)
    elements = [el for el in build_basis(cfg, m) if el.family == "sym_diag"]
    rng = np.random.default_rng(21)
    for el in elements:
        (i,) = el.indices
        for _ in range(30):
            x, y = rng.uniform(0, 9, size=2)
            sector = ABOVE if x > y else BELOW
            got = el.tensor.value_array(i, i, sector, x, y, m)[0]
            want = diagonal_closed_form(cfg, i, m, x, y)
            assert got == pytest.approx(want, abs=1e-10)


def test_closed_form_specific_point():
    cfg = make_config(3, 1.0)
    m = MomentumPair.from_k1(0.6)
    el = [e for e in build_basis(cfg, m) if e.family == "sym_diag" and e.indices == (1,)][0]
    got = el.tensor.value_array(1, 1, ABOVE, 1.5, 0.5, m)[0]
    want = diagonal_closed_form(cfg, 1, m, 1.5, 0.5)
    assert got == pytest.approx(want, abs=1e-10)


# -- complex momentum diagnostic ----------------------------------------------


def test_complex_profile_requires_attractive_coupling():
    with pytest.raises(ValueError):
        complex_momentum_profile(CFG3, 1, 0.5, [(1.0, 0.0)])


def test_complex_profile_zero_at_origin():
    cfg = make_config(3, -2.0)
    (sample,) = complex_momentum_profile(cfg, 1, 0.5, [(0.0, 0.0)])
    assert sample.decaying_term == pytest.approx(0.0, abs=1e-15)
    assert sample.growing_term == pytest.approx(0.0, abs=1e-15)


def test_complex_profile_first_term_value():
    # c = -2, k' = 0.5, (x, y) = (3, 1): -e^{-2} sin 2 times i*n
    cfg = make_config(3, -2.0)
    (sample,) = complex_momentum_profile(cfg, 1, 0.5, [(3.0, 1.0)])
    scalar = -np.exp(-2.0) * np.sin(2.0)
    assert scalar == pytest.approx(-0.12306, abs=1e-5)
    assert sample.decaying_term == pytest.approx(1j * 3 * scalar, abs=1e-12)


def test_complex_profile_growth_along_sum_coordinate():
    cfg = make_config(3, -2.0)
    u = 0.7
    vs = np.linspace(1.0, 20.0, 24)
    samples = complex_momentum_profile(
        cfg, 1, 0.5, [((v + u) / 2, (v - u) / 2) for v in vs]
    )
    mags = np.array([abs(s.growing_term) for s in samples])
    assert np.all(np.diff(mags) > 0)
    assert mags[-1] / mags[0] > np.exp(10.0)
    firsts = np.array([abs(s.decaying_term) for s in samples])
    assert np.max(firsts) <= 3 * np.exp(-abs(cfg.c) * u / 2) + 1e-12


def test_complex_profile_sums_to_continued_closed_form():
    cfg = make_config(3, -2.0)
    k = 1j * cfg.c / 2
    for x, y in ((2.0, 0.5), (1.1, 4.0)):
        (sample,) = complex_momentum_profile(cfg, 1, 0.5, [(x, y)])
        want = closed_form_at_complex_momentum(cfg, k, 0.5, x, y)
        assert sample.total == pytest.approx(want, abs=1e-12)


def test_complex_momentum_tensor_matches_profile():
    # the same plane-wave machinery evaluates at complex on-shell pairs:
    # with the sum-coordinate momentum at i*c/2 the assembled sym_diag
    # tensor equals the two-term decomposition on its diagonal quadrant
    cfg = make_config(3, -2.0)
    k = 1j * cfg.c / 2
    kp = np.sqrt(1.5)  # keeps k1^2 + k2^2 = 1
    m = MomentumPair(k + kp, k - kp)
    el = [b for b in build_basis(cfg, m) if b.family == "sym_diag" and b.indices == (1,)][0]
    for x, y in ((2.0, 0.5), (1.2, 3.0), (4.0, 4.0), (0.3, 6.0)):
        sector = ABOVE if x >= y else BELOW
        got = el.tensor.value_array(1, 1, sector, x, y, m)[0]
        (sample,) = complex_momentum_profile(cfg, 1, kp, [(x, y)])
        assert got == pytest.approx(sample.total, rel=1e-12, abs=1e-12)


def test_basis_element_serialisation():
    el = build_basis(CFG3, M68)[0]
    d = el.to_dict()
    assert d["family"] == "antisym"
    assert d["coupling"] == 1.0
    assert len(d["amplitudes"]) == len(el.tensor)
    row = d["amplitudes"][0]
    assert set(row) == {"quadrant", "sector", "sig", "tau", "assignment", "re", "im"}
