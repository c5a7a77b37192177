"""Two-particle product states and the full eigenbasis.

Products of two one-particle factors are expanded into sector-tagged
plane waves.  Three families span the solution space at a generic
momentum pair (k1, k2) on the unit energy shell:

* ``antisym``:   psi^i(x) psi^j(y) antisymmetrised over particle
  exchange, n^2 elements,
* ``sym_offdiag``: phi^i(x) phi^j(y) symmetrised, for index pairs at
  circular distance >= 2 so the product vanishes identically on every
  diagonal quadrant, n^2 - 3n elements,
* ``sym_diag``:  the antisymmetrised phi^i/xi product plus cosine
  correction terms with coefficients n*k_s/c tuned so that the
  derivative jump across the diagonal equals c times the boundary
  value, n elements.

Total: 2n^2 - 2n.  Each element satisfies the vertex matching in both
variables (inherited factor-wise) and the diagonal continuity and jump
conditions; the verifier module makes all of that executable.

On its own diagonal quadrant Q_ii a ``sym_diag`` element collapses to a
closed form in the rotated momenta k = (k1+k2)/2, k' = (k1-k2)/2 (see
:func:`diagonal_closed_form`), which also continues to complex k; at
k = i*c/2 it splits into a term decaying in |x - y| and a term growing
in x + y (:func:`complex_momentum_profile`).
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .domain import ABOVE, BELOW, AmplitudeTensor, MomentumPair, StarConfig
from .oneparticle import (
    LARGER,
    NEUTRAL,
    SMALLER,
    OneParticleSolution,
    phi,
    scattering_wave,
    xi_solution,
)

FAMILIES = ("antisym", "sym_offdiag", "sym_diag")


def circular_distance(i: int, j: int, n: int) -> int:
    """Distance of edge indices as elements of Z/nZ."""
    d = abs(i - j) % n
    return min(d, n - d)


def product_tensor(
    n: int,
    fx: OneParticleSolution,
    gy: OneParticleSolution,
    assignment: tuple[int, int],
) -> AmplitudeTensor:
    """Expand fx(x, k_s) * gy(y, k_t) into sector-tagged plane waves.

    On a diagonal quadrant the branch of each factor follows its own
    variable: in the "above" sector x is the larger coordinate, so fx
    takes its larger-branch scale and gy its smaller-branch scale.
    """
    s = assignment[0]
    if assignment not in ((1, 2), (2, 1)):
        raise ValueError(f"assignment must be (1,2) or (2,1), got {assignment}")
    entries: dict = {}

    def put(i, j, sector, sig, tau, amp):
        if amp == 0:
            return
        key = (i, j, sector, sig, tau, s)
        entries[key] = entries.get(key, 0j) + amp

    for a in range(1, n + 1):
        fa = fx.coeff[a - 1]
        if fa[0] == 0 and fa[1] == 0:
            continue
        for b in range(1, n + 1):
            gb = gy.coeff[b - 1]
            if gb[0] == 0 and gb[1] == 0:
                continue
            if a == b:
                sector_scales = (
                    (ABOVE, fx.branch_scale(LARGER) * gy.branch_scale(SMALLER)),
                    (BELOW, fx.branch_scale(SMALLER) * gy.branch_scale(LARGER)),
                )
            else:
                sector_scales = ((None, fx.branch_scale(NEUTRAL) * gy.branch_scale(NEUTRAL)),)
            for sector, scale in sector_scales:
                for sig, fc in ((-1, fa[0]), (1, fa[1])):
                    if fc == 0:
                        continue
                    for tau, gc in ((-1, gb[0]), (1, gb[1])):
                        if gc == 0:
                            continue
                        put(a, b, sector if sector else "off", sig, tau, scale * fc * gc)
    return AmplitudeTensor(entries)


@dataclass(frozen=True)
class TwoParticleState:
    """A single product (or antisymmetrised product) state."""

    kind: tuple
    assignment: tuple[int, int]
    tensor: AmplitudeTensor
    momentum: MomentumPair


def product_state(
    cfg: StarConfig,
    kind: tuple,
    assignment: tuple[int, int],
    m: MomentumPair,
) -> TwoParticleState:
    """Build one product state.

    ``kind`` is one of ``("phi_phi", i, j)`` with i, j in 0..n,
    ``("psi_psi", i, j)`` with i, j in 1..n, or
    ``("phi_xi_antisym", i)`` with i in 1..n, the latter meaning
    phi^i(x) xi(y) - xi(x) phi^i(y).
    """
    n = cfg.n
    name = kind[0]
    if name == "phi_phi":
        _, i, j = kind
        if not (0 <= i <= n and 0 <= j <= n):
            raise ValueError(f"phi indices out of range: {kind}")
        tensor = product_tensor(n, phi(cfg, i), phi(cfg, j), assignment)
    elif name == "psi_psi":
        _, i, j = kind
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"psi indices out of range: {kind}")
        tensor = product_tensor(n, scattering_wave(cfg, i), scattering_wave(cfg, j), assignment)
    elif name == "phi_xi_antisym":
        _, i = kind
        if not 1 <= i <= n:
            raise ValueError(f"index out of range: {kind}")
        xi = xi_solution(cfg)
        ph = phi(cfg, i)
        tensor = product_tensor(n, ph, xi, assignment) - product_tensor(n, xi, ph, assignment)
    else:
        raise ValueError(f"unknown product kind {name!r}")
    return TwoParticleState(kind=kind, assignment=assignment, tensor=tensor, momentum=m)


@dataclass(frozen=True)
class BasisElement:
    family: str
    indices: tuple
    tensor: AmplitudeTensor
    momentum: MomentumPair
    coupling: float

    @property
    def label(self) -> str:
        idx = ",".join(str(i) for i in self.indices)
        return f"{self.family}({idx})"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "indices": list(self.indices),
            "momentum": {
                "k1": [self.momentum.k1.real, self.momentum.k1.imag],
                "k2": [self.momentum.k2.real, self.momentum.k2.imag],
            },
            "coupling": self.coupling,
            "amplitudes": self.tensor.to_rows(),
        }


def cycle_completing_tensor(cfg: StarConfig, m: MomentumPair) -> AmplitudeTensor:
    """The symmetric eigensolution with cyclic antisymmetric coefficients.

    sum_i (Phi^{i,i+1}_{12} + Phi^{i+1,i}_{21} - Phi^{i+1,i}_{12}
    - Phi^{i,i+1}_{21}) with indices wrapping mod n.  The antisymmetric
    coefficient pattern makes the product contributions cancel on every
    diagonal quadrant (zero diagonal after conjugating by the edge
    difference stencil), so it satisfies all boundary conditions for
    any coupling.  It is independent of both the distance->=2 products
    and the diagonal family, and it is exactly the direction lost to the
    telescoping identity sum_j phi^j = 0; folding it into the diagonal
    family restores the full 2n^2 - 2n span.
    """
    n = cfg.n
    terms = []
    for i in range(1, n + 1):
        s = 1 if i == n else i + 1
        terms += [
            (1.0, product_state(cfg, ("phi_phi", i, s), (1, 2), m).tensor),
            (1.0, product_state(cfg, ("phi_phi", s, i), (2, 1), m).tensor),
            (-1.0, product_state(cfg, ("phi_phi", s, i), (1, 2), m).tensor),
            (-1.0, product_state(cfg, ("phi_phi", i, s), (2, 1), m).tensor),
        ]
    return AmplitudeTensor.combine(terms)


def build_basis(cfg: StarConfig, m: MomentumPair) -> list[BasisElement]:
    """All 2n^2 - 2n basis elements at the given momentum pair.

    Family cardinalities are n^2, n^2 - 3n and n.  Requires c != 0
    because the diagonal family carries 1/c coefficients; the c -> 0
    limit changes the solution-space structure and is not taken here.

    The diagonal family is the phi/xi product combination plus 1/n of
    the cycle-completing solution.  Without that term the n elements sum
    to zero identically (the phi^i telescope around the cycle) and the
    family would span only n - 1 dimensions; the added solution vanishes
    on every diagonal quadrant, so the elements' diagonal behaviour,
    including the closed form on Q_ii, is untouched.
    """
    n, c = cfg.n, cfg.c
    if c == 0:
        raise ValueError("sym_diag family undefined at c = 0 (1/c coefficients)")
    if abs(m.k1 - m.k2) < 1e-12:
        warnings.warn(
            "degenerate momentum pair k1 = k2: basis may lose rank",
            stacklevel=2,
        )
    k1, k2 = m.k1, m.k2

    def psi_psi(i, j, assignment):
        return product_state(cfg, ("psi_psi", i, j), assignment, m).tensor

    def phi_phi(i, j, assignment):
        return product_state(cfg, ("phi_phi", i, j), assignment, m).tensor

    out: list[BasisElement] = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            tensor = psi_psi(i, j, (1, 2)) - psi_psi(j, i, (2, 1))
            out.append(BasisElement("antisym", (i, j), tensor, m, c))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if circular_distance(i, j, n) >= 2:
                tensor = phi_phi(i, j, (1, 2)) + phi_phi(j, i, (2, 1))
                out.append(BasisElement("sym_offdiag", (i, j), tensor, m, c))
    completer = cycle_completing_tensor(cfg, m)
    for i in range(1, n + 1):
        anti_12 = product_state(cfg, ("phi_xi_antisym", i), (1, 2), m).tensor
        anti_21 = product_state(cfg, ("phi_xi_antisym", i), (2, 1), m).tensor
        # Coupling coefficients -n*k1/c and +n*k2/c: this is the unique
        # sign choice for which the derivative jump across the diagonal
        # equals c times the boundary value (and for which the element
        # matches diagonal_closed_form on Q_ii).
        tensor = AmplitudeTensor.combine(
            [
                (1.0, anti_12),
                (-1.0, anti_21),
                (-n * k1 / c, phi_phi(0, i, (1, 2))),
                (-n * k1 / c, phi_phi(i, 0, (2, 1))),
                (n * k2 / c, phi_phi(0, i, (2, 1))),
                (n * k2 / c, phi_phi(i, 0, (1, 2))),
                (1.0 / n, completer),
            ]
        )
        out.append(BasisElement("sym_diag", (i,), tensor, m, c))

    expected = cfg.basis_size
    assert len(out) == expected, (len(out), expected)
    return out


def family_counts(elements: list[BasisElement]) -> dict[str, int]:
    counts = {name: 0 for name in FAMILIES}
    for el in elements:
        counts[el.family] += 1
    return counts


def _closed_form_terms(n: int, c: float, k: complex, kp: complex, x, y):
    """The four closed-form terms on a diagonal quadrant, as arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.abs(x - y)
    v = x + y
    t1 = np.sin(kp * u) * np.sin(k * v)
    t2 = -np.sin(k * u) * np.sin(kp * v)
    t3 = -(2.0 * k / c) * np.cos(k * u) * np.sin(kp * v)
    t4 = (2.0 * kp / c) * np.cos(kp * u) * np.sin(k * v)
    return n * t1, n * t2, n * t3, n * t4


def diagonal_closed_form(cfg: StarConfig, i: int, m: MomentumPair, x, y):
    """Value of the sym_diag(i) element on its own diagonal quadrant Q_ii.

    In rotated momenta k = (k1+k2)/2 along x+y and k' = (k1-k2)/2 along
    x-y the element reads

        n * ( sin k'|x-y| sin k(x+y) - sin k|x-y| sin k'(x+y)
              - (2k/c) cos k|x-y| sin k'(x+y)
              + (2k'/c) cos k'|x-y| sin k(x+y) ).

    Same value in both sectors of Q_ii (the form is even in x - y).
    """
    if cfg.c == 0:
        raise ValueError("closed form undefined at c = 0")
    if not 1 <= i <= cfg.n:
        raise ValueError(f"edge index {i} out of range")
    k = (m.k1 + m.k2) / 2.0
    kp = (m.k1 - m.k2) / 2.0
    terms = _closed_form_terms(cfg.n, cfg.c, k, kp, x, y)
    total = terms[0] + terms[1] + terms[2] + terms[3]
    return complex(total) if np.ndim(total) == 0 else total


@dataclass(frozen=True)
class ComplexMomentumSample:
    """One sample of the k = i*c/2 decomposition on a diagonal quadrant."""

    x: float
    y: float
    decaying_term: complex
    growing_term: complex

    @property
    def total(self) -> complex:
        return self.decaying_term + self.growing_term


def complex_momentum_profile(
    cfg: StarConfig,
    i: int,
    kprime: float,
    samples: list[tuple[float, float]],
) -> list[ComplexMomentumSample]:
    """Evaluate the two terms of the diagonal closed form at k = i*c/2.

    Continuing k into the upper half plane makes the first term decay
    like exp(c|x-y|/2) along x - y while the bracketed second term
    rides on sinh(c(x+y)/2) and grows exponentially in x + y.  Only
    meaningful for attractive coupling, so c >= 0 is rejected.
    """
    c, n = cfg.c, cfg.n
    if c >= 0:
        raise ValueError("complex-momentum profile requires attractive coupling c < 0")
    if not 1 <= i <= n:
        raise ValueError(f"edge index {i} out of range")
    out = []
    for x, y in samples:
        u = abs(x - y)
        v = x + y
        first = 1j * n * (-cmath.exp(0.5 * c * u) * cmath.sin(kprime * v))
        bracket = (2.0 * kprime / c) * cmath.cos(kprime * u) + cmath.sin(kprime * u)
        second = 1j * n * bracket * cmath.sinh(0.5 * c * v)
        out.append(ComplexMomentumSample(x=x, y=y, decaying_term=first, growing_term=second))
    return out


def closed_form_at_complex_momentum(cfg: StarConfig, k: complex, kprime: complex, x: float, y: float) -> complex:
    """Analytic continuation of the diagonal closed form to complex k.

    Used to cross-check that the two-term decomposition of
    :func:`complex_momentum_profile` sums to the continued closed form.
    """
    if cfg.c == 0:
        raise ValueError("closed form undefined at c = 0")
    u = abs(x - y)
    v = x + y
    c, n = cfg.c, cfg.n
    total = (
        cmath.sin(kprime * u) * cmath.sin(k * v)
        - cmath.sin(k * u) * cmath.sin(kprime * v)
        - (2.0 * k / c) * cmath.cos(k * u) * cmath.sin(kprime * v)
        + (2.0 * kprime / c) * cmath.cos(kprime * u) * cmath.sin(k * v)
    )
    return n * total
