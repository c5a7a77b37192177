"""One-particle solutions on the star graph.

Every solution here solves -f'' = k^2 f on each edge and satisfies the
standard vertex matching (common value at the vertex, outgoing
derivatives summing to zero).  They are stored as per-edge coefficient
pairs (a_l, b_l) for exp(-1j*k*x) and exp(+1j*k*x):

* scattering waves: unit incoming wave on edge i, scattered by the
  vertex matrix S = 2P - I with P the rank-one projection onto
  (1, ..., 1)^t; this is the unique vertex-compatible solution with
  unit incoming amplitude,
* phi_zero = (1/2) * sum_j psi^j, which collapses to cos(k x) on every
  edge,
* phi_j = (1/(2i)) * (psi^j - psi^{j+1}) (indices wrap mod n), equal to
  -sin on edge j and +sin on edge j+1,
* xi, a sine wave whose amplitude jumps across the diagonal of the
  two-particle configuration space.

xi is one-particle data with a two-particle branch rule: evaluated in a
diagonal quadrant it is sin(k x) when its own variable is the larger of
the pair and (1 - n) sin(k x) when it is the smaller; off the diagonal
quadrants it is plain sin(k x).  (The mirrored rule for the second
particle is what makes the vertex derivative sums cancel: at x = 0 the
diagonal quadrant is always in the "smaller" branch, contributing
(1 - n) k against k from each of the n - 1 off-diagonal quadrants.)
This is applied at evaluation time through a branch tag, so products of
these factors can be expanded into sector-tagged plane waves uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import StarConfig

# Branch of a solution relative to the diagonal cut: is its own variable
# the larger or the smaller coordinate of the pair?  Off-diagonal
# quadrants are untagged.
LARGER = "larger"
SMALLER = "smaller"
NEUTRAL = "off"

_SIN = (0.5j, -0.5j)   # sin(kx) = (i/2) e^{-ikx} - (i/2) e^{ikx}
_COS = (0.5, 0.5)


@dataclass(frozen=True)
class VertexMatrices:
    """Rank-one vertex projection P and the unitary involution S = 2P - I."""

    P: np.ndarray
    S: np.ndarray


def build_vertex_matrices(cfg: StarConfig) -> VertexMatrices:
    n = cfg.n
    P = np.full((n, n), 1.0 / n)
    S = 2.0 * P - np.eye(n)
    return VertexMatrices(P=P, S=S)


@dataclass(frozen=True)
class OneParticleSolution:
    """Per-edge plane-wave coefficients with an optional branch scale.

    ``coeff[l] = (a_l, b_l)`` are the amplitudes of exp(-1j k x) and
    exp(+1j k x) on edge l+1.  ``scale_larger`` / ``scale_smaller``
    multiply the whole solution depending on the branch tag; both are 1
    except for xi.
    """

    kind: str
    coeff: np.ndarray
    scale_larger: float = 1.0
    scale_smaller: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeff", np.asarray(self.coeff, dtype=complex))
        self.coeff.setflags(write=False)

    @property
    def n(self) -> int:
        return self.coeff.shape[0]

    def branch_scale(self, branch: str) -> float:
        if branch == LARGER:
            return self.scale_larger
        if branch == SMALLER:
            return self.scale_smaller
        if branch == NEUTRAL:
            return 1.0
        raise ValueError(f"unknown branch {branch!r}")

    def value(self, edge: int, x, k: complex, branch: str = NEUTRAL):
        a, b = self.coeff[edge - 1]
        s = self.branch_scale(branch)
        x = np.asarray(x, dtype=float)
        return s * (a * np.exp(-1j * k * x) + b * np.exp(1j * k * x))

    def derivative(self, edge: int, x, k: complex, branch: str = NEUTRAL, order: int = 1):
        a, b = self.coeff[edge - 1]
        s = self.branch_scale(branch)
        x = np.asarray(x, dtype=float)
        return s * (
            a * (-1j * k) ** order * np.exp(-1j * k * x)
            + b * (1j * k) ** order * np.exp(1j * k * x)
        )


def scattering_wave(cfg: StarConfig, i: int) -> OneParticleSolution:
    """Unit incoming wave on edge i plus outgoing S_{il} e^{ikx} on edge l."""
    n = cfg.n
    if not 1 <= i <= n:
        raise ValueError(f"edge index {i} out of range 1..{n}")
    S = build_vertex_matrices(cfg).S
    coeff = np.zeros((n, 2), dtype=complex)
    coeff[i - 1, 0] = 1.0
    coeff[:, 1] = S[:, i - 1]
    return OneParticleSolution(kind=f"scattering({i})", coeff=coeff)


def phi_zero(cfg: StarConfig) -> OneParticleSolution:
    """Half the sum of all scattering waves; equals cos(kx) on every edge."""
    coeff = np.tile(np.array(_COS, dtype=complex), (cfg.n, 1))
    return OneParticleSolution(kind="phi(0)", coeff=coeff)


def phi_j(cfg: StarConfig, j: int) -> OneParticleSolution:
    """(1/2i)(psi^j - psi^{j+1}): -sin on edge j, +sin on edge j+1 (wrapping)."""
    n = cfg.n
    if not 1 <= j <= n:
        raise ValueError(f"edge index {j} out of range 1..{n}")
    succ = 1 if j == n else j + 1
    coeff = np.zeros((n, 2), dtype=complex)
    coeff[j - 1] = (-_SIN[0], -_SIN[1])
    coeff[succ - 1] = _SIN
    return OneParticleSolution(kind=f"phi({j})", coeff=coeff)


def xi_solution(cfg: StarConfig) -> OneParticleSolution:
    """Sine wave with amplitude (1 - n) on the branch whose variable is smaller."""
    coeff = np.tile(np.array(_SIN, dtype=complex), (cfg.n, 1))
    return OneParticleSolution(
        kind="xi",
        coeff=coeff,
        scale_larger=1.0,
        scale_smaller=float(1 - cfg.n),
    )


def phi(cfg: StarConfig, i: int) -> OneParticleSolution:
    """phi^i for i in 0..n (0 is the cosine solution)."""
    if i == 0:
        return phi_zero(cfg)
    return phi_j(cfg, i)
