"""Transform-side linear algebra for the vertex and diagonal conditions.

A plane-wave solution at momentum k pairs each quadrant Q_ij with four
channel coefficients psi^{st}_{ij}, one per sign pair (sig, tau), with
the convention that the wave exp(1j(sig k x + tau kappa y)),
kappa = sqrt(1 - k^2), enters the solution with coefficient
-sig*tau*psi^{st}.  Collecting (psi^{++}, psi^{--}) into xi and
(psi^{+-}, psi^{-+}) into chi, the vertex matching conditions become

    xi_hat   = -chi_hat S       (rows: y = 0 boundaries, "above" data)
    xi_check = -S tau chi_check (columns: x = 0 boundaries, "below" data)

with S = 2P - I the vertex scattering matrix and tau the component
swap.  Hat/check are the transforms describing a solution on the
x > y resp. x < y sector of diagonal quadrants; they agree off the
diagonal.  Eliminating xi leaves the finite-dimensional solvability
system on (chi_hat, chi_check); splitting it over the eigenspaces of
tau reduces to the operators

    Q_pm(A, B) = (A S +- S B, A - B)        on  M_n(C) (+) M_n(C)

composed with the projection PI_perp that kills diagonal matrix
entries.  ker(PI_perp o Q_pm) = ker(Q_pm) (+) K_pm where K_pm is the
least-squares preimage of the diagonal-pair subspace inside ran(Q_pm);
the four blocks have dimensions (n-1)^2 + 1, 2(n-1), n-1 and 2, and
:func:`compute_kernel_decomposition` verifies all of them numerically
together with closed-form basis patterns.

The diagonal continuity/jump conditions additionally couple momenta k
and kappa.  Folding the pair of momenta into C^4 vectors (see
:class:`TransformVectors4` for the weighting) turns them into the pair
of 4x4 systems xi_hat = M xi_check, chi_hat = N chi_check built by
:func:`diagonal_condition_matrices`, with coupling scalars
c_pm = -1j*c/(k +- kappa), for fold momentum k in [0, 1/sqrt(2)).
c_minus has a pole at k = 1/sqrt(2), hence the exclusion zone there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import ABOVE, BELOW, AmplitudeTensor
from .basis import BasisElement

EDGE = "edge"          # physical basis: P is dense, diagonal entries are Q_ii
SPECTRAL = "spectral"  # S-eigenbasis: S = diag(1, -1, ..., -1)

RANK_RTOL = 1e-10
POLE_HALF_WIDTH = 1e-6

_TAU2 = (1, 0)
_TAU4 = (2, 3, 0, 1)  # the permutation (13)(24) on the folded slots

PREDICTED_DIMS = {
    "ker_Q_plus": lambda n: 2 * (n - 1),
    "ker_Q_minus": lambda n: (n - 1) ** 2 + 1,
    "K_plus": lambda n: 2,
    "K_minus": lambda n: n - 1,
}


# ---------------------------------------------------------------------------
# bases and matrix-space operators


def change_of_basis(n: int) -> np.ndarray:
    """Symmetric orthogonal F whose first column is (1,...,1)/sqrt(n).

    Householder reflection exchanging e_1 with the uniform unit vector;
    F maps spectral coordinates to edge coordinates and is an
    involution, so it is its own inverse.
    """
    f1 = np.full(n, 1.0 / math.sqrt(n))
    v = np.zeros(n)
    v[0] = 1.0
    v -= f1
    norm2 = v @ v
    if norm2 < 1e-15:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / norm2


def s_matrix(n: int, basis: str = EDGE) -> np.ndarray:
    if basis == EDGE:
        return 2.0 / n * np.ones((n, n)) - np.eye(n)
    if basis == SPECTRAL:
        d = -np.ones(n)
        d[0] = 1.0
        return np.diag(d)
    raise ValueError(f"unknown basis {basis!r}")


def _vec_conjugation(n: int) -> np.ndarray:
    """Matrix acting on vec(M) (row-major) for M -> F M F."""
    F = change_of_basis(n)
    return np.kron(F, F)


def offdiag_projector(n: int, basis: str = EDGE) -> np.ndarray:
    """n^2 x n^2 projector killing the diagonal entries of an edge-basis matrix."""
    mask = 1.0 - np.eye(n)
    proj = np.diag(mask.reshape(-1))
    if basis == EDGE:
        return proj
    if basis == SPECTRAL:
        T = _vec_conjugation(n)
        return T @ proj @ T
    raise ValueError(f"unknown basis {basis!r}")


def diag_pair_basis(n: int, basis: str = EDGE) -> np.ndarray:
    """Orthonormal basis (columns) of pairs of edge-diagonal matrices."""
    cols = []
    T = _vec_conjugation(n) if basis == SPECTRAL else None
    for comp in (0, 1):
        for i in range(n):
            E = np.zeros((n, n))
            E[i, i] = 1.0
            v = E.reshape(-1)
            if T is not None:
                v = T @ v
            full = np.zeros(2 * n * n)
            full[comp * n * n : (comp + 1) * n * n] = v
            cols.append(full)
    return np.column_stack(cols)


def build_q_operator(n: int, sign: int, basis: str = SPECTRAL) -> np.ndarray:
    """Dense (2n^2) x (2n^2) matrix of (A, B) -> (A S + sign * S B, A - B)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n < 3:
        raise ValueError("need n >= 3")
    S = s_matrix(n, basis)
    eye = np.eye(n)
    eye2 = np.eye(n * n)
    # row-major vec: vec(A S) = (I (x) S^T) vec(A); S is symmetric.
    top = np.hstack([np.kron(eye, S), sign * np.kron(S, eye)])
    bottom = np.hstack([eye2, -eye2])
    return np.vstack([top, bottom])


def build_p_operator(n: int, sign: int, basis: str = SPECTRAL) -> np.ndarray:
    """Q_pm composed with the off-diagonal projection in both output slots."""
    proj = offdiag_projector(n, basis)
    pi = np.block([[proj, np.zeros_like(proj)], [np.zeros_like(proj), proj]])
    return pi @ build_q_operator(n, sign, basis)


# ---------------------------------------------------------------------------
# small dense subspace utilities


def nullspace(A: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal kernel basis via SVD; threshold relative to sigma_max."""
    u, s, vh = np.linalg.svd(A)
    if s.size == 0:
        return np.eye(A.shape[1])
    rank = int(np.sum(s > rtol * s[0]))
    return vh[rank:].conj().T


def orthonormal_range(A: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    u, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    return u[:, :rank]


def orthonormalize(cols: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    u, s, vh = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    return u[:, :rank]


def intersect_subspaces(U: np.ndarray, W: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of span(U) n span(W); inputs have orthonormal columns."""
    if U.shape[1] == 0 or W.shape[1] == 0:
        return np.zeros((U.shape[0], 0))
    combos = nullspace(np.hstack([U, -W]), rtol)
    if combos.shape[1] == 0:
        return np.zeros((U.shape[0], 0))
    vecs = U @ combos[: U.shape[1]]
    return orthonormalize(vecs, rtol)


def projection_defect(U: np.ndarray, vecs: np.ndarray) -> float:
    """max_j ||(I - U U*) v_j|| / ||v_j|| for columns v_j."""
    worst = 0.0
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        resid = v - U @ (U.conj().T @ v)
        worst = max(worst, np.linalg.norm(resid) / nv)
    return worst


# ---------------------------------------------------------------------------
# kernel decomposition


@dataclass
class KernelReport:
    """Computed vs predicted dimensions of the four solution subspaces."""

    n: int
    basis: str
    dims: dict
    predicted: dict
    residuals: dict
    passed: bool
    bases: dict = field(default_factory=dict, repr=False)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def to_dict(self, include_bases: bool = False) -> dict:
        out = {
            "schema": 1,
            "n": self.n,
            "basis": self.basis,
            "dims": dict(sorted(self.dims.items())),
            "predicted": dict(sorted(self.predicted.items())),
            "total": self.total,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "pass": bool(self.passed),
        }
        if include_bases:
            out["bases"] = {
                k: [[float(x.real) for x in col] for col in v.T] for k, v in self.bases.items()
            }
        return out


def compute_kernel_decomposition(
    n: int,
    basis: str = SPECTRAL,
    rtol: float = RANK_RTOL,
    residual_tol: float = 1e-10,
) -> KernelReport:
    """Kernels of Q_pm and the bridging subspaces K_pm, with dimensions.

    K_pm is computed as the minimum-norm preimage under Q_pm of
    ker(PI_perp) n ran(Q_pm); least squares lands the preimage in
    ker_perp(Q_pm) automatically.  Verifies the direct-sum split of
    ker(PI_perp o Q_pm) as a by-product.
    """
    dims: dict[str, int] = {}
    residuals: dict[str, float] = {}
    bases: dict[str, np.ndarray] = {}
    diag_pairs = diag_pair_basis(n, basis)

    for sign, tag in ((1, "plus"), (-1, "minus")):
        Q = build_q_operator(n, sign, basis)
        ker = nullspace(Q, rtol)
        dims[f"ker_Q_{tag}"] = ker.shape[1]
        bases[f"ker_Q_{tag}"] = ker
        residuals[f"ker_Q_{tag}_apply"] = float(
            np.max(np.abs(Q @ ker)) if ker.size else 0.0
        )

        ran = orthonormal_range(Q, rtol)
        target = intersect_subspaces(diag_pairs, ran, rtol)
        if target.shape[1]:
            pre, *_ = np.linalg.lstsq(Q, target, rcond=None)
            K = orthonormalize(pre, rtol)
            residuals[f"K_{tag}_preimage"] = float(np.max(np.abs(Q @ pre - target)))
        else:
            K = np.zeros((Q.shape[1], 0))
            residuals[f"K_{tag}_preimage"] = 0.0
        dims[f"K_{tag}"] = K.shape[1]
        bases[f"K_{tag}"] = K
        residuals[f"K_{tag}_orth"] = float(
            np.max(np.abs(ker.conj().T @ K)) if ker.size and K.size else 0.0
        )

        # ker(P_pm) must be spanned by ker(Q_pm) and K_pm together.
        P = build_p_operator(n, sign, basis)
        ker_p = nullspace(P, rtol)
        joint = orthonormalize(np.hstack([ker, K]), rtol)
        residuals[f"ker_P_{tag}_dim_gap"] = float(abs(ker_p.shape[1] - joint.shape[1]))
        residuals[f"ker_P_{tag}_span"] = projection_defect(joint, ker_p)
        residuals[f"ker_P_{tag}_apply"] = float(
            np.max(np.abs(P @ joint)) if joint.size else 0.0
        )

    predicted = {key: fn(n) for key, fn in PREDICTED_DIMS.items()}
    passed = dims == predicted and all(v <= residual_tol for v in residuals.values())
    return KernelReport(
        n=n, basis=basis, dims=dims, predicted=predicted, residuals=residuals,
        passed=passed, bases=bases,
    )


# -- closed-form kernel patterns --------------------------------------------


def _pair(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.concatenate([A.reshape(-1), B.reshape(-1)])


def _to_basis(vecs: list[np.ndarray], n: int, src: str, dst: str) -> np.ndarray:
    cols = np.column_stack(vecs)
    if src == dst:
        return cols
    T = _vec_conjugation(n)
    full = np.block([[T, np.zeros_like(T)], [np.zeros_like(T), T]])
    # F is an involution, so the same conjugation maps both ways.
    return full @ cols


def q_plus_kernel_patterns(n: int, basis: str = SPECTRAL) -> np.ndarray:
    """Pairs (X, X) with X supported on the first row/column off-block."""
    vecs = []
    for j in range(1, n):
        X = np.zeros((n, n))
        X[0, j] = 1.0
        vecs.append(_pair(X, X))
        X = np.zeros((n, n))
        X[j, 0] = 1.0
        vecs.append(_pair(X, X))
    return _to_basis(vecs, n, SPECTRAL, basis)


def q_minus_kernel_patterns(n: int, basis: str = SPECTRAL) -> np.ndarray:
    """Pairs (X, X) with X block-diagonal in the spectral basis."""
    vecs = []
    X = np.zeros((n, n))
    X[0, 0] = 1.0
    vecs.append(_pair(X, X))
    for i in range(1, n):
        for j in range(1, n):
            X = np.zeros((n, n))
            X[i, j] = 1.0
            vecs.append(_pair(X, X))
    return _to_basis(vecs, n, SPECTRAL, basis)


def k_plus_patterns(n: int, basis: str = SPECTRAL) -> np.ndarray:
    """The two-dimensional preimage of the scalar-pair targets."""
    vecs = []
    for a, ap in ((1.0, 0.0), (0.0, 1.0)):
        A = np.diag(np.concatenate([[a + ap], -np.full(n - 1, a - ap)]))
        B = np.diag(np.concatenate([[a - ap], -np.full(n - 1, a + ap)]))
        vecs.append(_pair(A, B))
    return _to_basis(vecs, n, SPECTRAL, basis)


def k_minus_patterns(n: int, basis: str = SPECTRAL) -> np.ndarray:
    """Preimages of the trace-free diagonal pairs (C, -C).

    For C = diag(c) with sum(c) = 0 the preimage is
    (C + R, -C + R) with the antisymmetric rank-two correction
    R = (u c^t - c u^t) / n, u = (1, ..., 1)^t; Q_minus maps this pair
    to (-2C, 2C).  Expressed in the edge basis, then converted.
    """
    u = np.ones(n)
    vecs = []
    for m in range(n - 1):
        c = np.zeros(n)
        c[m], c[m + 1] = 1.0, -1.0
        C = np.diag(c)
        R = (np.outer(u, c) - np.outer(c, u)) / n
        vecs.append(_pair(C + R, -C + R))
    return _to_basis(vecs, n, EDGE, basis)


def k_minus_targets(n: int, basis: str = EDGE) -> np.ndarray:
    """Trace-free diagonal pairs (C, -C) spanning ker(PI_perp) n ran(Q_minus)."""
    vecs = []
    for m in range(n - 1):
        c = np.zeros(n)
        c[m], c[m + 1] = 1.0, -1.0
        C = np.diag(c)
        vecs.append(_pair(C, -C))
    return _to_basis(vecs, n, EDGE, basis)


# ---------------------------------------------------------------------------
# transform vectors extracted from amplitude tensors


def _check_slots(values: np.ndarray, want: int):
    if values.ndim != 3 or values.shape[2] != want or values.shape[0] != values.shape[1]:
        raise ValueError(f"expected (n, n, {want}) transform array, got {values.shape}")


@dataclass(frozen=True)
class TransformVectors2:
    """Per-quadrant C^2 transform vectors at a single momentum.

    xi stacks (psi^{++}, psi^{--}) and chi stacks (psi^{+-}, psi^{-+}).
    Hat describes the solution on x > y sectors, check on x < y; the two
    agree entrywise off the diagonal.
    """

    n: int
    hat_xi: np.ndarray
    hat_chi: np.ndarray
    check_xi: np.ndarray
    check_chi: np.ndarray

    def __post_init__(self):
        for arr in (self.hat_xi, self.hat_chi, self.check_xi, self.check_chi):
            _check_slots(arr, 2)

    @classmethod
    def from_single(cls, xi: np.ndarray, chi: np.ndarray) -> "TransformVectors2":
        """Sector-independent transforms (hat = check everywhere)."""
        xi = np.asarray(xi, dtype=complex)
        chi = np.asarray(chi, dtype=complex)
        return cls(n=xi.shape[0], hat_xi=xi, hat_chi=chi, check_xi=xi.copy(), check_chi=chi.copy())

    @classmethod
    def from_folded(cls, tv: "TransformVectors4", momentum_slot: int) -> "TransformVectors2":
        """Single-momentum slice of folded vectors (slot 1: at k, 2: at kappa)."""
        if momentum_slot not in (1, 2):
            raise ValueError("momentum_slot must be 1 or 2")
        take = [0, 2] if momentum_slot == 1 else [1, 3]
        return cls(
            n=tv.n,
            hat_xi=tv.hat_xi[..., take],
            hat_chi=tv.hat_chi[..., take],
            check_xi=tv.check_xi[..., take],
            check_chi=tv.check_chi[..., take],
        )


@dataclass(frozen=True)
class TransformVectors4:
    """Folded C^4 transform vectors coupling momenta k and sqrt(1-k^2).

    Slot order for xi: (psi^{++} at k, psi^{++} at kappa,
    psi^{--} at k, psi^{--} at kappa), all weighted by kappa; chi uses
    the (+-, -+) channels in the same pattern.  k must lie in
    [0, 1/sqrt(2)).

    On weights: for square-integrable transform densities the folded
    variables carry kappa on the momentum-k slots and k on the
    momentum-kappa slots, the latter coming from the Jacobian of the
    substitution that folds [1/sqrt(2), 1] onto [0, 1/sqrt(2)].  A
    fixed-momentum solution is a point mass in momentum, and pushing a
    point mass through the same substitution multiplies it by the
    inverse Jacobian kappa/k; the net weight on the swapped slots is
    again kappa.  Only with this common weight do the diagonal-matching
    systems M and N annihilate actual eigensolutions.
    """

    n: int
    k: float
    hat_xi: np.ndarray
    hat_chi: np.ndarray
    check_xi: np.ndarray
    check_chi: np.ndarray

    def __post_init__(self):
        for arr in (self.hat_xi, self.hat_chi, self.check_xi, self.check_chi):
            _check_slots(arr, 4)
        if not 0.0 <= self.k < 1.0 / math.sqrt(2.0):
            raise ValueError(f"fold momentum must lie in [0, 1/sqrt(2)), got {self.k}")

    @classmethod
    def zero(cls, n: int, k: float) -> "TransformVectors4":
        z = np.zeros((n, n, 4), dtype=complex)
        return cls(n=n, k=k, hat_xi=z, hat_chi=z.copy(), check_xi=z.copy(), check_chi=z.copy())


def _psi_matrix(tensor: AmplitudeTensor, n: int, sig: int, tau: int, slot: int, sector: str) -> np.ndarray:
    """psi^{sig tau} for one momentum slot; -sig*tau undoes the wave signs."""
    out = np.zeros((n, n), dtype=complex)
    sign = -sig * tau
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            out[i - 1, j - 1] = sign * tensor.get(i, j, sector, sig, tau, slot)
    return out


def extract_transforms(obj, k: float, n: int | None = None) -> TransformVectors4:
    """Read a tensor's plane-wave amplitudes into folded transform vectors.

    ``obj`` is a BasisElement (momentum known) or a bare AmplitudeTensor
    built at the pair (k, sqrt(1-k^2)).  The tensor's momentum pair must
    match (k, sqrt(1-k^2)) up to a swap of which assignment slot carries
    k.
    """
    kappa = math.sqrt(max(0.0, 1.0 - k * k))
    if not 0.0 <= k < 1.0 / math.sqrt(2.0):
        raise ValueError(f"fold momentum must lie in [0, 1/sqrt(2)), got {k}")
    if isinstance(obj, BasisElement):
        tensor = obj.tensor
        m = obj.momentum
        if abs(m.k1 - k) < 1e-9 and abs(m.k2 - kappa) < 1e-9:
            slot_k = 1
        elif abs(m.k2 - k) < 1e-9 and abs(m.k1 - kappa) < 1e-9:
            slot_k = 2
        else:
            raise ValueError(
                f"momentum mismatch: element built at ({m.k1}, {m.k2}), fold at k={k}"
            )
        if n is None:
            n = max(max(i, j) for (i, j, *_rest) in tensor.support()) if len(tensor) else 3
    elif isinstance(obj, AmplitudeTensor):
        tensor = obj
        slot_k = 1
        if n is None:
            if len(tensor) == 0:
                raise ValueError("cannot infer n from an empty tensor")
            n = max(max(i, j) for (i, j, *_rest) in tensor.support())
    else:
        raise TypeError(f"expected BasisElement or AmplitudeTensor, got {type(obj)!r}")
    slot_other = 3 - slot_k

    def grab(sector):
        xi = np.zeros((n, n, 4), dtype=complex)
        chi = np.zeros((n, n, 4), dtype=complex)
        xi[..., 0] = _psi_matrix(tensor, n, 1, 1, slot_k, sector) * kappa
        xi[..., 1] = _psi_matrix(tensor, n, 1, 1, slot_other, sector) * kappa
        xi[..., 2] = _psi_matrix(tensor, n, -1, -1, slot_k, sector) * kappa
        xi[..., 3] = _psi_matrix(tensor, n, -1, -1, slot_other, sector) * kappa
        chi[..., 0] = _psi_matrix(tensor, n, 1, -1, slot_k, sector) * kappa
        chi[..., 1] = _psi_matrix(tensor, n, 1, -1, slot_other, sector) * kappa
        chi[..., 2] = _psi_matrix(tensor, n, -1, 1, slot_k, sector) * kappa
        chi[..., 3] = _psi_matrix(tensor, n, -1, 1, slot_other, sector) * kappa
        return xi, chi

    hat_xi, hat_chi = grab(ABOVE)
    check_xi, check_chi = grab(BELOW)
    return TransformVectors4(
        n=n, k=k, hat_xi=hat_xi, hat_chi=hat_chi, check_xi=check_xi, check_chi=check_chi
    )


def resynthesize_tensor(tv: TransformVectors4, k: float) -> AmplitudeTensor:
    """Inverse of extract_transforms (both fold slots are weighted by kappa)."""
    kappa = math.sqrt(max(0.0, 1.0 - k * k))
    n = tv.n
    entries: dict = {}
    slot_data = {
        (1, 1): ("xi", 0, 1),
        (-1, -1): ("xi", 2, 3),
        (1, -1): ("chi", 0, 1),
        (-1, 1): ("chi", 2, 3),
    }
    for sector, xi, chi in ((ABOVE, tv.hat_xi, tv.hat_chi), (BELOW, tv.check_xi, tv.check_chi)):
        arrays = {"xi": xi, "chi": chi}
        for (sig, tau), (which, s_k, s_other) in slot_data.items():
            arr = arrays[which]
            sign = -sig * tau
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    psi_k = arr[i - 1, j - 1, s_k] / kappa
                    psi_other = arr[i - 1, j - 1, s_other] / kappa
                    for slot, psi in ((1, psi_k), (2, psi_other)):
                        amp = sign * psi
                        if amp != 0:
                            key = (i, j, sector if i == j else "off", sig, tau, slot)
                            # off-diagonal slots are written twice (hat = check)
                            entries[key] = amp
    return AmplitudeTensor(entries)


# ---------------------------------------------------------------------------
# residual checks on transform vectors


def _tau_perm(values: np.ndarray) -> np.ndarray:
    perm = _TAU2 if values.shape[2] == 2 else _TAU4
    return values[..., perm]


@dataclass(frozen=True)
class KirchhoffResiduals:
    row: float
    column: float
    hat_check_offdiag: float

    @property
    def max(self) -> float:
        return max(self.row, self.column, self.hat_check_offdiag)


def check_kirchhoff_transforms(tv) -> KirchhoffResiduals:
    """Defects of the vertex-matching equations on transform vectors.

    Row equations (xi_hat = -chi_hat S) come from the y = 0 boundaries
    and see the hat transforms; column equations
    (xi_check = -S tau chi_check) come from x = 0 and see the check
    transforms.  Also reports how far hat and check drift apart off the
    diagonal, where they must agree.
    """
    n = tv.n
    S = s_matrix(n, EDGE)
    row_defect = tv.hat_xi + np.einsum("ims,mj->ijs", tv.hat_chi, S)
    col_defect = tv.check_xi + np.einsum("im,mjs->ijs", S, _tau_perm(tv.check_chi))
    off = ~np.eye(n, dtype=bool)
    drift = max(
        float(np.max(np.abs((tv.hat_xi - tv.check_xi)[off]))),
        float(np.max(np.abs((tv.hat_chi - tv.check_chi)[off]))),
    )
    return KirchhoffResiduals(
        row=float(np.max(np.abs(row_defect))),
        column=float(np.max(np.abs(col_defect))),
        hat_check_offdiag=drift,
    )


def coupling_scalars(k: float, c: float) -> tuple[complex, complex]:
    """c_pm = -1j*c/(k +- sqrt(1-k^2)); c_minus blows up at k = 1/sqrt(2)."""
    kappa = math.sqrt(max(0.0, 1.0 - k * k))
    if c != 0.0 and abs(k - kappa) < POLE_HALF_WIDTH * math.sqrt(2.0):
        raise ValueError(
            f"k = {k} is inside the exclusion zone around 1/sqrt(2) for c != 0"
        )
    c_plus = -1j * c / (k + kappa)
    c_minus = 0j if c == 0.0 else -1j * c / (k - kappa)
    return c_plus, c_minus


def diagonal_condition_matrices(k: float, c: float) -> tuple[np.ndarray, np.ndarray]:
    """The 4x4 systems M (xi channels) and N (chi channels) on the diagonal."""
    if not 0.0 <= k < 1.0 / math.sqrt(2.0):
        raise ValueError(f"fold momentum must lie in [0, 1/sqrt(2)), got {k}")
    c_plus, c_minus = coupling_scalars(k, c)
    cm, cp = c_minus, c_plus
    M = np.array(
        [
            [1 + cm, cm, 0, 0],
            [-cm, 1 - cm, 0, 0],
            [0, 0, 1 - cm, -cm],
            [0, 0, cm, 1 + cm],
        ],
        dtype=complex,
    )
    N = np.array(
        [
            [1 + cp, 0, 0, cp],
            [0, 1 + cp, cp, 0],
            [0, -cp, 1 - cp, 0],
            [-cp, 0, 0, 1 - cp],
        ],
        dtype=complex,
    )
    return M, N


@dataclass(frozen=True)
class DiagonalConditionResiduals:
    matrix_form: float      # residual of xi_hat = M xi_check, chi_hat = N chi_check
    raw_equations: float    # residual of the continuity/jump transform identities
    path_discrepancy: float

    @property
    def max(self) -> float:
        return max(self.matrix_form, self.raw_equations)


def check_diagonal_conditions(tv: TransformVectors4, k: float, c: float) -> DiagonalConditionResiduals:
    """Residuals of the diagonal continuity and jump conditions, two ways.

    The matrix path applies M and N per diagonal quadrant.  The raw path
    evaluates the folded continuity identities and the four jump
    identities directly from the slots; both must vanish together for an
    actual eigensolution, and the report carries their difference as a
    consistency diagnostic.
    """
    M, N = diagonal_condition_matrices(k, c)
    c_plus, c_minus = coupling_scalars(k, c)
    worst_matrix = 0.0
    worst_raw = 0.0
    for i in range(tv.n):
        hx, cx = tv.hat_xi[i, i], tv.check_xi[i, i]
        hc, cc = tv.hat_chi[i, i], tv.check_chi[i, i]
        worst_matrix = max(
            worst_matrix,
            float(np.max(np.abs(hx - M @ cx))),
            float(np.max(np.abs(hc - N @ cc))),
        )
        raw = [
            # continuity per channel: folded boundary values agree
            (hx[0] + hx[1]) - (cx[0] + cx[1]),
            (hx[2] + hx[3]) - (cx[2] + cx[3]),
            (hc[0] + hc[3]) - (cc[0] + cc[3]),
            (hc[1] + hc[2]) - (cc[1] + cc[2]),
            # jump per channel
            -(hx[0] - cx[0]) + (hx[1] - cx[1]) + 2 * c_minus * (hx[0] + hx[1]),
            (hx[2] - cx[2]) - (hx[3] - cx[3]) + 2 * c_minus * (hx[2] + hx[3]),
            -(hc[2] - cc[2]) + (hc[1] - cc[1]) - 2 * c_plus * (hc[2] + hc[1]),
            (hc[0] - cc[0]) - (hc[3] - cc[3]) - 2 * c_plus * (hc[0] + hc[3]),
        ]
        worst_raw = max(worst_raw, float(np.max(np.abs(raw))))
    return DiagonalConditionResiduals(
        matrix_form=worst_matrix,
        raw_equations=worst_raw,
        path_discrepancy=abs(worst_matrix - worst_raw),
    )


# ---------------------------------------------------------------------------
# basic solutions from kernel elements


def kernel_pair_matrices(vec: np.ndarray, n: int, basis: str = SPECTRAL) -> tuple[np.ndarray, np.ndarray]:
    """Split a stacked kernel vector into its two n x n matrices, edge basis."""
    A = vec[: n * n].reshape(n, n)
    B = vec[n * n :].reshape(n, n)
    if basis == SPECTRAL:
        F = change_of_basis(n)
        A = F @ A @ F
        B = F @ B @ F
    return A, B


def basic_solution_tensor(
    n: int,
    chi_hat: np.ndarray,
    chi_check: np.ndarray,
    tau_sign: int,
    consistency_tol: float = 1e-9,
) -> AmplitudeTensor:
    """Plane-wave tensor of a vertex-compatible (basic) solution.

    ``(chi_hat, chi_check)`` is an element of ker(PI_perp o Q_pm) in the
    edge basis (sign matching ``tau_sign``: the tau = -1 eigenspace pairs
    with Q_plus, tau = +1 with Q_minus).  The xi channels are filled in
    from the row/column vertex equations, so the result satisfies both
    by construction; it need not satisfy the diagonal conditions, which
    is the point of basic solutions.  The tensor is momentum-agnostic:
    evaluate it at any pair (k, sqrt(1-k^2)) with assignment slot 1.
    """
    if tau_sign not in (1, -1):
        raise ValueError("tau_sign must be +1 or -1")
    S = s_matrix(n, EDGE)
    xi_hat = -chi_hat @ S
    xi_check = -tau_sign * (S @ chi_check)
    off = ~np.eye(n, dtype=bool)
    drift = max(
        float(np.max(np.abs((chi_hat - chi_check)[off]))),
        float(np.max(np.abs((xi_hat - xi_check)[off]))),
    )
    if drift > consistency_tol:
        raise ValueError(
            f"pair is not vertex-compatible: off-diagonal hat/check drift {drift:.3e}"
        )
    channel = {
        (1, 1): (xi_hat, xi_check, 1.0),
        (-1, -1): (xi_hat, xi_check, float(tau_sign)),
        (1, -1): (chi_hat, chi_check, 1.0),
        (-1, 1): (chi_hat, chi_check, float(tau_sign)),
    }
    entries: dict = {}
    for (sig, tau), (hat, check, factor) in channel.items():
        sign = -sig * tau
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    sectors = ((ABOVE, hat[i - 1, j - 1]), (BELOW, check[i - 1, j - 1]))
                else:
                    sectors = (("off", hat[i - 1, j - 1]),)
                for sector, psi in sectors:
                    amp = sign * factor * psi
                    if amp != 0:
                        entries[(i, j, sector, sig, tau, 1)] = amp
    return AmplitudeTensor(entries)
