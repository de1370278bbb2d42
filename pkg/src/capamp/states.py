"""Private states: constructors, key-measurement statistics, security
predicates, and the PPT approximation family.

A private state lives on key (x) shield with factor order
(key_A, key_B, shield factors...); the canonical pbit family built from the
symmetric/antisymmetric shield projectors uses factors (2, 2, d, d).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import DimensionCap, InvalidSpec, NotAState

DEFAULT_DIMENSION_CAP = 4096

UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, PSD, unit-trace matrix with tensor-factor dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = matcore.as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        matcore._check_square(m, dims)
        matcore.state_spectrum(m)  # raises NotHermitian / NotAState
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def reduced(self, traced) -> "DensityOperator":
        """Partial trace over the listed factor indices."""
        traced = sorted({int(i) for i in traced})
        keep = tuple(d for i, d in enumerate(self.dims) if i not in traced)
        mat = matcore.partial_trace(self.matrix, self.dims, traced)
        return DensityOperator(mat, keep if keep else (1,))

    def permuted(self, perm) -> "DensityOperator":
        mat = matcore.permute_subsystems(self.matrix, self.dims, perm)
        return DensityOperator(mat, tuple(self.dims[p] for p in perm))


def density(matrix, dims) -> DensityOperator:
    return DensityOperator(np.asarray(matrix, dtype=np.complex128), tuple(dims))


def basis_ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128)
    return np.outer(v, v.conj())


def max_entangled(d: int) -> np.ndarray:
    """Maximally entangled unit vector (1/sqrt d) sum_i |ii> on C^d (x) C^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    v = np.zeros(d * d, dtype=np.complex128)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def bell_phi(sign: int) -> np.ndarray:
    """(|00> + sign |11>)/sqrt 2 on two qubits."""
    v = np.zeros(4, dtype=np.complex128)
    v[0] = 1.0 / np.sqrt(2.0)
    v[3] = sign / np.sqrt(2.0)
    return v


def swap_operator(d: int) -> np.ndarray:
    """Swap F on C^d (x) C^d, F|ij> = |ji>."""
    return (
        np.eye(d * d, dtype=np.complex128)
        .reshape(d, d, d, d)
        .transpose(0, 1, 3, 2)
        .reshape(d * d, d * d)
    )


def sym_asym_projectors(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projectors onto the symmetric/antisymmetric subspaces of C^d (x) C^d.

    Returns (P_sym, P_asym, F) with P_sym = (I + F)/2, P_asym = (I - F)/2,
    of ranks d(d+1)/2 and d(d-1)/2.
    """
    if d < 2:
        raise ValueError("need dimension >= 2")
    f = swap_operator(d)
    eye = np.eye(d * d, dtype=np.complex128)
    return (eye + f) / 2.0, (eye - f) / 2.0, f


def sym_asym_dims(d: int) -> tuple[int, int]:
    return d * (d + 1) // 2, d * (d - 1) // 2


def sym_asym_pbit(q: float, d: int) -> DensityOperator:
    """The canonical pbit with symmetric/antisymmetric shield.

    q * phi+ (x) P_sym/d_sym + (1-q) * phi- (x) P_asym/d_asym on factors
    (2, 2, d, d) = (key_A, key_B, shield_A, shield_B). Its key overlap is
    2q - 1.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    p_sym, p_asym, _ = sym_asym_projectors(d)
    d_sym, d_asym = sym_asym_dims(d)
    mat = q * np.kron(projector(bell_phi(+1)), p_sym / d_sym) + (1.0 - q) * np.kron(
        projector(bell_phi(-1)), p_asym / d_asym
    )
    return DensityOperator(mat, (2, 2, d, d))


@dataclass(frozen=True)
class PbitSpec:
    """Twisted-key construction data: shield state and twisting unitaries.

    The induced state is (1/d0) sum_kl |k><l| (x) |k><l| (x) U_k sigma U_l^dag.
    """

    key_dim: int
    shield_state: DensityOperator
    twisting_unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.key_dim < 1:
            raise InvalidSpec("key dimension must be positive")
        us = tuple(matcore.as_matrix(u) for u in self.twisting_unitaries)
        if len(us) != self.key_dim:
            raise InvalidSpec("need one twisting unitary per key value")
        ds = self.shield_state.dim
        for u in us:
            if u.shape != (ds, ds):
                raise InvalidSpec("twisting unitary has wrong dimension")
            if np.max(np.abs(u.conj().T @ u - np.eye(ds))) > UNITARITY_TOL:
                raise InvalidSpec("twisting operator is not unitary")
        object.__setattr__(self, "twisting_unitaries", us)


def pbit_from_spec(spec: PbitSpec) -> DensityOperator:
    """Assemble the perfect private state described by ``spec``."""
    d0 = spec.key_dim
    sigma = spec.shield_state.matrix
    us = spec.twisting_unitaries
    ds = spec.shield_state.dim
    dim = d0 * d0 * ds
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(d0):
        for l in range(d0):
            key = np.zeros((d0 * d0, d0 * d0), dtype=np.complex128)
            key[k * d0 + k, l * d0 + l] = 1.0 / d0
            mat += np.kron(key, us[k] @ sigma @ us[l].conj().T)
    return DensityOperator(mat, (d0, d0) + spec.shield_state.dims)


def sym_asym_pbit_spec(q: float, d: int) -> PbitSpec:
    """Twisted-key data reproducing ``sym_asym_pbit(q, d)``.

    The shield state is block-diagonal in the swap eigenbasis with weight q
    spread over the symmetric block, and the second twisting unitary flips
    the sign of the antisymmetric block; tr(U_0 sigma U_1^dag) = 2q - 1.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    d_sym, d_asym = sym_asym_dims(d)
    # Orthonormal swap eigenbasis: symmetric columns first.
    cols = []
    for i in range(d):
        cols.append(np.kron(basis_ket(i, d), basis_ket(i, d)))
    for i in range(d):
        for j in range(i + 1, d):
            cols.append(
                (
                    np.kron(basis_ket(i, d), basis_ket(j, d))
                    + np.kron(basis_ket(j, d), basis_ket(i, d))
                )
                / np.sqrt(2.0)
            )
    for i in range(d):
        for j in range(i + 1, d):
            cols.append(
                (
                    np.kron(basis_ket(i, d), basis_ket(j, d))
                    - np.kron(basis_ket(j, d), basis_ket(i, d))
                )
                / np.sqrt(2.0)
            )
    u = np.stack(cols, axis=1)
    weights = np.concatenate(
        [
            np.full(d_sym, q / d_sym if d_sym else 0.0),
            np.full(d_asym, (1.0 - q) / d_asym if d_asym else 0.0),
        ]
    )
    # The shield state is diagonal; the twisting unitaries carry the basis
    # rotation, so U_0 sigma U_0^dag spreads the weights over the subspaces.
    sigma = np.diag(weights.astype(np.complex128))
    sign = np.diag(
        np.concatenate([np.ones(d_sym), -np.ones(d_asym)]).astype(np.complex128)
    )
    return PbitSpec(
        key_dim=2,
        shield_state=DensityOperator(sigma, (d, d)),
        twisting_unitaries=(u, u @ sign),
    )


def key_overlap(spec: PbitSpec) -> complex:
    """tr(U_0 sigma U_1^dag); its modulus controls the key-only rate."""
    u0, u1 = spec.twisting_unitaries[0], spec.twisting_unitaries[1]
    return complex(np.trace(u0 @ spec.shield_state.matrix @ u1.conj().T))


@dataclass(frozen=True)
class CcqState:
    """Key-measurement statistics with the eavesdropper's residual states.

    probs[i, j] is the probability of key outcome (i, j); eve_states[i][j]
    is the corresponding normalized environment state (maximally mixed for
    zero-probability outcomes, which carry no physical content).
    """

    probs: np.ndarray
    eve_states: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise NotAState("key outcome probabilities must be a distribution")
        object.__setattr__(self, "probs", p)


def key_ccq(gamma: DensityOperator, d0: int) -> CcqState:
    """Measure the key of a purified private state and trace the shield.

    ``gamma`` must have factors (d0, d0, shield...). The state is purified
    internally; outcome (i, j) of the computational-basis key measurement
    leaves Eve the normalized residual state after the shield is discarded.
    """
    if len(gamma.dims) < 2 or gamma.dims[0] != d0 or gamma.dims[1] != d0:
        raise NotAState(f"expected key factors ({d0}, {d0}) first, got {gamma.dims}")
    shield_dim = int(np.prod(gamma.dims[2:])) if len(gamma.dims) > 2 else 1
    psi = matcore.purify(gamma)
    env_dim = psi.size // gamma.dim
    tensor = psi.reshape(d0, d0, shield_dim, env_dim)
    probs = np.zeros((d0, d0))
    eve: list[list[np.ndarray]] = []
    for i in range(d0):
        row = []
        for j in range(d0):
            w = tensor[i, j]  # (shield, env)
            p = float(np.sum(np.abs(w) ** 2))
            probs[i, j] = p
            if p > 1e-15:
                rho_e = (w.T @ w.conj()) / p
            else:
                rho_e = np.eye(env_dim, dtype=np.complex128) / env_dim
            row.append(rho_e)
        eve.append(row)
    return CcqState(probs=probs, eve_states=tuple(tuple(r) for r in eve))


def is_secure(ccq: CcqState, tol: float = 1e-8) -> bool:
    """True iff all Eve states attached to outcomes above ``tol`` coincide."""
    live = [
        ccq.eve_states[i][j]
        for i in range(ccq.probs.shape[0])
        for j in range(ccq.probs.shape[1])
        if ccq.probs[i, j] > tol
    ]
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            if matcore.trace_norm(live[a] - live[b]) > tol:
                return False
    return True


def is_perfect_pdit(ccq: CcqState, tol: float = 1e-8) -> bool:
    """Secure, uniformly correlated key: p_ii = 1/d0, off-diagonals vanish."""
    d0 = ccq.probs.shape[0]
    if not is_secure(ccq, tol):
        return False
    for i in range(d0):
        for j in range(d0):
            if i == j:
                if abs(ccq.probs[i, j] - 1.0 / d0) > tol:
                    return False
            elif ccq.probs[i, j] > tol:
                return False
    return True


def ppt_approx_pbit(
    q: float,
    d: int,
    r: int,
    m: int,
    big_n: int,
    dim_cap: int = DEFAULT_DIMENSION_CAP,
) -> DensityOperator:
    """PPT state approximating a pbit, on key (2, 2) plus r*m*big_n shield pairs.

    Block structure over the key basis (00, 01, 10, 11), with
    tau1 = ((P_sym/d_sym + P_asym/d_asym)/2)^(x rN) and
    tau2 = (P_sym/d_sym)^(x rN):

        corner blocks   [q (tau1 +- tau2)/2]^(x m)
        middle blocks   [(1/2 - q) tau2]^(x m)

    normalized by 2 q^m + 2 (1/2 - q)^m. It has positive partial transpose
    over the full B side (key_B plus every shield-pair B factor) exactly when
    0 < q <= 1/3 and (1-q)/q >= (d/(d-1))^(rN).
    """
    if not 0.0 < q <= 0.5:
        raise ValueError("q must lie in (0, 1/2]")
    if min(r, m, big_n) < 1:
        raise ValueError("r, m, N must be positive integers")
    pairs = r * m * big_n
    total = 4 * d ** (2 * pairs)
    if total > dim_cap:
        raise DimensionCap(
            f"state dimension {total} exceeds cap {dim_cap}; raise dim_cap to override"
        )
    p_sym, p_asym, _ = sym_asym_projectors(d)
    d_sym, d_asym = sym_asym_dims(d)
    tau1_pair = (p_sym / d_sym + p_asym / d_asym) / 2.0
    tau2_pair = p_sym / d_sym
    tau1 = matcore.kron_power(tau1_pair, r * big_n)
    tau2 = matcore.kron_power(tau2_pair, r * big_n)
    corner_diag = matcore.kron_power(q * (tau1 + tau2) / 2.0, m)
    corner_off = matcore.kron_power(q * (tau1 - tau2) / 2.0, m)
    middle = matcore.kron_power((0.5 - q) * tau2, m)
    s = d ** (2 * pairs)
    mat = np.zeros((4 * s, 4 * s), dtype=np.complex128)

    def put(kb, lb, block):
        mat[kb * s : (kb + 1) * s, lb * s : (lb + 1) * s] = block

    put(0, 0, corner_diag)
    put(3, 3, corner_diag)
    put(0, 3, corner_off)
    put(3, 0, corner_off)
    put(1, 1, middle)
    put(2, 2, middle)
    norm = 2.0 * q**m + 2.0 * (0.5 - q) ** m
    mat /= norm
    return DensityOperator(mat, (2, 2) + (d, d) * pairs)


def shield_pair_indices(r: int, m: int, big_n: int, copy: int) -> list[int]:
    """Flat factor indices of the shield pairs owned by one of the N copies.

    Factors are (key_A, key_B, A_1, B_1, A_2, B_2, ...); within each of the
    m slots the rN consecutive pairs split into N contiguous runs of r.
    """
    if not 0 <= copy < big_n:
        raise IndexError("copy index out of range")
    idx: list[int] = []
    for slot in range(m):
        for p in range(copy * r, (copy + 1) * r):
            pair = slot * r * big_n + p
            idx.extend([2 + 2 * pair, 2 + 2 * pair + 1])
    return idx


def b_side_indices(dims: tuple[int, ...]) -> set[int]:
    """Indices of key_B and every shield-pair B factor in the layout above."""
    n_pairs = (len(dims) - 2) // 2
    return {1} | {2 + 2 * k + 1 for k in range(n_pairs)}


def ppt_min_eigenvalue(rho: DensityOperator, transposed) -> float:
    """Smallest eigenvalue of the partial transpose, unclamped.

    Nonnegative (up to the caller's own tolerance) certifies PPT across the
    cut separating ``transposed`` from the rest.
    """
    pt = matcore.partial_transpose(rho.matrix, rho.dims, transposed)
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2.0)[0])
