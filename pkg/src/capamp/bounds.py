"""Closed-form and witness-verified capacity upper bounds.

No SDP solver is involved: the transposition-norm and beta programs are
exposed as feasibility verifiers, together with the explicit feasible
points known for the private-channel family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as chn
from . import matcore
from .channels import Channel
from .errors import DimensionMismatch, NotOrthogonal
from .states import DensityOperator, max_entangled, projector, sym_asym_dims
from .states import sym_asym_projectors

PSD_FEAS_TOL = 1e-8


@dataclass(frozen=True)
class TranspositionWitness:
    """Feasible point (Y, Z) for the transposed-channel diamond-norm program."""

    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name, m in (("y", self.y), ("z", self.z)):
            m = matcore.as_matrix(m)
            dim = m.shape[0]
            w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
            if w[0] < -PSD_FEAS_TOL * dim:
                raise ValueError(f"witness block {name} is not PSD")
            object.__setattr__(self, name, m)


@dataclass(frozen=True)
class BetaWitness:
    """Feasible point (R, X) for the beta program bounding classical capacity."""

    r: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        for name, m in (("r", self.r), ("x", self.x)):
            m = matcore.as_matrix(m)
            if np.max(np.abs(m - m.conj().T)) > matcore.HERMITICITY_TOL * m.shape[0]:
                raise ValueError(f"witness block {name} is not Hermitian")
            object.__setattr__(self, name, m)


def matrix_abs(m) -> np.ndarray:
    """|M| = sqrt(M^dag M) for Hermitian M, via eigendecomposition."""
    w, v = matcore.eig_hermitian(m)
    return (v * np.abs(w)[None, :]) @ v.conj().T


def _r0_r1(q, d: int):
    r0 = q / (d * (d + 1)) + (1.0 - q) / (d * (d - 1))
    r1 = q / (d * (d + 1)) - (1.0 - q) / (d * (d - 1))
    return r0, r1


def transposition_bound_closed(q, d: int):
    """Closed-form transposition bound on the private channel's rate.

    log2((d^2-1)(r0+|r1|) + |r0+d r1| + |r1+d r0|) with
    r0 = q/(d(d+1)) + (1-q)/(d(d-1)) and r1 the same with a minus sign.
    Accepts scalar or array q.
    """
    q = np.asarray(q, dtype=float)
    if np.any((q < 0.0) | (q > 1.0)):
        raise ValueError("q must lie in [0, 1]")
    if d < 2:
        raise ValueError("need shield dimension >= 2")
    r0, r1 = _r0_r1(q, d)
    val = np.log2(
        (d * d - 1) * (r0 + np.abs(r1)) + np.abs(r0 + d * r1) + np.abs(r1 + d * r0)
    )
    return float(val) if val.ndim == 0 else val


def transposition_bound_general(
    q: float, sigma1: DensityOperator, sigma2: DensityOperator, d: int
) -> float:
    """Numeric transposition bound for a flagged pair of orthogonal shields.

    log2(d ||tr_B(|(q s1 + (1-q) s2)^Tb| + |(q s1 - (1-q) s2)^Tb|)||_op),
    where Tb transposes the second shield factor. Requires the shield states
    to have orthogonal supports.
    """
    if sigma1.dims != (d, d) or sigma2.dims != (d, d):
        raise DimensionMismatch("shield states must live on (d, d)")
    if matcore.operator_norm(sigma1.matrix @ sigma2.matrix) > 1e-9:
        raise NotOrthogonal("shield states must have orthogonal supports")
    dims = (d, d)
    plus = matcore.partial_transpose(
        q * sigma1.matrix + (1.0 - q) * sigma2.matrix, dims, {1}
    )
    minus = matcore.partial_transpose(
        q * sigma1.matrix - (1.0 - q) * sigma2.matrix, dims, {1}
    )
    reduced = matcore.partial_trace(matrix_abs(plus) + matrix_abs(minus), dims, {1})
    return float(np.log2(d * matcore.operator_norm(reduced)))


def _transposed_choi(ch: Channel) -> np.ndarray:
    """Unnormalized Choi operator with the output factors transposed."""
    dims = ch.in_dims + ch.out_dims
    out_idx = set(range(len(ch.in_dims), len(dims)))
    return matcore.partial_transpose(chn.unnormalized_choi(ch), dims, out_idx)


def verify_transposition_witness(
    ch: Channel, w: TranspositionWitness
) -> tuple[bool, float]:
    """Check (Y, Z) against the transposed-channel program and price it.

    Feasible iff [[Y, -J], [-J, Z]] is PSD for J the output-transposed
    unnormalized Choi operator. The value (||tr_B Y||_op + ||tr_B Z||_op)/2
    then upper-bounds the transposed channel's diamond norm, whose log2
    upper-bounds the quantum capacity.
    """
    jt = _transposed_choi(ch)
    dim = jt.shape[0]
    if w.y.shape != (dim, dim) or w.z.shape != (dim, dim):
        raise DimensionMismatch("witness blocks do not match the Choi dimension")
    block = np.block([[w.y, -jt], [-jt, w.z]])
    min_eig = float(np.linalg.eigvalsh((block + block.conj().T) / 2.0)[0])
    feasible = min_eig >= -PSD_FEAS_TOL * 2 * dim
    dims = ch.in_dims + ch.out_dims
    out_idx = set(range(len(ch.in_dims), len(dims)))
    ya = matcore.partial_trace(w.y, dims, out_idx)
    za = matcore.partial_trace(w.z, dims, out_idx)
    value = 0.5 * (matcore.operator_norm(ya) + matcore.operator_norm(za))
    return feasible, value


def private_channel_transposition_witness(q: float, d: int) -> TranspositionWitness:
    """The explicit Y = Z feasible point for the private channel.

    Diagonal key blocks carry |(q s1 + (1-q) s2)^Tb| and the off-diagonal
    key projectors carry |(q s1 - (1-q) s2)^Tb|, scaled by d; its value
    reproduces the closed-form bound exactly.
    """
    p_sym, p_asym, _ = sym_asym_projectors(d)
    d_sym, d_asym = sym_asym_dims(d)
    s1 = p_sym / d_sym
    s2 = p_asym / d_asym
    dims = (d, d)
    plus = matrix_abs(
        matcore.partial_transpose(q * s1 + (1.0 - q) * s2, dims, {1})
    )
    minus = matrix_abs(
        matcore.partial_transpose(q * s1 - (1.0 - q) * s2, dims, {1})
    )
    key = np.zeros((4, 4))
    key[0, 0] = key[3, 3] = 1.0
    key_off = np.eye(4) - key
    # (key_A, key_B, shield_A, shield_B) -> Choi order (key_A, shield_A, ...)
    mat = d * (np.kron(key, plus) + np.kron(key_off, minus))
    mat = matcore.permute_subsystems(mat, (2, 2, d, d), (0, 2, 1, 3))
    return TranspositionWitness(y=mat, z=mat.copy())


def _eta(x):
    """-x log2 x with the continuous extension eta(0) = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(x * np.log2(x))
    out = np.where(x <= 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def depolarizing_upper(p, d: int):
    """Flag-technique upper bound on the depolarizing channel's rate.

    Zero at and beyond the anti-degradability threshold d/(2(d+1));
    below it, log2 d + eta(1/2) - eta(1/2 - (d^2-1)p/d^2) - (d^2-1)eta(p/d^2)
    with eta(x) = -x log2 x. Accepts scalar or array p.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("p must lie in [0, 1]")
    frac = (d * d - 1.0) / (d * d)
    active = np.log2(d) + _eta(0.5) - _eta(np.clip(0.5 - frac * p, 0.0, None)) - (
        d * d - 1.0
    ) * _eta(p / (d * d))
    val = np.where(p >= d / (2.0 * (d + 1.0)), 0.0, active)
    return float(val) if val.ndim == 0 else val


def erasure_capacity(lam, d: int):
    """Exact quantum capacity of erasure: max{(1 - 2 lam) log2 d, 0}."""
    lam = np.asarray(lam, dtype=float)
    if np.any((lam < 0.0) | (lam > 1.0)):
        raise ValueError("erasure parameter must lie in [0, 1]")
    val = np.maximum((1.0 - 2.0 * lam) * np.log2(d), 0.0)
    return float(val) if val.ndim == 0 else val


def verify_beta_witness(ch: Channel, w: BetaWitness) -> tuple[bool, float]:
    """Check (R, X) against the beta program and return tr(X).

    Feasible iff -R <= J^Tb <= R and -I (x) X <= R^Tb <= I (x) X as PSD
    conditions, for J the output-transposed unnormalized Choi operator.
    log2 of the value upper-bounds the classical (hence private) capacity.
    """
    jt = _transposed_choi(ch)
    dim = jt.shape[0]
    if w.r.shape != (dim, dim):
        raise DimensionMismatch("witness R does not match the Choi dimension")
    if w.x.shape != (ch.out_dim, ch.out_dim):
        raise DimensionMismatch("witness X does not match the output dimension")
    dims = ch.in_dims + ch.out_dims
    out_idx = set(range(len(ch.in_dims), len(dims)))
    rtb = matcore.partial_transpose(w.r, dims, out_idx)
    envelope = np.kron(np.eye(ch.in_dim), w.x)
    feasible = True
    for m in (w.r - jt, w.r + jt, envelope - rtb, envelope + rtb):
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
        if min_eig < -PSD_FEAS_TOL * dim:
            feasible = False
            break
    return feasible, float(np.real(np.trace(w.x)))


def private_channel_beta_witness(d: int) -> BetaWitness:
    """Explicit beta feasible point for the private channel at its
    simple-form parameter q = (d+1)/(2d), with tr(X) = 2 independent of d.

    The transposed Choi operator is (1/d) P_corr (x) I plus the key-swap
    block tensored with the maximally entangled projector (unit weight), so
    R needs the anti-correlated key projector at unit weight as well; its
    own partial transpose then has spectral radius 1/d, matching X = I/d.
    """
    key_corr = np.zeros((4, 4))
    key_corr[0, 0] = key_corr[3, 3] = 1.0
    key_anti = np.eye(4) - key_corr
    psi = projector(max_entangled(d))
    r = (1.0 / d) * np.kron(key_corr, np.eye(d * d)) + np.kron(key_anti, psi)
    r = matcore.permute_subsystems(r, (2, 2, d, d), (0, 2, 1, 3))
    x = np.eye(2 * d) / d
    return BetaWitness(r=r, x=x)


def privacy_quantum_tradeoff(d_a: int, q_cap: float) -> float:
    """(log2 d_A + Q)/2, bounding the private capacity for input size d_A."""
    if d_a < 1:
        raise ValueError("input dimension must be >= 1")
    if q_cap < 0.0:
        raise ValueError("quantum capacity must be nonnegative")
    return 0.5 * (np.log2(d_a) + q_cap)


def diamond_upper_via_choi(a: Channel, b: Channel) -> float:
    """d_A times the trace distance of the normalized Choi operators.

    An upper bound on the diamond distance between the channels.
    """
    if a.in_dims != b.in_dims or a.out_dims != b.out_dims:
        raise DimensionMismatch("channels must share dimensions")
    diff = chn.choi(a).matrix - chn.choi(b).matrix
    return a.in_dim * matcore.trace_norm(diff)
