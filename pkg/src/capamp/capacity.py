"""Entropic functionals: coherent information, Holevo and private
information, one-shot capacity search, and the shield-assist lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from threadpoolctl import threadpool_limits

from . import channels as chn
from . import matcore
from .channels import Channel
from .errors import DimensionCap, DimensionMismatch
from .states import DensityOperator, max_entangled, projector, basis_ket
from .states import sym_asym_dims, sym_asym_projectors

Q1_OPTIMIZE_DIM_CAP = 16
EVALUATION_DIM_CAP = 64


@dataclass(frozen=True)
class Ensemble:
    """Probability vector paired with equally sized density operators."""

    probs: tuple[float, ...]
    states: tuple[DensityOperator, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if len(self.probs) != len(self.states):
            raise ValueError("ensemble lengths differ")
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("ensemble probabilities must form a distribution")
        dims = {s.dim for s in self.states}
        if len(dims) > 1:
            raise DimensionMismatch("ensemble states have mixed dimensions")
        object.__setattr__(self, "probs", tuple(float(x) for x in p))


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 300
    seed: int = 0
    step_tol: float = 1e-12

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.step_tol <= 0:
            raise ValueError("optimizer configuration fields must be positive")


def _entropy_raw(mat: np.ndarray) -> float:
    """Entropy of a Hermitian PSD matrix with roundoff negatives clamped."""
    w = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    pos = w[w > 0.0]
    return float(-(pos * np.log2(pos)).sum())


def _branch_leaves(ch: Channel, weight: float = 1.0):
    """Flatten nested flag metadata into weighted leaf channels."""
    if ch.branches is None:
        yield weight, ch
        return
    for p, sub in ch.branches:
        if p > 0.0:
            yield from _branch_leaves(sub, weight * p)


def coherent_info(ch: Channel, rho, use_branches: bool = True) -> float:
    """Coherent information S(output) - S(environment) at input ``rho``.

    Channels carrying flag metadata are evaluated branch by branch (the
    flag mixture is additive in the branches) unless ``use_branches`` is
    disabled, which forces one direct evaluation on the full output.
    """
    mat = matcore.as_matrix(rho)
    if mat.shape[0] != ch.in_dim:
        raise DimensionMismatch(
            f"state dimension {mat.shape[0]} != channel input {ch.in_dim}"
        )
    if use_branches and ch.branches is not None:
        return sum(
            w * coherent_info(leaf, mat, use_branches=False)
            for w, leaf in _branch_leaves(ch)
        )
    out = chn.apply_raw(ch, mat)
    env = chn.environment_output(ch, mat)
    return _entropy_raw(out) - _entropy_raw(env)


def coherent_info_state(rho: DensityOperator, conditioned) -> float:
    """I(A>B) = S(B) - S(AB) for the factor split A = ``conditioned``."""
    reduced = matcore.partial_trace(rho.matrix, rho.dims, conditioned)
    return _entropy_raw(reduced) - _entropy_raw(rho.matrix)


def holevo(ens: Ensemble) -> float:
    """S(sum p_i rho_i) - sum p_i S(rho_i); nonnegative."""
    avg = sum(
        p * s.matrix for p, s in zip(ens.probs, ens.states) if p > 0.0
    )
    mean_entropy = sum(
        p * _entropy_raw(s.matrix) for p, s in zip(ens.probs, ens.states) if p > 0.0
    )
    return _entropy_raw(avg) - mean_entropy


def private_info(ens: Ensemble, ch: Channel) -> float:
    """I(X;B) - I(X;E) for the classical-quantum extension of the ensemble."""
    if ens.states[0].dim != ch.in_dim:
        raise DimensionMismatch("ensemble states do not match the channel input")
    outs = [chn.apply_raw(ch, s.matrix) for s in ens.states]
    envs = [chn.environment_output(ch, s.matrix) for s in ens.states]
    chi_b = _entropy_raw(
        sum(p * o for p, o in zip(ens.probs, outs) if p > 0.0)
    ) - sum(p * _entropy_raw(o) for p, o in zip(ens.probs, outs) if p > 0.0)
    chi_e = _entropy_raw(
        sum(p * e for p, e in zip(ens.probs, envs) if p > 0.0)
    ) - sum(p * _entropy_raw(e) for p, e in zip(ens.probs, envs) if p > 0.0)
    return chi_b - chi_e


def key_aligned_ansatz(d: int, n: int = 1) -> np.ndarray:
    """Uniform key mixture with the shield pinned to |0>, n-fold.

    This is the product input (I_2/2 (x) |0><0|_d)^(x n), the state at which
    the private channel's n-copy coherent information attains n/d.
    """
    single = np.kron(np.eye(2, dtype=np.complex128) / 2.0, projector(basis_ket(0, d)))
    return matcore.kron_power(single, n)


def shield_paired_ansatz(d: int) -> np.ndarray:
    """I_2/2 on the key input, maximally entangled across shield and assist."""
    return np.kron(
        np.eye(2, dtype=np.complex128) / 2.0, projector(max_entangled(d))
    )


def q1_ansatz_value(ch: Channel) -> float:
    """Coherent information at the structure-matched ansatz input.

    Input factors (2, d): uniform key with aligned shield. Factors
    (2, d, d): uniform key with the shield maximally entangled into the
    assisting input; this certifies the shield-assist lower bound. A single
    input factor falls back to the maximally mixed state.
    """
    dims = ch.in_dims
    if len(dims) == 1:
        rho = np.eye(dims[0], dtype=np.complex128) / dims[0]
    elif len(dims) == 2 and dims[0] == 2:
        rho = key_aligned_ansatz(dims[1])
    elif len(dims) == 3 and dims[0] == 2 and dims[1] == dims[2]:
        rho = shield_paired_ansatz(dims[1])
    else:
        raise DimensionMismatch(
            f"no ansatz defined for input factorization {dims}"
        )
    return coherent_info(ch, rho)


_LOG_CLAMP = 1e-40


def _entropy_and_log(mat: np.ndarray) -> tuple[float, np.ndarray]:
    """Entropy of a PSD matrix together with its (support-clamped) log2."""
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    pos = w[w > 0.0]
    entropy = float(-(pos * np.log2(pos)).sum())
    logw = np.log2(np.clip(w, _LOG_CLAMP, None))
    return entropy, (v * logw[None, :]) @ v.conj().T


def coherent_info_gradient(ch: Channel, rho) -> tuple[float, np.ndarray]:
    """Coherent information and its matrix gradient at ``rho``.

    The gradient is the Hermitian M with d I_c = tr(d rho M); the entropy
    constants cancel because both the channel and its complement preserve
    trace. Logarithms are clamped on the kernel, where the true derivative
    diverges.
    """
    mat = matcore.as_matrix(rho)
    value = 0.0
    grad = np.zeros_like(mat)
    for wgt, leaf in _branch_leaves(ch):
        k = leaf.kraus_stack()
        out = np.einsum("kab,bc,kdc->ad", k, mat, k.conj(), optimize=True)
        env = np.einsum("kab,bc,lac->kl", k, mat, k.conj(), optimize=True)
        s_out, log_out = _entropy_and_log(out)
        s_env, log_env = _entropy_and_log(env)
        value += wgt * (s_out - s_env)
        back_out = np.einsum("kba,bc,kcd->ad", k.conj(), log_out, k, optimize=True)
        prod = np.einsum("lba,kbc->lkac", k.conj(), k, optimize=True)
        back_env = np.einsum("lk,lkac->ac", log_env, prod, optimize=True)
        grad += wgt * (back_env - back_out)
    return value, grad


class _LeafEvaluator:
    """Precomputed arrays for fast repeated value/gradient evaluation."""

    def __init__(self, ch: Channel):
        self.leaves = []
        for wgt, leaf in _branch_leaves(ch):
            k = leaf.kraus_stack()
            m, dout, din = k.shape
            kh = k.conj().transpose(0, 2, 1).copy()
            kc_flat = k.conj().reshape(m, dout * din)
            # prod[l, k] = K_l^dag K_k, flattened for the backward pass
            prod = np.einsum("lba,kbc->lkac", k.conj(), k, optimize=True)
            prod_flat = prod.reshape(m * m, din * din)
            self.leaves.append((wgt, k, kh, kc_flat, prod_flat, m, dout, din))

    def value_grad(self, rho: np.ndarray) -> tuple[float, np.ndarray]:
        value = 0.0
        grad = np.zeros_like(rho)
        for wgt, k, kh, kc_flat, prod_flat, m, dout, din in self.leaves:
            kr = np.matmul(k, rho)
            out = np.matmul(kr, kh).sum(axis=0)
            env = kr.reshape(m, dout * din) @ kc_flat.T
            s_out, log_out = _entropy_and_log(out)
            s_env, log_env = _entropy_and_log(env)
            value += wgt * (s_out - s_env)
            back_out = np.matmul(np.matmul(kh, log_out[None, :, :]), k).sum(axis=0)
            back_env = (log_env.reshape(1, m * m) @ prod_flat).reshape(din, din)
            grad += wgt * (back_env - back_out)
        return value, grad


def q1_optimize(
    ch: Channel,
    cfg: OptimizerConfig = OptimizerConfig(),
    dim_cap: int = Q1_OPTIMIZE_DIM_CAP,
) -> tuple[float, DensityOperator]:
    """Seeded local search for the one-shot coherent information.

    States are parameterized as G G^dag / tr(G G^dag) over complex square G
    and ascended with quasi-Newton steps (analytic entropy gradients) from
    independent random restarts; restart k draws from stream (seed, k), so
    results do not depend on scheduling. The value is a certified lower
    bound on the one-shot quantity, never a global-optimality claim.
    """
    n = ch.in_dim
    if n > dim_cap:
        raise DimensionCap(f"input dimension {n} exceeds optimizer cap {dim_cap}")
    evaluator = _LeafEvaluator(ch)
    eye = np.eye(n)

    def objective(x: np.ndarray) -> tuple[float, np.ndarray]:
        g = (x[: n * n] + 1j * x[n * n :]).reshape(n, n)
        gram = g @ g.conj().T
        tr = float(np.real(np.trace(gram)))
        if tr < 1e-300:
            return 0.0, np.zeros_like(x)
        rho = gram / tr
        value, m = evaluator.value_grad(rho)
        centered = (m - np.real(np.trace(rho @ m)) * eye) / tr
        ng = centered @ g
        grad = np.concatenate([2.0 * ng.real.ravel(), 2.0 * ng.imag.ravel()])
        return -value, -grad

    best_val = -np.inf
    best_rho = np.eye(n, dtype=np.complex128) / n
    # BLAS thread teams cost more than these tiny factorizations; pin to 1.
    with threadpool_limits(limits=1):
        for k in range(cfg.restarts):
            rng = np.random.default_rng([cfg.seed, k])
            x0 = rng.standard_normal(2 * n * n)
            res = minimize(
                objective,
                x0,
                jac=True,
                method="L-BFGS-B",
                options={
                    "maxiter": cfg.max_iterations,
                    "ftol": cfg.step_tol,
                    "gtol": 1e-12,
                },
            )
            val = -float(res.fun)
            if val > best_val:
                best_val = val
                g = (res.x[: n * n] + 1j * res.x[n * n :]).reshape(n, n)
                gram = g @ g.conj().T
                best_rho = gram / np.real(np.trace(gram))
    return best_val, DensityOperator(best_rho, ch.in_dims)


def sym_asym_images(assist: Channel, d: int) -> tuple[DensityOperator, DensityOperator]:
    """Images of the normalized sym/asym projector states under assist (x) id."""
    if assist.in_dim != d:
        raise DimensionMismatch("assist channel input must match the shield")
    p_sym, p_asym, _ = sym_asym_projectors(d)
    d_sym, d_asym = sym_asym_dims(d)
    ext = chn.tensor(assist, chn.identity_channel(d))
    return (
        chn.apply(ext, DensityOperator(p_sym / d_sym, (d, d))),
        chn.apply(ext, DensityOperator(p_asym / d_asym, (d, d))),
    )


def amplification_lower_bound(assist: Channel, q: float, d: int) -> float:
    """Certified lower bound on the one-shot rate of private (x) assist.

    1 - h(q) plus the Holevo information of the q-weighted sym/asym images;
    equals the ansatz value of the tensor channel at the shield-paired
    input.
    """
    j_sym, j_asym = sym_asym_images(assist, d)
    chi = holevo(Ensemble((q, 1.0 - q), (j_sym, j_asym)))
    return 1.0 - matcore.binary_entropy(q) + chi


def multi_copy_ansatz_value(
    n: int, d: int, dim_cap: int = EVALUATION_DIM_CAP
) -> float:
    """n-copy rate of the q = (d+1)/(2d) private channel at the key-aligned
    ansatz; evaluates to n/d.
    """
    total = (2 * d) ** n
    if total > dim_cap:
        raise DimensionCap(f"total dimension {total} exceeds cap {dim_cap}")
    ch = chn.tensor_power(chn.private_channel((d + 1) / (2.0 * d), d), n)
    return coherent_info(ch, key_aligned_ansatz(d, n))
