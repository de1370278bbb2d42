"""CPTP maps as Kraus families, with Choi conversions and combinators.

Channels are immutable. A channel built by ``flagged`` (or by tensoring
flagged channels) carries branch metadata so entropic quantities can be
evaluated branch by branch instead of eigendecomposing a large output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import DimensionMismatch, NotAChannel
from .states import DensityOperator, max_entangled, sym_asym_pbit

TP_TOL = 1e-9
KRAUS_PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map in Kraus form.

    ``in_dims`` / ``out_dims`` record the tensor factorization of the input
    and output spaces. ``branches`` (probability, channel) is set for flag
    mixtures; ``in_blocks`` / ``out_blocks`` record direct-sum structure.
    """

    kraus: tuple[np.ndarray, ...]
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    branches: tuple[tuple[float, "Channel"], ...] | None = None
    in_blocks: tuple[int, int] | None = None
    out_blocks: tuple[int, int] | None = None

    def __post_init__(self):
        ks = tuple(matcore.as_matrix(k) for k in self.kraus)
        if not ks:
            raise NotAChannel("channel needs at least one Kraus operator")
        din = int(np.prod(self.in_dims))
        dout = int(np.prod(self.out_dims))
        for k in ks:
            if k.shape != (dout, din):
                raise NotAChannel(
                    f"Kraus shape {k.shape} does not match ({dout}, {din})"
                )
        gram = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(gram - np.eye(din))) > TP_TOL:
            raise NotAChannel("Kraus operators do not sum to the identity")
        frozen = []
        for k in ks:
            k = k.copy()
            k.flags.writeable = False
            frozen.append(k)
        object.__setattr__(self, "kraus", tuple(frozen))
        object.__setattr__(self, "in_dims", tuple(int(d) for d in self.in_dims))
        object.__setattr__(self, "out_dims", tuple(int(d) for d in self.out_dims))

    @property
    def in_dim(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def out_dim(self) -> int:
        return int(np.prod(self.out_dims))

    def kraus_stack(self) -> np.ndarray:
        return np.stack(self.kraus)

    def without_metadata(self) -> "Channel":
        """Same map, with branch/block annotations stripped."""
        return Channel(self.kraus, self.in_dims, self.out_dims)


def _prune(kraus) -> list[np.ndarray]:
    kept = [k for k in kraus if np.linalg.norm(k) >= KRAUS_PRUNE_TOL]
    return kept if kept else list(kraus[:1])


def identity_channel(dims) -> Channel:
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    d = int(np.prod(dims))
    return Channel((np.eye(d, dtype=np.complex128),), dims, dims)


def apply(ch: Channel, rho) -> DensityOperator:
    """Push a state through the channel."""
    mat = matcore.as_matrix(rho)
    if mat.shape[0] != ch.in_dim:
        raise DimensionMismatch(
            f"input dimension {mat.shape[0]} != channel input {ch.in_dim}"
        )
    k = ch.kraus_stack()
    out = np.einsum("kab,bc,kdc->ad", k, mat, k.conj(), optimize=True)
    return DensityOperator(out, ch.out_dims)


def apply_raw(ch: Channel, mat: np.ndarray) -> np.ndarray:
    """Channel action on a raw matrix, without state validation."""
    k = ch.kraus_stack()
    return np.einsum("kab,bc,kdc->ad", k, mat, k.conj(), optimize=True)


def environment_output(ch: Channel, rho) -> np.ndarray:
    """State left on the environment: W_ij = tr(K_i rho K_j^dag)."""
    mat = matcore.as_matrix(rho)
    k = ch.kraus_stack()
    return np.einsum("kab,bc,lac->kl", k, mat, k.conj(), optimize=True)


def choi(ch: Channel) -> DensityOperator:
    """Normalized Choi operator on factors in_dims + out_dims.

    The reference marginal (partial trace over the output factors) equals
    the maximally mixed state on the input.
    """
    din, dout = ch.in_dim, ch.out_dim
    mat = np.zeros((din * dout, din * dout), dtype=np.complex128)
    scale = 1.0 / np.sqrt(din)
    for k in ch.kraus:
        # (I (x) K) |max_ent> is the flattened transpose of K / sqrt(din).
        v = (k.T * scale).reshape(din * dout)
        mat += np.outer(v, v.conj())
    return DensityOperator(mat, ch.in_dims + ch.out_dims)


def unnormalized_choi(ch: Channel) -> np.ndarray:
    """sum_ij |i><j| (x) ch(|i><j|) = in_dim * normalized Choi."""
    return ch.in_dim * choi(ch).matrix


def channel_from_choi(
    j: DensityOperator,
    d_in: int,
    in_dims: tuple[int, ...] | None = None,
    out_dims: tuple[int, ...] | None = None,
) -> Channel:
    """Recover a channel from its normalized Choi operator.

    Requires the reference marginal to equal I/d_in; the Kraus count equals
    the numerical rank of the Choi operator.
    """
    dim = j.dim
    if dim % d_in:
        raise NotAChannel(f"Choi dimension {dim} not divisible by d_in={d_in}")
    d_out = dim // d_in
    marginal = matcore.partial_trace(j.matrix, (d_in, d_out), {1})
    if np.max(np.abs(marginal - np.eye(d_in) / d_in)) > 1e-8:
        raise NotAChannel("reference marginal of the Choi operator is not I/d_in")
    w, v = matcore.eig_hermitian(j.matrix)
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam <= 0.0:
            continue
        kraus.append(np.sqrt(d_in * lam) * vec.reshape(d_in, d_out).T)
    kraus = _prune(kraus)
    return Channel(
        tuple(kraus),
        in_dims if in_dims is not None else (d_in,),
        out_dims if out_dims is not None else (d_out,),
    )


def complementary(ch: Channel) -> Channel:
    """Complementary channel to the environment spanned by the Kraus index.

    Built directly from the Kraus Gram structure: the output dimension is
    the number of Kraus operators, and the action is
    rho -> [tr(K_i rho K_j^dag)]_ij.
    """
    k = ch.kraus_stack()  # (m, dout, din)
    m = k.shape[0]
    kraus = tuple(np.ascontiguousarray(k[:, b, :]) for b in range(ch.out_dim))
    return Channel(kraus, ch.in_dims, (m,))


def private_channel(q: float, d: int) -> Channel:
    """Channel whose Choi operator is the canonical sym/asym pbit.

    Input factors (2, d) = (key, shield), output likewise. For
    q = (d+1)/(2d) the action takes the closed form
    rho -> (1/d) [[tr(X00) I, X01^T], [X10^T, tr(X11) I]].
    """
    gamma = sym_asym_pbit(q, d)
    # pbit factor order (kA, kB, sA, sB) -> Choi order (kA, sA, kB, sB)
    j = gamma.permuted((0, 2, 1, 3))
    return channel_from_choi(
        DensityOperator(j.matrix, (2 * d, 2 * d)),
        d_in=2 * d,
        in_dims=(2, d),
        out_dims=(2, d),
    )


def private_block_action(q: float, d: int, x: np.ndarray) -> np.ndarray:
    """Blockwise closed form of the private channel, usable as an oracle.

    With x = [[X00, X01], [X10, X11]] (d x d blocks), diagonal blocks map to
    q (X^T + tr X I)/(d+1) + (1-q)(-X^T + tr X I)/(d-1) and off-diagonal
    blocks take the same combination with a minus sign on the second term.
    """
    x = matcore.as_matrix(x)
    if x.shape != (2 * d, 2 * d):
        raise DimensionMismatch(f"expected shape {(2 * d, 2 * d)}, got {x.shape}")
    eye = np.eye(d, dtype=np.complex128)
    out = np.zeros_like(x)
    for rr in range(2):
        for ss in range(2):
            blk = x[rr * d : (rr + 1) * d, ss * d : (ss + 1) * d]
            plus = (blk.T + np.trace(blk) * eye) / (d + 1)
            minus = (-blk.T + np.trace(blk) * eye) / (d - 1)
            sign = 1.0 if rr == ss else -1.0
            out[rr * d : (rr + 1) * d, ss * d : (ss + 1) * d] = (
                q * plus + sign * (1.0 - q) * minus
            )
    return out


def erasure_channel(lam: float, d: int) -> Channel:
    """Erasure to a (d+1)-dimensional output with an orthogonal erasure flag.

    rho -> (1-lam) rho (+) lam tr(rho) |e><e|, where |e> is the extra level.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("erasure parameter must lie in [0, 1]")
    embed = np.zeros((d + 1, d), dtype=np.complex128)
    embed[:d, :] = np.eye(d)
    kraus = [np.sqrt(1.0 - lam) * embed]
    for jdx in range(d):
        k = np.zeros((d + 1, d), dtype=np.complex128)
        k[d, jdx] = np.sqrt(lam)
        kraus.append(k)
    return Channel(tuple(_prune(kraus)), (d,), (d + 1,))


def replacement_channel(sigma, d_in: int) -> Channel:
    """Constant map X -> tr(X) sigma."""
    sig = sigma if isinstance(sigma, DensityOperator) else DensityOperator(
        matcore.as_matrix(sigma), (matcore.as_matrix(sigma).shape[0],)
    )
    w, v = matcore.eig_hermitian(sig.matrix)
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam <= 0.0:
            continue
        root = np.sqrt(lam) * vec
        for jdx in range(d_in):
            k = np.zeros((sig.dim, d_in), dtype=np.complex128)
            k[:, jdx] = root
            kraus.append(k)
    return Channel(tuple(_prune(kraus)), (d_in,), sig.dims)


def erasure_channel_flagged(lam: float, d: int, replace_with=None) -> Channel:
    """Flag-register form of erasure: (1-lam) id (+) lam replacement.

    The output carries an explicit 2-dimensional flag factor; the erased
    branch replaces the input with ``replace_with`` (maximally mixed by
    default). Coherent information only depends on the branch probabilities.
    """
    if replace_with is None:
        replace_with = np.eye(d, dtype=np.complex128) / d
    return flagged(
        (
            (1.0 - lam, identity_channel(d)),
            (lam, replacement_channel(replace_with, d)),
        )
    )


def depolarizing_channel(p: float, d: int) -> Channel:
    """rho -> (1-p) rho + p I/d."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("depolarizing parameter must lie in [0, 1]")
    psi = max_entangled(d)
    mat = (1.0 - p) * np.outer(psi, psi.conj()) + p * np.eye(d * d) / (d * d)
    return channel_from_choi(DensityOperator(mat, (d, d)), d_in=d)


def tensor(a: Channel, b: Channel) -> Channel:
    """Tensor product; branch metadata distributes across the product."""
    kraus = tuple(np.kron(ka, kb) for ka in a.kraus for kb in b.kraus)
    branches = None
    if a.branches is not None or b.branches is not None:
        left = a.branches if a.branches is not None else ((1.0, a),)
        right = b.branches if b.branches is not None else ((1.0, b),)
        branches = tuple(
            (pa * pb, tensor(na, nb)) for pa, na in left for pb, nb in right
        )
    return Channel(
        kraus, a.in_dims + b.in_dims, a.out_dims + b.out_dims, branches=branches
    )


def tensor_power(ch: Channel, n: int) -> Channel:
    out = ch
    for _ in range(n - 1):
        out = tensor(out, ch)
    return out


def compose(after: Channel, before: Channel) -> Channel:
    """after o before, by multiplying Kraus families."""
    if before.out_dim != after.in_dim:
        raise DimensionMismatch("composition dimensions do not match")
    kraus = tuple(_prune([a @ b for a in after.kraus for b in before.kraus]))
    return Channel(kraus, before.in_dims, after.out_dims)


def direct_sum(a: Channel, b: Channel) -> Channel:
    """Block-diagonal sum; off-diagonal input blocks are annihilated."""
    din = a.in_dim + b.in_dim
    dout = a.out_dim + b.out_dim
    kraus = []
    for k in a.kraus:
        big = np.zeros((dout, din), dtype=np.complex128)
        big[: a.out_dim, : a.in_dim] = k
        kraus.append(big)
    for k in b.kraus:
        big = np.zeros((dout, din), dtype=np.complex128)
        big[a.out_dim :, a.in_dim :] = k
        kraus.append(big)
    return Channel(
        tuple(kraus),
        (din,),
        (dout,),
        in_blocks=(a.in_dim, b.in_dim),
        out_blocks=(a.out_dim, b.out_dim),
    )


def flagged(branches) -> Channel:
    """Flag mixture sum_i p_i |i><i| (x) N_i with an explicit flag register.

    Branch channels must share input and output dimensions; the returned
    channel keeps (p_i, N_i) as metadata for exact branchwise evaluation.
    """
    branches = tuple((float(p), ch) for p, ch in branches)
    if not branches:
        raise NotAChannel("flag mixture needs at least one branch")
    probs = np.array([p for p, _ in branches])
    if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-9:
        raise NotAChannel("branch probabilities must form a distribution")
    first = branches[0][1]
    for _, ch in branches:
        if ch.in_dims != first.in_dims or ch.out_dims != first.out_dims:
            raise DimensionMismatch("flag branches must share dimensions")
    nb = len(branches)
    kraus = []
    for idx, (p, ch) in enumerate(branches):
        if p == 0.0:
            continue
        flag = np.zeros((nb, 1), dtype=np.complex128)
        flag[idx, 0] = 1.0
        for k in ch.kraus:
            kraus.append(np.sqrt(p) * np.kron(flag, k))
    return Channel(
        tuple(kraus),
        first.in_dims,
        (nb,) + first.out_dims,
        branches=branches,
    )
