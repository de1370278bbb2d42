"""Dense complex linear algebra and entropy primitives.

Operators are dense complex128 numpy arrays in row-major order; multipartite
structure is described by a tuple of tensor-factor dimensions. Subsystem
indices are 0-based. All logarithms are base 2, so entropies are in bits.

Trace distance is exposed unhalved: the distance between states ``rho`` and
``sigma`` is ``trace_norm(rho - sigma)`` with no factor 1/2.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import NotAState, NotHermitian

# Tolerances scale with dimension: compositions accumulate roundoff
# roughly linearly in the number of floating-point contractions.
HERMITICITY_TOL = 1e-9
EIG_CLAMP_TOL = 1e-9
TRACE_TOL = 1e-9


def as_matrix(obj) -> np.ndarray:
    """Coerce ``obj`` (ndarray or anything with a ``.matrix``) to complex128."""
    m = getattr(obj, "matrix", obj)
    return np.asarray(m, dtype=np.complex128)


def _check_square(m: np.ndarray, dims: Sequence[int] | None = None) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if dims is not None and int(np.prod(dims)) != m.shape[0]:
        raise ValueError(
            f"factor dimensions {tuple(dims)} do not multiply to {m.shape[0]}"
        )
    return m.shape[0]


def kron(a, b) -> np.ndarray:
    """Kronecker product; factor dimensions multiply."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Iterable) -> np.ndarray:
    """Kronecker product of a sequence, left to right."""
    out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def kron_power(m, k: int) -> np.ndarray:
    """k-fold Kronecker power (k = 0 gives the 1x1 identity)."""
    if k < 0:
        raise ValueError("kron_power needs k >= 0")
    return kron_all([m] * k)


def _resolve_indices(idx: Iterable[int], n: int, what: str) -> list[int]:
    out = sorted({int(i) for i in idx})
    for i in out:
        if i < 0 or i >= n:
            raise IndexError(f"{what} index {i} out of range for {n} factors")
    return out


def partial_trace(m, dims: Sequence[int], traced: Iterable[int]) -> np.ndarray:
    """Trace out the factors listed in ``traced``.

    ``dims`` lists every tensor-factor dimension of the square matrix ``m``;
    the result acts on the kept factors in their original order. The empty
    set is a no-op (copy).
    """
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    _check_square(m, dims)
    n = len(dims)
    traced_list = _resolve_indices(traced, n, "traced")
    if not traced_list:
        return m.copy()
    keep = [i for i in range(n) if i not in traced_list]
    t = m.reshape(dims + dims)
    row_labels = list(range(n))
    col_labels = [i if i in traced_list else n + i for i in range(n)]
    out_labels = keep + [n + i for i in keep]
    res = np.einsum(t, row_labels + col_labels, out_labels)
    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(kept_dim, kept_dim)


def partial_transpose(m, dims: Sequence[int], transposed: Iterable[int]) -> np.ndarray:
    """Transpose the factors listed in ``transposed``; an exact involution."""
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    _check_square(m, dims)
    n = len(dims)
    tset = _resolve_indices(transposed, n, "transposed")
    if not tset:
        return m.copy()
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    for i in tset:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return np.ascontiguousarray(t.transpose(axes)).reshape(m.shape)


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so new factor ``k`` is old factor ``perm[k]``."""
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    _check_square(m, dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm {perm} is not a permutation of 0..{n - 1}")
    t = m.reshape(dims + dims)
    axes = perm + [n + p for p in perm]
    return np.ascontiguousarray(t.transpose(axes)).reshape(m.shape)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Inputs within ``HERMITICITY_TOL * dim`` of Hermitian (max-entry norm) are
    symmetrized as (m + m^dag)/2 before the decomposition; anything further
    raises ``NotHermitian``. Returns ``(w, v)`` with ``m = v @ diag(w) @ v^dag``.
    """
    m = as_matrix(m)
    dim = _check_square(m)
    dev = float(np.max(np.abs(m - m.conj().T))) if dim else 0.0
    if dev > HERMITICITY_TOL * dim:
        raise NotHermitian(f"max |m - m^dag| = {dev:.3e} exceeds tolerance")
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w[::-1].copy(), np.ascontiguousarray(v[:, ::-1])


def state_spectrum(rho) -> np.ndarray:
    """Validated, clamped eigenvalue list (descending) of a density operator.

    Eigenvalues in ``[-EIG_CLAMP_TOL * dim, 0]`` are clamped to 0; anything
    more negative, a trace away from 1, or a non-Hermitian input raises
    ``NotAState``/``NotHermitian``.
    """
    m = as_matrix(rho)
    dim = _check_square(m)
    w, _ = eig_hermitian(m)
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1.0) > TRACE_TOL * dim:
        raise NotAState(f"trace {tr!r} deviates from 1 beyond tolerance")
    clamp = EIG_CLAMP_TOL * dim
    if w[-1] < -clamp:
        raise NotAState(f"eigenvalue {w[-1]:.3e} below -{clamp:.3e}")
    return np.clip(w, 0.0, None)


def entropy_of_spectrum(w: np.ndarray) -> float:
    """Shannon entropy (bits) of a nonnegative spectrum, 0 log 0 := 0."""
    w = np.asarray(w, dtype=float)
    pos = w[w > 0.0]
    return float(-(pos * np.log2(pos)).sum())


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits of a density operator."""
    return entropy_of_spectrum(state_spectrum(rho))


def binary_entropy(x):
    """Binary entropy h(x) = -x log2 x - (1-x) log2(1-x) in bits.

    Accepts scalars or arrays elementwise; raises on values outside [0, 1].
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(arr * np.log2(arr)) - (1.0 - arr) * np.log2(1.0 - arr)
    out = np.where((arr == 0.0) | (arr == 1.0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False).sum())


def operator_norm(m) -> float:
    """Largest singular value."""
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False).max())


def purify(rho) -> np.ndarray:
    """Purification of a density operator.

    Returns a unit vector on H (x) H_E with dim H_E = rank(rho) such that
    tracing out the trailing environment factor recovers ``rho``.
    """
    m = as_matrix(rho)
    dim = _check_square(m)
    w = state_spectrum(m)  # validation
    _, v = eig_hermitian(m)
    keep = w > EIG_CLAMP_TOL * dim
    lam = w[keep]
    vecs = v[:, keep]
    rank = int(keep.sum())
    psi = (vecs * np.sqrt(lam)[None, :]).reshape(dim * rank)
    return psi / np.linalg.norm(psi)
