"""Shared generators for randomized tests (always explicitly seeded)."""

from __future__ import annotations

import numpy as np

from capamp.channels import Channel
from capamp.states import DensityOperator


def random_density(rng: np.random.Generator, dims) -> DensityOperator:
    dims = tuple(dims)
    n = int(np.prod(dims))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real, dims)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def random_channel(
    rng: np.random.Generator, d_in: int, d_out: int, kraus_count: int
) -> Channel:
    """Random isometry V: in -> out (x) env, sliced into Kraus operators."""
    g = rng.standard_normal((d_out * kraus_count, d_in)) + 1j * rng.standard_normal(
        (d_out * kraus_count, d_in)
    )
    q, _ = np.linalg.qr(g)
    kraus = tuple(q[k * d_out : (k + 1) * d_out, :] for k in range(kraus_count))
    return Channel(kraus, (d_in,), (d_out,))
