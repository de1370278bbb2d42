"""Amplification margin predicates, parameter sweeps, and the approximate
private channel bounds (superactivation thresholds, metric separation,
additivity-forcing erasure rates).

Margins are reported as LHS - RHS of the corresponding sufficient
condition, so a negative margin certifies amplification and a CSV sweep is
directly plottable with a zero contour.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bounds import (
    depolarizing_upper,
    erasure_capacity,
    transposition_bound_closed,
)
from .errors import InfeasibleParams
from .matcore import binary_entropy

CSV_FLOAT_FORMAT = "{:.17g}"


def _threads() -> int:
    env = os.environ.get("CAPAMP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def erasure_margin(q, d: int, lam):
    """Amplification margin for an erasure assist; negative certifies gain.

    LHS = closed transposition bound + exact erasure capacity,
    RHS = 1 - lam h(q). Accepts scalar or array arguments.
    """
    lhs = transposition_bound_closed(q, d) + erasure_capacity(lam, d)
    rhs = 1.0 - np.asarray(lam, dtype=float) * binary_entropy(q)
    out = lhs - rhs
    return float(out) if np.ndim(out) == 0 else out


def depolarizing_assist_holevo(q, p, d: int):
    """Closed-form Holevo information of the q-weighted depolarizing images.

    h((1-p)q + (p/2)(1+1/d)) - q h(1 - (p/2)(1-1/d)) - (1-q) h((p/2)(1+1/d)).
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    mixed = (1.0 - p) * q + (p / 2.0) * (1.0 + 1.0 / d)
    sym_w = 1.0 - (p / 2.0) * (1.0 - 1.0 / d)
    asym_w = (p / 2.0) * (1.0 + 1.0 / d)
    out = (
        binary_entropy(mixed)
        - q * binary_entropy(sym_w)
        - (1.0 - q) * binary_entropy(asym_w)
    )
    return float(out) if np.ndim(out) == 0 else out


def depol_case(p, d: int):
    """1 below the anti-degradability threshold d/(2(d+1)), else 2."""
    p = np.asarray(p, dtype=float)
    case = np.where(p < d / (2.0 * (d + 1.0)), 1, 2)
    return int(case) if case.ndim == 0 else case


def depol_margin(q, d: int, p):
    """Amplification margin for a depolarizing assist; returns (margin, case).

    Case 1 (p below threshold) includes the flag-technique depolarizing
    upper bound in the LHS; case 2 uses zero for the assist capacity. The
    RHS is 1 - h(q) plus the closed-form assist Holevo information.
    """
    case = depol_case(p, d)
    upper = depolarizing_upper(p, d)
    lhs = transposition_bound_closed(q, d) + np.where(
        np.asarray(case) == 1, upper, 0.0
    )
    rhs = 1.0 - binary_entropy(q) + depolarizing_assist_holevo(q, p, d)
    margin = lhs - rhs
    if np.ndim(margin) == 0:
        return float(margin), int(case)
    return margin, case


@dataclass(frozen=True)
class SweepGrid:
    """Margins over a cell-centered parameter rectangle.

    margins[i, j] is the margin at (axis1_values[i], axis2_values[j]);
    cases carries the per-cell case label for depolarizing sweeps.
    """

    kind: str
    d: int
    axis1_name: str
    axis1_values: np.ndarray
    axis2_name: str
    axis2_values: np.ndarray
    margins: np.ndarray
    cases: np.ndarray | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.margins)):
            raise ValueError("sweep produced non-finite margins")

    def to_csv(self, fh) -> None:
        """axis1-major rows with 17-significant-digit round-trip formatting."""
        header = f"{self.axis1_name},{self.axis2_name},margin"
        if self.cases is not None:
            header += ",case"
        fh.write(header + "\n")
        fmt = CSV_FLOAT_FORMAT
        for i, a1 in enumerate(self.axis1_values):
            for j, a2 in enumerate(self.axis2_values):
                row = ",".join(
                    fmt.format(v) for v in (a1, a2, self.margins[i, j])
                )
                if self.cases is not None:
                    row += f",{int(self.cases[i, j])}"
                fh.write(row + "\n")

    @staticmethod
    def from_csv(fh, kind: str = "", d: int = 0) -> "SweepGrid":
        header = fh.readline().strip().split(",")
        has_case = len(header) == 4
        a1_vals: list[float] = []
        a2_vals: list[float] = []
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            a1, a2, margin = float(parts[0]), float(parts[1]), float(parts[2])
            if not a1_vals or a1 != a1_vals[-1]:
                a1_vals.append(a1)
            if len(a1_vals) == 1:
                a2_vals.append(a2)
            rows.append((margin, int(parts[3]) if has_case else 0))
        n1, n2 = len(a1_vals), len(a2_vals)
        margins = np.array([r[0] for r in rows]).reshape(n1, n2)
        cases = (
            np.array([r[1] for r in rows]).reshape(n1, n2) if has_case else None
        )
        return SweepGrid(
            kind=kind,
            d=d,
            axis1_name=header[0],
            axis1_values=np.array(a1_vals),
            axis2_name=header[1],
            axis2_values=np.array(a2_vals),
            margins=margins,
            cases=cases,
        )


def sweep(kind: str, d: int, resolution: int) -> SweepGrid:
    """Cell-centered margin grid over the open square (0, 1)^2.

    axis1 is the assist parameter (lambda or p), axis2 is q. Rows are
    computed in parallel chunks (CAPAMP_THREADS workers) into disjoint
    slices, so the result is independent of scheduling.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if kind not in ("erasure", "depol"):
        raise ValueError(f"unknown sweep kind {kind!r}")
    axis = (np.arange(resolution) + 0.5) / resolution
    qs = axis[None, :]
    margins = np.empty((resolution, resolution))
    cases = np.empty((resolution, resolution), dtype=int) if kind == "depol" else None

    def fill(rows: range) -> None:
        a1 = axis[list(rows)][:, None]
        if kind == "erasure":
            margins[list(rows), :] = erasure_margin(qs, d, a1)
        else:
            m, c = depol_margin(qs, d, a1)
            margins[list(rows), :] = m
            cases[list(rows), :] = c

    workers = min(_threads(), resolution)
    chunks = [
        range(k * resolution // workers, (k + 1) * resolution // workers)
        for k in range(workers)
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fill, chunks))
    return SweepGrid(
        kind=kind,
        d=d,
        axis1_name="lambda" if kind == "erasure" else "p",
        axis1_values=axis,
        axis2_name="q",
        axis2_values=axis.copy(),
        margins=margins,
        cases=cases,
    )


@lru_cache(maxsize=64)
def _cached_sweep(kind: str, d: int, resolution: int) -> SweepGrid:
    return sweep(kind, d, resolution)


def min_amplification_dimension(
    kind: str,
    case: int | None = None,
    d_max: int = 12,
    resolution: int = 200,
) -> int | None:
    """Smallest shield dimension whose sweep shows a negative margin.

    For depolarizing sweeps a case filter (1 or 2) restricts the scan to
    that regime. Returns None when no dimension up to d_max qualifies.
    """
    for d in range(2, d_max + 1):
        grid = _cached_sweep(kind, d, resolution)
        mask = np.ones_like(grid.margins, dtype=bool)
        if case is not None:
            if grid.cases is None:
                raise ValueError("case filter requires a depolarizing sweep")
            mask = grid.cases == case
        if np.any(grid.margins[mask] < 0.0):
            return d
    return None


@dataclass(frozen=True)
class ApproxPrivateParams:
    """Parameters of an approximately private channel and its assists.

    epsilon: unhalved trace-norm distance to an exact pbit; c: key overlap
    (only |c| enters the bounds); d: shield dimension; lam: erasure rate;
    kappa: flag weight; big_n: assisted channel uses; n: additivity level.
    """

    epsilon: float = 0.0
    c: complex = 0.0
    d: int = 2
    lam: float = 0.5
    kappa: float = 0.1
    big_n: int = 1
    n: int = 1

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")
        if abs(self.c) > 1.0 + 1e-12:
            raise ValueError("|c| must be at most 1")
        if not (0.0 <= self.lam <= 1.0 and 0.0 <= self.kappa <= 1.0):
            raise ValueError("lam and kappa must be probabilities")
        if self.d < 2 or self.big_n < 1 or self.n < 1:
            raise ValueError("d >= 2 and positive copy counts required")

    def key_entropy(self) -> float:
        return float(binary_entropy((1.0 + abs(self.c)) / 2.0))

    def continuity_penalty(self) -> float:
        return 4.0 * self.epsilon + 2.0 * float(binary_entropy(self.epsilon))


def approx_private_lower_bound(params: ApproxPrivateParams) -> float:
    """Erasure-assisted one-shot rate floor: 1 - lam h((1+|c|)/2) - 4e - 2h(e).

    Exact (not just a bound) at epsilon = 0 for the sym/asym pbit family.
    """
    if params.epsilon > 0.5:
        raise ValueError("bound stated for epsilon <= 1/2")
    if not 0.0 < params.lam < 1.0:
        raise ValueError("erasure rate must lie in (0, 1)")
    return 1.0 - params.lam * params.key_entropy() - params.continuity_penalty()


def n_copy_lower_bound(params: ApproxPrivateParams) -> float:
    """N-use refinement 1 - lam^N h((1+|c|)/2) - 4e - 2h(e)."""
    if params.epsilon > 0.5:
        raise ValueError("bound stated for epsilon <= 1/2")
    if not 0.0 < params.lam < 1.0:
        raise ValueError("erasure rate must lie in (0, 1)")
    return (
        1.0
        - params.lam**params.big_n * params.key_entropy()
        - params.continuity_penalty()
    )


def diamond_gap_g(x: float, d: int) -> float:
    """g(x) = 8 x log2(2d(d+1)) + 4 h(x), strictly increasing on [0, 1/2]."""
    if not 0.0 <= x <= 0.5:
        raise ValueError("g is used on [0, 1/2]")
    return 8.0 * x * math.log2(2.0 * d * (d + 1.0)) + 4.0 * float(binary_entropy(x))


def diamond_gap_g_inverse(y: float, d: int, tol: float = 1e-12) -> float:
    """Bisection inverse of g on [0, 1/2]; clamps to the endpoints."""
    if y <= 0.0:
        return 0.0
    if y >= diamond_gap_g(0.5, d):
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if diamond_gap_g(mid, d) < y:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def separation_lower_bound(params: ApproxPrivateParams) -> float:
    """Diamond-distance floor to the anti-degradable set: min{g^-1(Delta), 1/2}.

    Delta is the erasure-assisted rate floor; requires the erasure assist in
    its anti-degradable regime lam in [1/2, 1). Returns 0 when Delta <= 0
    (no separation certified).
    """
    if not 0.5 <= params.lam < 1.0:
        raise ValueError("separation requires lam in [1/2, 1)")
    delta = approx_private_lower_bound(params)
    if delta <= 0.0:
        return 0.0
    return diamond_gap_g_inverse(delta, params.d)


def superactivation_N_threshold(params: ApproxPrivateParams) -> int:
    """Smallest number of assisted uses activating the flagged channel pair.

    The smallest integer strictly above
    [log2(1 - 2h(e) - 4e - kappa/(1-kappa)) - log2(h((1+|c|)/2))] / log2(lam);
    the logarithm base cancels in the ratio. Raises InfeasibleParams when
    the flag weight already swallows the continuity-adjusted rate or the
    key overlap leaves no key entropy.
    """
    if not 0.0 < params.kappa < 0.5:
        raise InfeasibleParams("flag weight must lie in (0, 1/2)")
    if not 0.0 < params.lam < 1.0:
        raise ValueError("erasure rate must lie in (0, 1)")
    headroom = (
        1.0
        - params.continuity_penalty()
        - params.kappa / (1.0 - params.kappa)
    )
    if headroom <= 0.0:
        raise InfeasibleParams("continuity losses plus flag weight exceed the rate")
    key_h = params.key_entropy()
    if key_h <= 0.0:
        raise InfeasibleParams("unit key overlap leaves no activation entropy")
    threshold = (math.log2(headroom) - math.log2(key_h)) / math.log2(params.lam)
    return max(1, math.floor(threshold) + 1)


def additivity_lambda(kappa: float, n: int) -> float:
    """Erasure rate (1 + kappa^n)^(-1/n) forcing one-shot additivity to zero
    at every level up to n; always at least 1/2.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be positive")
    return float((1.0 + kappa**n) ** (-1.0 / n))


def flag_additivity_margin(kappa: float, lam: float, n: int, ell: int) -> float:
    """Coefficient 1 - lam^(n-ell) - kappa^ell lam^(n-ell) of the input entropy
    in the mixed-level case analysis; nonpositive certifies that level.
    """
    if not 0.0 <= kappa <= 1.0 or not 0.0 <= lam <= 1.0:
        raise ValueError("kappa and lam must be probabilities")
    if not 1 <= ell <= n - 1:
        raise ValueError("ell must lie in [1, n-1]")
    return 1.0 - lam ** (n - ell) - kappa**ell * lam ** (n - ell)


@dataclass(frozen=True)
class SuperactivationPlan:
    kappa: float
    lam: float
    big_n: int
    zero_level_margins: tuple[float, ...]
    activation_value: float


def superactivation_plan(
    epsilon: float, n: int, c: complex = 0.0, kappa_step: float = 1e-4
) -> SuperactivationPlan:
    """Choose (kappa, lambda, N) certifying zero rate at level n and a
    positive rate at level N.

    kappa is the largest grid multiple of ``kappa_step`` in (0, 1/2) that
    leaves positive headroom after the continuity penalty; lambda is the
    additivity-forcing erasure rate for (kappa, n); N comes from the integer
    threshold. The returned certificates are the per-level additivity
    margins (all nonpositive) and the flag-adjusted N-use rate (positive).
    """
    probe = ApproxPrivateParams(epsilon=epsilon, c=c, kappa=0.25)
    budget = 1.0 - probe.continuity_penalty()
    if budget <= 0.0:
        raise InfeasibleParams("epsilon too large: continuity penalty eats the rate")
    # kappa/(1-kappa) < budget, i.e. kappa < budget/(1+budget), capped below 1/2.
    cap = min(0.5, budget / (1.0 + budget))
    k_steps = math.ceil(cap / kappa_step) - 1
    kappa = k_steps * kappa_step
    while kappa > 0.0 and (
        kappa >= cap or budget - kappa / (1.0 - kappa) <= 0.0
    ):
        kappa -= kappa_step
    if kappa <= 0.0:
        raise InfeasibleParams("no feasible flag weight on the grid")
    lam = additivity_lambda(kappa, n)
    params = ApproxPrivateParams(epsilon=epsilon, c=c, lam=lam, kappa=kappa, n=n)
    big_n = superactivation_N_threshold(params)
    margins = tuple(
        flag_additivity_margin(kappa, lam, n, ell) for ell in range(1, n)
    )
    if any(m > 0.0 for m in margins):
        raise InfeasibleParams("additivity margins failed to certify zero rate")
    run = ApproxPrivateParams(
        epsilon=epsilon, c=c, lam=lam, kappa=kappa, big_n=big_n, n=n
    )
    activation = (1.0 - kappa) * n_copy_lower_bound(run) - kappa
    if activation <= 0.0:
        raise InfeasibleParams("activation certificate is not positive")
    return SuperactivationPlan(
        kappa=kappa,
        lam=lam,
        big_n=big_n,
        zero_level_margins=margins,
        activation_value=activation,
    )
