import io
import math

import numpy as np
import pytest

from capamp import matcore, thresholds
from capamp.errors import InfeasibleParams
from capamp.thresholds import ApproxPrivateParams


def test_erasure_margin_spot_values():
    h = matcore.binary_entropy
    assert np.isclose(
        thresholds.erasure_margin(0.75, 2, 0.5),
        np.log2(1.5) - (1 - 0.5 * h(0.75)),
        atol=1e-12,
    )
    assert np.isclose(
        thresholds.erasure_margin(2 / 3, 3, 0.5),
        np.log2(4 / 3) - (1 - 0.5 * h(2 / 3)),
        atol=1e-12,
    )
    assert np.isclose(thresholds.erasure_margin(0.75, 2, 0.5), -0.0094, atol=1e-4)
    assert np.isclose(thresholds.erasure_margin(2 / 3, 3, 0.5), -0.1258, atol=1e-4)
    # perfect assist leaves no amplification margin
    assert thresholds.erasure_margin(0.5, 2, 0.0) > 0


def test_depol_margin_case_labels():
    d = 2
    threshold = d / (2 * (d + 1))
    _, case_low = thresholds.depol_margin(0.5, d, threshold - 1e-6)
    _, case_high = thresholds.depol_margin(0.5, d, threshold + 1e-6)
    assert case_low == 1 and case_high == 2
    margin, case = thresholds.depol_margin(0.3, 2, 0.0)
    assert case == 1
    assert margin > 0  # noiseless assist cannot be amplified


def test_depol_margin_positive_at_p_zero_grid():
    qs = np.linspace(0.05, 0.95, 10)
    for d in (2, 3, 5):
        margins, cases = thresholds.depol_margin(qs, d, np.zeros_like(qs))
        assert np.all(margins > 0)
        assert np.all(cases == 1)


def test_sweep_grids():
    grid = thresholds.sweep("erasure", 2, 50)
    assert grid.margins.shape == (50, 50)
    assert np.all(np.isfinite(grid.margins))
    assert np.any(grid.margins < 0)
    depol = thresholds.sweep("depol", 4, 50)
    assert depol.cases is not None
    assert not np.any(depol.margins < 0)
    with pytest.raises(ValueError):
        thresholds.sweep("erasure", 2, 1)
    with pytest.raises(ValueError):
        thresholds.sweep("unknown", 2, 10)


def test_sweep_csv_roundtrip():
    grid = thresholds.sweep("depol", 3, 7)
    buf = io.StringIO()
    grid.to_csv(buf)
    buf.seek(0)
    back = thresholds.SweepGrid.from_csv(buf, kind="depol", d=3)
    assert np.array_equal(back.margins, grid.margins)
    assert np.array_equal(back.cases, grid.cases)
    assert np.array_equal(back.axis1_values, grid.axis1_values)
    assert back.axis1_name == "p" and back.axis2_name == "q"


def test_sweep_thread_count_does_not_change_bytes(monkeypatch):
    outputs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("CAPAMP_THREADS", threads)
        buf = io.StringIO()
        thresholds.sweep("erasure", 2, 23).to_csv(buf)
        outputs.append(buf.getvalue())
    assert outputs[0] == outputs[1]


def test_erasure_margin_grid_smoothness():
    # adjacent-cell jumps stay bounded away from the interval endpoints
    grid = thresholds.sweep("erasure", 2, 100)
    step_q = np.abs(np.diff(grid.margins, axis=1)).max()
    step_lam = np.abs(np.diff(grid.margins, axis=0)).max()
    assert step_q < 0.1 and step_lam < 0.1


def test_min_amplification_dimension_erasure():
    assert thresholds.min_amplification_dimension("erasure", d_max=3, resolution=200) == 2
    assert (
        thresholds.min_amplification_dimension("depol", case=2, d_max=3, resolution=50)
        is None
    )


def test_approx_private_lower_bound_values():
    h = matcore.binary_entropy
    val = thresholds.approx_private_lower_bound(
        ApproxPrivateParams(epsilon=0.0, c=0.5, lam=0.9)
    )
    assert np.isclose(val, 1 - 0.9 * h(0.75), atol=1e-12)
    assert np.isclose(val, 0.2698496879867804, atol=1e-9)
    # unit key overlap leaves no key entropy, so the erasure term drops
    unit = thresholds.approx_private_lower_bound(
        ApproxPrivateParams(epsilon=0.0, c=1.0, lam=0.3)
    )
    assert np.isclose(unit, 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        thresholds.approx_private_lower_bound(ApproxPrivateParams(epsilon=0.6, lam=0.5))


def test_n_copy_lower_bound():
    base = ApproxPrivateParams(epsilon=0.0, c=0.5, lam=0.7, big_n=1)
    assert np.isclose(
        thresholds.n_copy_lower_bound(base),
        thresholds.approx_private_lower_bound(base),
        atol=1e-15,
    )
    vals = [
        thresholds.n_copy_lower_bound(
            ApproxPrivateParams(epsilon=0.0, c=0.5, lam=0.7, big_n=n)
        )
        for n in range(1, 30)
    ]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1.0
    eps_vals = [
        thresholds.n_copy_lower_bound(
            ApproxPrivateParams(epsilon=e, c=0.5, lam=0.7, big_n=3)
        )
        for e in (0.0, 0.05, 0.1, 0.2)
    ]
    assert all(b <= a for a, b in zip(eps_vals, eps_vals[1:]))
    # arithmetic from the stated formula at the activation point
    lam = thresholds.additivity_lambda(0.1, 3)
    val = thresholds.n_copy_lower_bound(
        ApproxPrivateParams(epsilon=0.0, c=0.0, lam=lam, big_n=354)
    )
    assert np.isclose(val, 1.0 - lam**354, atol=1e-12)
    assert np.isclose(val, 0.11125215352207824, atol=1e-9)


def test_diamond_gap_inverse():
    for d in (2, 3):
        for y in (0.05, 0.2, 0.45):
            x = thresholds.diamond_gap_g_inverse(y, d)
            assert abs(thresholds.diamond_gap_g(x, d) - y) < 1e-9
    assert thresholds.diamond_gap_g_inverse(0.0, 2) == 0.0
    assert thresholds.diamond_gap_g_inverse(1e9, 2) == 0.5


def test_separation_lower_bound():
    params = ApproxPrivateParams(epsilon=0.0, c=0.5, lam=0.5, d=2)
    delta = thresholds.approx_private_lower_bound(params)
    assert delta > 0
    sep = thresholds.separation_lower_bound(params)
    assert 0 < sep < 0.5
    assert np.isclose(thresholds.diamond_gap_g(sep, 2), delta, atol=1e-9)
    # heavy approximation error kills the certificate
    dead = ApproxPrivateParams(epsilon=0.2, c=0.0, lam=0.5, d=2)
    assert thresholds.separation_lower_bound(dead) == 0.0
    with pytest.raises(ValueError):
        thresholds.separation_lower_bound(
            ApproxPrivateParams(epsilon=0.0, c=0.5, lam=0.3, d=2)
        )


def test_superactivation_threshold_cases():
    lam = thresholds.additivity_lambda(0.1, 3)
    n_star = thresholds.superactivation_N_threshold(
        ApproxPrivateParams(epsilon=0.0, c=0.0, lam=lam, kappa=0.1)
    )
    assert n_star == 354
    # tiny flag weight: the first use already activates
    small = thresholds.superactivation_N_threshold(
        ApproxPrivateParams(epsilon=0.0, c=0.0, lam=0.9, kappa=1e-6)
    )
    assert small == 1
    with pytest.raises(InfeasibleParams):
        thresholds.superactivation_N_threshold(
            ApproxPrivateParams(epsilon=0.0, c=1.0, lam=0.9, kappa=0.1)
        )
    with pytest.raises(InfeasibleParams):
        thresholds.superactivation_N_threshold(
            ApproxPrivateParams(epsilon=0.2, c=0.0, lam=0.9, kappa=0.4)
        )


def test_superactivation_threshold_base_invariance():
    params = ApproxPrivateParams(epsilon=0.01, c=0.3, lam=0.98, kappa=0.2)
    implementation = thresholds.superactivation_N_threshold(params)
    headroom = 1 - params.continuity_penalty() - params.kappa / (1 - params.kappa)
    ratio_nat = (math.log(headroom) - math.log(params.key_entropy())) / math.log(
        params.lam
    )
    assert implementation == max(1, math.floor(ratio_nat) + 1)


def test_additivity_lambda():
    assert np.isclose(thresholds.additivity_lambda(0.1, 3), 0.9996670, atol=1e-6)
    assert np.isclose(thresholds.additivity_lambda(0.3, 1), 1 / 1.3, atol=1e-12)
    for kappa in (0.05, 0.2, 0.8):
        for n in (1, 2, 5):
            lam = thresholds.additivity_lambda(kappa, n)
            assert lam >= 0.5
            assert lam >= 2.0 ** (-1.0 / n) - 1e-12
            assert lam < 1.0


def test_flag_additivity_margin_endpoints():
    assert np.isclose(thresholds.flag_additivity_margin(0.3, 1.0, 4, 2), -0.09)
    assert thresholds.flag_additivity_margin(0.3, 0.0, 4, 2) == 1.0
    with pytest.raises(ValueError):
        thresholds.flag_additivity_margin(0.3, 0.5, 4, 4)


def test_superactivation_plan():
    plan = thresholds.superactivation_plan(0.0, 3, 0.0)
    assert 0 < plan.kappa < 0.5
    assert 0.5 <= plan.lam < 1
    assert plan.big_n >= 1
    assert plan.activation_value > 0
    assert all(m <= 0 for m in plan.zero_level_margins)
    with pytest.raises(InfeasibleParams):
        thresholds.superactivation_plan(0.25, 2, 0.0)


def test_threshold_monotone_in_lambda():
    # smaller flag weight forces lambda closer to 1 and a larger threshold
    results = []
    for kappa in (0.2, 0.1, 0.05):
        lam = thresholds.additivity_lambda(kappa, 3)
        results.append(
            (
                lam,
                thresholds.superactivation_N_threshold(
                    ApproxPrivateParams(epsilon=0.0, c=0.0, lam=lam, kappa=kappa)
                ),
            )
        )
    lams = [r[0] for r in results]
    thresholds_found = [r[1] for r in results]
    assert lams[0] < lams[1] < lams[2]
    assert thresholds_found[0] < thresholds_found[1] < thresholds_found[2]


def test_params_validation():
    with pytest.raises(ValueError):
        ApproxPrivateParams(epsilon=-0.1)
    with pytest.raises(ValueError):
        ApproxPrivateParams(c=1.5)
    with pytest.raises(ValueError):
        ApproxPrivateParams(lam=1.2)
    with pytest.raises(ValueError):
        ApproxPrivateParams(d=1)
