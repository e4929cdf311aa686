import math
import random

import numpy as np
import pytest

from rwcomplex import rng
from rwcomplex.perturbation import (add_one_cost, canonical_tau_pair,
                                    estimate_addone_mean,
                                    estimate_delta_tilde, estimate_gamma,
                                    estimate_rho_probe,
                                    estimate_variance_and_J,
                                    local_add_one_cost, randomized_derivative,
                                    StabilizationEstimate)
from rwcomplex.sampling import (ForcedBits, ModelParams, PairedSample,
                                WeightDistribution, sample_complex)
from rwcomplex.simplices import WeightedComplex, faces, rank_colex
from rwcomplex.statistics import Statistic, make_statistic


def _params(n=8, d=2, p=0.25, mean=2.0):
    return ModelParams(n, d, p, WeightDistribution("exponential", mean))


def test_randomized_derivative_zero_when_copies_agree():
    # if both presence copies at tau are 0 the resampled pair coincides
    params = _params()
    tau = (0, 1, 2)
    r = rank_colex(tau)
    s = PairedSample(params, 5, ForcedBits(b={r: 0}, b_prime={r: 0}))
    for spec in ("nn-alpha:1.0", "isolated", "cocycle:3"):
        f = make_statistic(spec, params)
        assert randomized_derivative(f, s, [], tau) == 0.0


def test_randomized_derivative_isolated_edge():
    # adding one edge to an empty graph un-isolates its two endpoints
    n = 7
    params = ModelParams(n, 1, 1e-9, WeightDistribution("constant", 1.0))
    tau = (0, 1)
    r = rank_colex(tau)
    s = PairedSample(params, 3, ForcedBits(b={r: 0}, b_prime={r: 1}))
    f = make_statistic("isolated", params)
    assert randomized_derivative(f, s, [], tau) == 2.0


def test_randomized_derivative_rejects_tau_in_F():
    params = _params()
    f = make_statistic("isolated", params)
    s = PairedSample(params, 1)
    with pytest.raises(ValueError):
        randomized_derivative(f, s, [0], 0)


def test_add_one_cost_isolated_on_empty():
    params = _params(n=7, d=2)
    f = make_statistic("isolated", params)
    empty = WeightedComplex(7, 2, np.array([], dtype=np.int64), np.array([]))
    assert add_one_cost(f, empty, (0, 1, 2), 1.0) == -(2 + 1)


def test_add_one_cost_cocycle_all_faces_maximal():
    # when every face of tau is uncovered, adding tau merges d+1 singleton
    # components into one simplex: cocycle count drops by exactly 1
    params = _params(n=8, d=2)
    f = make_statistic("cocycle:3", params)
    empty = WeightedComplex(8, 2, np.array([], dtype=np.int64), np.array([]))
    assert add_one_cost(f, empty, (2, 4, 6), 1.0) == -1.0


def test_add_one_cost_nn_alpha_saturated():
    # tau's weight above alpha and all its faces already covered below
    # alpha: the per-face minima cannot change
    n, d, alpha = 6, 1, 1.0
    params = ModelParams(n, d, 0.5, WeightDistribution("exponential", 1.0))
    f = make_statistic("nn-alpha:%g" % alpha, params)
    # a triangle of light edges covering vertices 0,1,2; heavy tau = (0,1)
    ranks = sorted(rank_colex(e) for e in [(0, 1), (0, 2), (1, 2)])
    X = WeightedComplex(n, d, np.array(ranks), np.array([0.1, 0.2, 0.3]))
    assert add_one_cost(f, X, (0, 1), 5.0) == 0.0


def test_local_equals_global_for_large_k():
    for seed in range(30):
        params = _params()
        X = sample_complex(params, seed)
        tau, _ = canonical_tau_pair(params.n, params.d)
        w = 1.3
        for spec in ("nn-alpha:2.0", "isolated", "cocycle:2",
                     "local:isolated:1"):
            f = make_statistic(spec, params)
            want = add_one_cost(f, X, tau, w)
            got = local_add_one_cost(f, X, tau, w, k=50)
            assert got == want, (seed, spec)


def test_local_add_one_cost_k0_vanishes():
    params = _params()
    f = make_statistic("nn-alpha:1.0", params)
    X = sample_complex(params, 11)
    tau, _ = canonical_tau_pair(params.n, params.d)
    assert local_add_one_cost(f, X, tau, 0.7, k=0) == 0.0


def test_lipschitz_envelopes():
    # |Delta_tau f| <= 1[b v b' = 1] H and |D_tau f| <= H for constant-H
    # statistics, over random instances
    params = _params(n=7, d=2, p=0.4)
    tau, _ = canonical_tau_pair(7, 2)
    r = rank_colex(tau)
    stats = [make_statistic(s, params)
             for s in ("nn-alpha:1.5", "isolated", "cocycle:2", "betti:2",
                       "local:isolated:1", "local:cocycle-ratio:2")]
    for seed in range(200):
        s = PairedSample(params, seed)
        b, w, bp, wp = s.quadruple(np.array([r]))
        X = s.complex()
        for f in stats:
            H = f.lipschitz_H
            delta = abs(randomized_derivative(f, s, [], tau))
            if not (b[0] or bp[0]):
                assert delta == 0.0
            assert delta <= H + 1e-12
            assert abs(add_one_cost(f, X, tau, float(w[0]))) <= H + 1e-12


def test_two_scale_exact_zero():
    params = _params()
    f = make_statistic("nn-alpha:1.5", params)
    est = estimate_delta_tilde(f, params, k=1, replicas=60, seed=17)
    assert est.point_estimate == 0.0 and est.std_error == 0.0
    g = make_statistic("local:cocycle-ratio:1", params)
    est = estimate_delta_tilde(g, params, k=2, replicas=60, seed=17)
    assert est.point_estimate == 0.0 and est.std_error == 0.0


def test_delta_positive_at_k0():
    params = ModelParams(12, 2, 2.0 / 12.0,
                         WeightDistribution("constant", 1.0))
    f = make_statistic("cocycle:3", params)
    est = estimate_delta_tilde(f, params, k=0, replicas=200, seed=4)
    assert est.point_estimate - 3 * est.std_error > 0.0


def test_estimate_determinism():
    params = _params()
    f = make_statistic("cocycle:2", params)
    a = estimate_delta_tilde(f, params, k=1, replicas=40, seed=9)
    b = estimate_delta_tilde(f, params, k=1, replicas=40, seed=9)
    assert a == b
    g1 = estimate_gamma(params, 2, 100, 9)
    g2 = estimate_gamma(params, 2, 100, 9)
    assert g1 == g2


def test_delta_randomized_variant_runs():
    params = _params()
    f = make_statistic("isolated", params)
    est = estimate_delta_tilde(f, params, k=1, replicas=40, seed=2,
                               randomized=True)
    assert est.point_estimate >= 0.0
    assert "b+b'" in est.conditioning


def test_rho_probe_zero_when_costs_vanish():
    params = _params()
    f = make_statistic("nn-alpha:1.0", params)
    est = estimate_rho_probe(f, params, k=0, F=[], F_prime=[], replicas=50,
                             seed=6)
    assert est.point_estimate == 0.0 and est.std_error == 0.0


def test_rho_probe_rejects_bad_F():
    params = _params()
    f = make_statistic("isolated", params)
    tau, _ = canonical_tau_pair(params.n, params.d)
    with pytest.raises(ValueError):
        estimate_rho_probe(f, params, 1, [rank_colex(tau)], [], 10, 0)


def test_forced_bits_match_rejection_sampling():
    # conditioning by forcing a presence bit must agree with rejection
    params = _params(n=7, d=2, p=0.5)
    f = make_statistic("isolated", params)
    target = 3  # condition on b at rank 3 being 1
    m = 400
    forced_vals = np.empty(m)
    for i in range(m):
        s = PairedSample(params, rng.child_seed(1000, i),
                         ForcedBits(b={target: 1}))
        forced_vals[i] = f.evaluate(s.complex())
    reject_vals = []
    i = 0
    while len(reject_vals) < m:
        s = PairedSample(params, rng.child_seed(2000, i))
        i += 1
        if bool(s.presence(np.array([target]))[0]):
            reject_vals.append(f.evaluate(s.complex()))
    reject_vals = np.array(reject_vals)
    se = math.sqrt(forced_vals.var(ddof=1) / m + reject_vals.var(ddof=1) / m)
    assert abs(forced_vals.mean() - reject_vals.mean()) < 3 * se


def test_variance_and_J():
    params = _params()
    f = make_statistic("nn-alpha:1.5", params)
    var_est, j_est = estimate_variance_and_J(f, params, 300, seed=8)
    assert var_est.point_estimate > 0
    assert j_est.point_estimate == max(1.0, (3 * 1.5) ** 6)
    assert j_est.std_error == 0.0
    # a constant statistic has zero variance
    const = Statistic("const", lambda X: 4.2, 0.0)
    var_est, j_est = estimate_variance_and_J(const, params, 50, seed=8)
    assert var_est.point_estimate == 0.0
    assert j_est.point_estimate == 1.0


def test_estimate_addone_mean_runs():
    params = _params()
    f = make_statistic("cocycle:3", params)
    est = estimate_addone_mean(f, params, 100, seed=12)
    assert est.quantity == "addone_mean"
    assert est.point_estimate <= 0.0  # adding a simplex never adds cocycles


def test_stabilization_estimate_validation():
    params = _params()
    with pytest.raises(ValueError):
        StabilizationEstimate("gamma", 0.0, 0.0, 1, params)
