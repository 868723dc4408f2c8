#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mesodpp/gauss.hpp"
#include "mesodpp/sampling.hpp"
#include "mesodpp/statistics.hpp"

using namespace meso;
using std::numbers::pi;

TEST_CASE("tridiag_eigenvalues: closed-form cases") {
    std::vector<double> d1{3.7};
    CHECK(tridiag_eigenvalues(d1, {}) == std::vector<double>{3.7});

    std::vector<double> d2{0.0, 0.0}, e2{1.0};
    auto ev = tridiag_eigenvalues(d2, e2);
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> bad{1.0, 2.0};
    CHECK_THROWS_AS(tridiag_eigenvalues(bad, bad), std::invalid_argument);
}

TEST_CASE("tridiag_eigenvalues matches the Sturm bisection oracle") {
    Rng rng(SeedStream{123, 0});
    const int n = 50;
    std::vector<double> d(n), e(n - 1);
    for (auto& v : d) v = rng.uniform(-2.0, 2.0);
    for (auto& v : e) v = rng.uniform(0.05, 1.5);
    auto ev = tridiag_eigenvalues(d, e);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    // five random ranks verified against bisection to 1e-10
    for (int rank : {0, 13, 24, 37, 49}) {
        const double ref = sturm_bisect_eigenvalue(d, e, rank);
        CHECK(std::abs(ev[rank] - ref) < 1e-10);
    }
    // the sign count recognizes each eigenvalue's rank
    for (int rank : {5, 20, 44}) {
        CHECK(sturm_count(d, e, ev[rank] - 1e-8) <= rank);
        CHECK(sturm_count(d, e, ev[rank] + 1e-8) >= rank + 1);
    }
}

TEST_CASE("symmetric_eigenvalues on a known matrix") {
    // eigenvalues of [[2,1,0],[1,3,1],[0,1,4]] via its characteristic cubic
    std::vector<double> A{2, 1, 0, 1, 3, 1, 0, 1, 4};
    auto ev = symmetric_eigenvalues(A, 3);
    std::vector<double> d{2, 3, 4}, e{1, 1};
    auto ref = tridiag_eigenvalues(d, e);
    for (int i = 0; i < 3; ++i) CHECK(ev[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    double trace = 0.0;
    for (double v : ev) trace += v;
    CHECK(trace == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("sample_gue N=1 is Normal(0, 1/2)") {
    const int M = 4000;
    std::vector<double> draws(M);
    for (int i = 0; i < M; ++i) draws[i] = sample_gue(1, SeedStream{5, (std::uint64_t)i}).points[0];
    std::sort(draws.begin(), draws.end());
    auto cdf = [](double x) { return 0.5 * (1.0 + std::erf(x)); };  // variance 1/2
    CHECK(ks_distance(draws, cdf) < 0.035);
}

TEST_CASE("sample_gue N=2000 follows the semicircle") {
    auto cfg = sample_gue(2000, SeedStream{42, 0});
    CHECK((int)cfg.points.size() == 2000);
    CHECK(std::is_sorted(cfg.points.begin(), cfg.points.end()));
    EquilibriumMeasure sc = semicircle();
    CHECK(ks_distance(cfg.points, [&](double x) { return sc.cdf(x) + 0.5; }) < 0.05);
    // points far outside the support are astronomically rare
    CHECK(cfg.points.front() > -3.0);
    CHECK(cfg.points.back() < 3.0);
}

TEST_CASE("sampler determinism is bit-for-bit") {
    auto a = sample_gue(64, SeedStream{9, 7});
    auto b = sample_gue(64, SeedStream{9, 7});
    CHECK(a.points == b.points);
    auto c = sample_gue(64, SeedStream{9, 8});
    CHECK(a.points != c.points);

    auto u = sample_cue(32, SeedStream{9, 7});
    auto v = sample_cue(32, SeedStream{9, 7});
    CHECK(u.points == v.points);
}

TEST_CASE("GUE sampler mean matches the kernel trace") {
    const int N = 50, M = 2000;
    const TestFunction f = bump();
    std::vector<double> stats(M);
    for (int i = 0; i < M; ++i)
        stats[i] = linear_statistic(sample_gue(N, SeedStream{31, (std::uint64_t)i}), f, 0.0, 0.5);
    double mean = 0.0, var = 0.0;
    for (double s : stats) mean += s;
    mean /= M;
    for (double s : stats) var += (s - mean) * (s - mean);
    var /= (M - 1);
    const double se = std::sqrt(var / M);
    const double c1 = cumulant_trace(gue_projection(N), f, 0.0, 0.5, 1);
    CHECK(std::abs(mean - c1) <= 4.0 * se);
}

TEST_CASE("GUE sampler variance matches variance_exact within 5 relative SE") {
    const int N = 30, M = 20000;
    const TestFunction f = bump();
    std::vector<double> stats(M);
    parallel_for(M, default_threads(), [&](std::size_t i) {
        stats[i] = linear_statistic(sample_gue(N, SeedStream{77, i}), f, 0.0, 0.5);
    });
    KStatistics k = empirical_cumulants(stats);
    const double vex = variance_exact(gue_projection(N), f, 0.0, 0.5);
    CHECK(std::abs(k.k2 - vex) <= 5.0 * k.se2);
}

TEST_CASE("HKPV rank-one chebyshev draws from the weight itself") {
    const int M = 3000;
    std::vector<double> draws(M);
    for (int i = 0; i < M; ++i)
        draws[i] = sample_chebyshev(1, SeedStream{11, (std::uint64_t)i}).points[0];
    std::sort(draws.begin(), draws.end());
    // density w0 = sqrt(1-x^2)/pi normalized by mass 1/2
    auto cdf = [](double x) { return (x * std::sqrt(1.0 - x * x) + std::asin(x)) / pi + 0.5; };
    CHECK(ks_distance(draws, cdf) < 0.04);
}

TEST_CASE("HKPV equilibrium laws at moderate size") {
    std::vector<double> pooled;
    for (int i = 0; i < 4; ++i) {
        auto cfg = sample_cue(200, SeedStream{13, (std::uint64_t)i});
        CHECK((int)cfg.points.size() == 200);
        pooled.insert(pooled.end(), cfg.points.begin(), cfg.points.end());
    }
    std::sort(pooled.begin(), pooled.end());
    CHECK(ks_distance(pooled, [](double x) { return x / (2.0 * pi); }) < 0.05);

    pooled.clear();
    EquilibriumMeasure as = arcsine();
    for (int i = 0; i < 4; ++i) {
        auto cfg = sample_chebyshev(200, SeedStream{14, (std::uint64_t)i});
        pooled.insert(pooled.end(), cfg.points.begin(), cfg.points.end());
    }
    std::sort(pooled.begin(), pooled.end());
    CHECK(ks_distance(pooled, [&](double x) { return as.cdf(x) + 0.5; }) < 0.05);
}

TEST_CASE("CUE sampler mean matches (N/2pi) int f") {
    const int N = 64, M = 500;
    const TestFunction f = bump();
    const double th0 = 3.0;
    std::vector<double> stats(M);
    parallel_for(M, default_threads(), [&](std::size_t i) {
        stats[i] = linear_statistic(sample_cue(N, SeedStream{18, i}), f, th0, 0.0);
    });
    double mean = 0.0, var = 0.0;
    for (double s : stats) mean += s;
    mean /= M;
    for (double s : stats) var += (s - mean) * (s - mean);
    var /= (M - 1);
    // rotation invariance: E[sum f(theta_k - th0)] = (N/2pi) int f
    const double expect =
        N / (2.0 * pi) * integrate_panels(-1.0, 1.0, 2, [&](double u) { return f(u); });
    CHECK(std::abs(mean - expect) <= 4.0 * std::sqrt(var / M));
}

TEST_CASE("CUE pair correlation dips below the Poisson level at distance pi/N") {
    const int N = 64, M = 500;
    const double lo = 0.5 * pi / N, hi = 1.5 * pi / N;
    long count = 0;
    for (int s = 0; s < M; ++s) {
        auto cfg = sample_cue(N, SeedStream{15, (std::uint64_t)s});
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                if (i == j) continue;
                double d = std::abs(std::remainder(cfg.points[i] - cfg.points[j], 2.0 * pi));
                if (d > lo && d < hi) ++count;
            }
    }
    // ordered-pair expectation: 2 * 2pi * int_B rho_2(s) ds (B on both sides)
    const double poisson = 2.0 * M * 2.0 * pi * (hi - lo) * N * N / (4.0 * pi * pi);
    const double dpp =
        2.0 * M * 2.0 * pi *
        integrate_panels(lo, hi, 2, [&](double s) {
            const double k = cue_kernel(N, s, 0.0);
            return N * N / (4.0 * pi * pi) - k * k;
        });
    CHECK(dpp < poisson);
    CHECK((double)count < poisson - 4.0 * std::sqrt(poisson));
    CHECK(std::abs((double)count - dpp) < 5.0 * std::sqrt(dpp));
}

TEST_CASE("HKPV two-point correlation is unbiased at N=2") {
    const int M = 20000;
    const int cells = 4;
    const double lo = -0.9, hi = 0.9, w = (hi - lo) / cells;
    std::vector<long> count(cells * cells, 0);
    for (int s = 0; s < M; ++s) {
        auto cfg = sample_chebyshev(2, SeedStream{16, (std::uint64_t)s});
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (a == b) continue;
                const double x = cfg.points[a], y = cfg.points[b];
                if (x <= lo || x >= hi || y <= lo || y >= hi) continue;
                const int i = (int)((x - lo) / w), j = (int)((y - lo) / w);
                ++count[i * cells + j];
            }
    }
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            PanelGrid gx = panel_grid(lo + i * w, lo + (i + 1) * w, 1, 60);
            PanelGrid gy = panel_grid(lo + j * w, lo + (j + 1) * w, 1, 60);
            double expect = 0.0;
            for (std::size_t a = 0; a < gx.size(); ++a)
                for (std::size_t b = 0; b < gy.size(); ++b) {
                    const double kxx = chebyshev_kernel(2, gx.x[a], gx.x[a]);
                    const double kyy = chebyshev_kernel(2, gy.x[b], gy.x[b]);
                    const double kxy = chebyshev_kernel(2, gx.x[a], gy.x[b]);
                    expect += gx.w[a] * gy.w[b] * (kxx * kyy - kxy * kxy);
                }
            expect *= M;
            CHECK(std::abs((double)count[i * cells + j] - expect) <=
                  5.0 * std::sqrt(expect + 1.0));
        }
}

TEST_CASE("sample_projection_dpp rejects non-basis families") {
    CHECK_THROWS_AS(sample_projection_dpp(gue_projection(10), SeedStream{1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_projection_dpp(sine_projection(1.0), SeedStream{1, 0}),
                    std::invalid_argument);
}

TEST_CASE("HKPV works on a constructed modified-Jacobi basis") {
    auto basis = std::make_shared<OrthonormalBasis>(
        jacobi_modified_basis(0.5, 0.5, [](double x) { return 1.0 + 0.25 * x * x; }, 40));
    auto cfg = sample_projection_dpp(generic_cd_projection(basis, 40), SeedStream{17, 0});
    CHECK((int)cfg.points.size() == 40);
    CHECK(std::is_sorted(cfg.points.begin(), cfg.points.end()));
    for (double p : cfg.points) CHECK(std::abs(p) < 1.0);
}

TEST_CASE("dump format: header then one configuration per line") {
    std::vector<PointConfiguration> cs{sample_gue(4, SeedStream{3, 0}),
                                       sample_gue(4, SeedStream{3, 1})};
    const std::string text = dump_configurations(cs);
    CHECK(text.rfind("# ensemble=gue N=4 seed=3 stream=0\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(std::count(text.begin(), text.end(), ',') == 2 * 3);
    CHECK(dump_configurations(cs) == text);
}
