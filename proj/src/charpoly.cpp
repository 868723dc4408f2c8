#include "mesodpp/charpoly.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mesodpp/gauss.hpp"

namespace meso {

using std::numbers::pi;

double g_t_value(double t, double eta, double x) {
    if (!(eta > 0.0)) throw std::invalid_argument("g_t: eta must be positive");
    const double dx = x - t;
    return 0.5 * std::log((dx * dx + eta * eta) / (x * x + eta * eta));
}

std::complex<double> g_t_fourier(double t, double eta, double u) {
    if (!(eta > 0.0)) throw std::invalid_argument("g_t_fourier: eta must be positive");
    if (std::abs(u) < 1e-12) {
        // series limit: (1 - e^{-2 pi i u t})/(2|u|) -> i pi t sgn(u)
        return std::complex<double>(0.0, pi * t * (std::signbit(u) ? -1.0 : 1.0));
    }
    const std::complex<double> osc =
        1.0 - std::exp(std::complex<double>(0.0, -2.0 * pi * u * t));
    return osc * std::exp(-2.0 * pi * std::abs(u) * eta) / (2.0 * std::abs(u));
}

double g_t_fourier_inverse(double t, double eta, double x) {
    // 2 Re int_0^inf e^{2 pi i u x} ghat(u) du; absolutely convergent for eta>0,
    // integrated in oscillation-resolving slices of the e^{2 pi i u .} phases.
    const double U = 5.0 / eta;  // e^{-2 pi eta U} ~ 2e-14
    const double omega = 2.0 * pi * (std::abs(x) + std::abs(x - t) + 1.0);
    const int panels = panels_for_oscillation(0.0, U, omega, 200);
    return integrate_panels(0.0, U, panels, [&](double u) {
        return (std::cos(2.0 * pi * u * x) - std::cos(2.0 * pi * u * (x - t))) *
               std::exp(-2.0 * pi * eta * u) / u;
    }, 200);
}

TestFunction g_t_function(double t, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("g_t_function: eta must be positive");
    TestFunction f;
    f.f = [t, eta](double x) { return g_t_value(t, eta, x); };
    const double span = 50.0 * (std::abs(t) + eta + 1.0);
    f.support_lo = -span;
    f.support_hi = span;
    f.compact = false;
    f.smoothness = Smoothness::h_half_only;
    f.fourier = [t, eta](double u) { return g_t_fourier(t, eta, u); };
    f.name = "g_t(t=" + std::to_string(t) + ",eta=" + std::to_string(eta) + ")";
    return f;
}

double w_statistic(const PointConfiguration& config, double t, double eta, double x0,
                   double alpha) {
    if (config.points.empty()) throw std::invalid_argument("w_statistic: empty configuration");
    const double na = std::pow(static_cast<double>(config.N), alpha);
    double s = 0.0;
    for (double p : config.points) s += g_t_value(t, eta, na * (p - x0));
    return s;
}

double w_statistic_logdet(const PointConfiguration& config, double t, double eta, double x0,
                          double alpha) {
    if (config.points.empty()) throw std::invalid_argument("w_statistic_logdet: empty configuration");
    const double h = std::pow(static_cast<double>(config.N), -alpha);
    double s = 0.0;
    for (double p : config.points) {
        const double re_t = p - x0 - t * h, im = eta * h;
        const double re_0 = p - x0;
        s += 0.5 * std::log((re_t * re_t + im * im) / (re_0 * re_0 + im * im));
    }
    return s;
}

double fbm_covariance(double t, double s, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("fbm_covariance: eta must be positive");
    auto L = [eta](double x) { return std::log1p(x * x / (4.0 * eta * eta)); };
    return 0.25 * (L(t) + L(s) - L(t - s));
}

GtNormRoutes g_t_norm_sq_routes(double t, double eta) {
    GtNormRoutes r;
    r.closed_form = fbm_covariance(t, t, eta);
    r.fourier = h_half_norm_sq(g_t_function(t, eta), NormMethod::fourier);

    // real-space double integral with log-spaced outer panels; the integrand
    // tail decays like 1/x^2 so the cutoff R enters at O(1/R)
    auto g = [t, eta](double x) { return g_t_value(t, eta, x); };
    const double core = 10.0 * (std::abs(t) + eta + 1.0);
    const double R = 8000.0 * (std::abs(t) + eta + 1.0);
    std::vector<double> edges{0.0, core};
    while (edges.back() < R) edges.push_back(edges.back() * 1.45);
    std::vector<double> xs, ws;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const int pn = e == 0 ? 12 : 1;
        PanelGrid pg = panel_grid(edges[e], edges[e + 1], pn, 80);
        for (std::size_t i = 0; i < pg.size(); ++i) {
            xs.push_back(pg.x[i]);
            ws.push_back(pg.w[i]);
            xs.push_back(-pg.x[i]);
            ws.push_back(pg.w[i]);
        }
    }
    double acc = 0.0;
    const std::size_t m = xs.size();
    std::vector<double> gv(m);
    for (std::size_t i = 0; i < m; ++i) gv[i] = g(xs[i]);
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double q;
            if (std::abs(xs[i] - xs[j]) < 1e-6) {
                const double mid = 0.5 * (xs[i] + xs[j]);
                q = (g(mid + 1e-5) - g(mid - 1e-5)) / 2e-5;
            } else {
                q = (gv[i] - gv[j]) / (xs[i] - xs[j]);
            }
            row += ws[j] * q * q;
        }
        // |y| > R contributes g(x)^2 int dy/(x-y)^2 up to O(t/R): g(y) ~ -t/y there
        row += gv[i] * gv[i] * (1.0 / (R - xs[i]) + 1.0 / (R + xs[i])) * 2.0;
        acc += ws[i] * row;
    }
    r.double_integral = acc / (4.0 * pi * pi);
    return r;
}

FbmReport fbm_experiment(const FbmParams& params, Ensemble ensemble, int N, std::size_t M,
                         SeedStream seed, int threads, bool exact_centering) {
    if (!(params.eta > 0.0)) throw std::invalid_argument("fbm_experiment: eta must be positive");
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw std::invalid_argument("fbm_experiment: alpha must lie in (0,1)");
    if (params.grid.size() < 1) throw std::invalid_argument("fbm_experiment: empty time grid");
    for (std::size_t i = 1; i < params.grid.size(); ++i)
        if (!(params.grid[i] > params.grid[i - 1]))
            throw std::invalid_argument("fbm_experiment: grid must be strictly increasing");
    if (M < 100) throw std::invalid_argument("fbm_experiment: need at least 100 samples");
    const auto t_start = std::chrono::steady_clock::now();

    const std::size_t k = params.grid.size();
    std::vector<double> W(M * k);
    const int nthreads = threads > 0 ? threads : default_threads();
    parallel_for(M, nthreads, [&](std::size_t i) {
        PointConfiguration cfg;
        switch (ensemble) {
            case Ensemble::gue: cfg = sample_gue(N, seed.substream(i)); break;
            case Ensemble::cue: cfg = sample_cue(N, seed.substream(i)); break;
            case Ensemble::chebyshev: cfg = sample_chebyshev(N, seed.substream(i)); break;
            default: throw std::invalid_argument("fbm_experiment: unsupported ensemble");
        }
        for (std::size_t j = 0; j < k; ++j)
            W[i * k + j] = w_statistic(cfg, params.grid[j], params.eta, params.x0, params.alpha);
    });

    FbmReport rep;
    rep.params = params;
    rep.ensemble = ensemble_name(ensemble);
    rep.N = N;
    rep.M = M;
    rep.seed = seed;
    rep.mean.assign(k, 0.0);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < k; ++j) rep.mean[j] += W[i * k + j];
    for (auto& v : rep.mean) v /= static_cast<double>(M);

    // centered covariance and delete-1 jackknife
    auto cov_of = [&](std::size_t skip, std::size_t a, std::size_t b) {
        double ma = 0.0, mb = 0.0;
        const double n = static_cast<double>(skip == M ? M : M - 1);
        for (std::size_t i = 0; i < M; ++i) {
            if (i == skip) continue;
            ma += W[i * k + a];
            mb += W[i * k + b];
        }
        ma /= n;
        mb /= n;
        double c = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            if (i == skip) continue;
            c += (W[i * k + a] - ma) * (W[i * k + b] - mb);
        }
        return c / (n - 1.0);
    };
    rep.cov.assign(k, std::vector<double>(k, 0.0));
    rep.cov_se.assign(k, std::vector<double>(k, 0.0));
    rep.cov_closed.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            rep.cov[a][b] = cov_of(M, a, b);
            rep.cov_closed[a][b] = fbm_covariance(params.grid[a], params.grid[b], params.eta);
        }
    // delete-1 jackknife via power-sum identities, O(M) per entry:
    //   c^{(i)} = (S_ab - u_i v_i - (M-1) m_a^{(i)} m_b^{(i)}) / (M-2)
    {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) {
                double Sa = 0.0, Sb = 0.0, Sab = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    Sa += W[i * k + a];
                    Sb += W[i * k + b];
                    Sab += W[i * k + a] * W[i * k + b];
                }
                double sum_c = 0.0, sum_c2 = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    const double ui = W[i * k + a], vi = W[i * k + b];
                    const double ma = (Sa - ui) / (M - 1.0), mb = (Sb - vi) / (M - 1.0);
                    const double ci = (Sab - ui * vi - (M - 1.0) * ma * mb) / (M - 2.0);
                    sum_c += ci;
                    sum_c2 += ci * ci;
                }
                const double mc = sum_c / static_cast<double>(M);
                const double spread = std::max(0.0, sum_c2 / M - mc * mc);
                const double se = std::sqrt((M - 1.0) * spread);
                rep.cov_se[a][b] = rep.cov_se[b][a] = se;
            }
    }

    // variance bound Var[W(t)] <= 32 ||g_t||^2  (closed-form norm)
    rep.var_bound_ratio.resize(k);
    for (std::size_t j = 0; j < k; ++j)
        rep.var_bound_ratio[j] =
            rep.cov[j][j] / (32.0 * fbm_covariance(params.grid[j], params.grid[j], params.eta));

    // disjoint-increment diagnostics over consecutive grid increments
    // (B(0) = 0, so W(t_1) is itself an increment)
    std::vector<std::array<int, 4>> idx;  // -1 denotes t = 0
    for (std::size_t a = 0; a + 1 < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const int a0 = static_cast<int>(a) - 1;
            idx.push_back({a0, static_cast<int>(a), static_cast<int>(b) - 1, static_cast<int>(b)});
        }
    for (const auto& q : idx) {
        FbmIncrementDiagnostic d;
        auto tval = [&](int j) { return j < 0 ? 0.0 : params.grid[j]; };
        auto wval = [&](std::size_t i, int j) { return j < 0 ? 0.0 : W[i * k + j]; };
        d.a0 = tval(q[0]);
        d.a1 = tval(q[1]);
        d.b0 = tval(q[2]);
        d.b1 = tval(q[3]);
        // empirical covariance of the two increments with jackknife SE
        std::vector<double> u(M), v(M);
        for (std::size_t i = 0; i < M; ++i) {
            u[i] = wval(i, q[1]) - wval(i, q[0]);
            v[i] = wval(i, q[3]) - wval(i, q[2]);
        }
        double Su = 0.0, Sv = 0.0, Suv = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            Su += u[i];
            Sv += v[i];
            Suv += u[i] * v[i];
        }
        d.cov = (Suv - Su * Sv / M) / (M - 1.0);
        double sum_c = 0.0, sum_c2 = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double mui = (Su - u[i]) / (M - 1.0), mvi = (Sv - v[i]) / (M - 1.0);
            const double ci = (Suv - u[i] * v[i] - (M - 1.0) * mui * mvi) / (M - 2.0);
            sum_c += ci;
            sum_c2 += ci * ci;
        }
        const double mc = sum_c / static_cast<double>(M);
        d.se = std::sqrt((M - 1.0) * std::max(0.0, sum_c2 / M - mc * mc));
        auto C = [&](double s, double t) {
            if (s == 0.0 || t == 0.0) return 0.0;
            return fbm_covariance(s, t, params.eta);
        };
        d.predicted = C(d.a1, d.b1) - C(d.a1, d.b0) - C(d.a0, d.b1) + C(d.a0, d.b0);
        rep.increments.push_back(d);
    }

    if (exact_centering && N <= 400) {
        rep.exact_mean.resize(k);
        ProjectionKernel pk = (ensemble == Ensemble::gue)   ? gue_projection(N)
                              : (ensemble == Ensemble::cue) ? cue_projection(N)
                                                             : chebyshev_projection(N);
        for (std::size_t j = 0; j < k; ++j) {
            TestFunction gt = g_t_function(params.grid[j], params.eta);
            rep.exact_mean[j] = cumulant_trace(pk, gt, params.x0, params.alpha, 1);
        }
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

}  // namespace meso
