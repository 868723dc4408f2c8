#include "mesodpp/statistics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "mesodpp/gauss.hpp"

namespace meso {

using std::numbers::pi;

// --- built-in test functions ---------------------------------------------------

TestFunction bump() {
    TestFunction t;
    t.f = [](double x) {
        const double u = 1.0 - x * x;
        return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
    };
    t.support_lo = -1.0;
    t.support_hi = 1.0;
    t.compact = true;
    t.smoothness = Smoothness::c1;
    t.name = "bump";
    return t;
}

TestFunction gaussian_bump() {
    TestFunction t;
    t.f = [](double x) { return std::exp(-x * x); };
    t.support_lo = -6.5;
    t.support_hi = 6.5;  // e^{-x^2} < 1e-18 outside; clipped to keep the support declared
    t.compact = true;
    t.smoothness = Smoothness::c1;
    t.fourier = [](double u) {
        return std::complex<double>(std::sqrt(pi) * std::exp(-pi * pi * u * u), 0.0);
    };
    t.name = "gaussian";
    return t;
}

static double ramp01(double t) {
    // C-infinity 0 -> 1 on [0,1]
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

TestFunction mollified_step() {
    TestFunction t;
    t.f = [](double x) {
        if (x <= -1.0 || x >= 1.0) return 0.0;
        if (x < -0.5) return ramp01(2.0 * (x + 1.0));
        if (x > 0.5) return ramp01(2.0 * (1.0 - x));
        return 1.0;
    };
    t.support_lo = -1.0;
    t.support_hi = 1.0;
    t.compact = true;
    t.smoothness = Smoothness::c1;
    t.name = "mollified_step";
    return t;
}

TestFunction sine_bump() {
    TestFunction t;
    t.f = [](double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : std::sin(2.0 * pi * x); };
    t.support_lo = 0.0;
    t.support_hi = 1.0;
    t.compact = true;
    t.smoothness = Smoothness::c1;
    t.name = "sine_period";
    return t;
}

TestFunction monomial(int p) {
    if (p < 1 || p > 4) throw std::invalid_argument("monomial: power must be in 1..4");
    TestFunction t;
    t.f = [p](double x) {
        double v = x;
        for (int i = 1; i < p; ++i) v *= x;
        return v;
    };
    t.support_lo = -2.5;
    t.support_hi = 2.5;
    t.compact = false;
    t.smoothness = Smoothness::c1;
    t.name = p == 1 ? "x" : ("x^" + std::to_string(p));
    return t;
}

TestFunction scaled(const TestFunction& f, double eta, std::string name) {
    if (!(eta > 0.0)) throw std::invalid_argument("scaled: eta must be positive");
    TestFunction t = f;
    auto inner = f;
    t.f = [inner, eta](double x) { return inner(eta * x); };
    t.support_lo = f.support_lo / eta;
    t.support_hi = f.support_hi / eta;
    if (f.fourier) {
        auto in_ft = *f.fourier;
        t.fourier = [in_ft, eta](double u) { return in_ft(u / eta) / eta; };
    }
    t.name = name.empty() ? f.name + "_scaled" : std::move(name);
    return t;
}

// --- linear statistic ------------------------------------------------------------

double linear_statistic(const PointConfiguration& config, const TestFunction& f, double x0,
                        double alpha) {
    if (config.points.empty()) throw std::invalid_argument("linear_statistic: empty configuration");
    const double scale = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(config.N), alpha);
    double s = 0.0;
    for (double p : config.points) s += f(scale * (p - x0));
    return s;
}

// --- difference quotient with analytic diagonal -----------------------------------

static double diff_quotient(const TestFunction& f, double x, double y) {
    if (std::abs(x - y) < 1e-6) {
        const double m = 0.5 * (x + y);
        return (f(m + 1e-5) - f(m - 1e-5)) / 2e-5;
    }
    return (f(x) - f(y)) / (x - y);
}

// --- norms --------------------------------------------------------------------------

static double h_half_double_integral(const TestFunction& f, int panels) {
    const double a = f.support_lo, b = f.support_hi;
    PanelGrid g = panel_grid(a, b, panels, 100);
    const std::size_t m = g.size();
    std::vector<double> fv(m);
    for (std::size_t i = 0; i < m; ++i) fv[i] = f(g.x[i]);
    double inner = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double q;
            if (std::abs(g.x[i] - g.x[j]) < 1e-6)
                q = diff_quotient(f, g.x[i], g.x[j]);
            else
                q = (fv[i] - fv[j]) / (g.x[i] - g.x[j]);
            row += g.w[j] * q * q;
        }
        inner += g.w[i] * row;
    }
    // y outside [a,b]: int dy/(x-y)^2 = 1/(x-a) + 1/(b-x)
    double tail = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        tail += g.w[i] * fv[i] * fv[i] * (1.0 / (g.x[i] - a) + 1.0 / (b - g.x[i]));
    return (inner + 2.0 * tail) / (4.0 * pi * pi);
}

static double h_half_fourier(const TestFunction& f) {
    // integrate 2 * int_0^inf |fhat(u)|^2 u du in blocks until the tail is dust
    auto fhat_sq = [&f](double u) {
        if (f.fourier) {
            const std::complex<double> v = (*f.fourier)(u);
            return std::norm(v);
        }
        // fine-grid transform of a compactly supported f; panels resolve e^{-2pi i x u}
        const double a = f.support_lo, b = f.support_hi;
        const int p = panels_for_oscillation(a, b, 2.0 * pi * std::abs(u), 100);
        PanelGrid g = panel_grid(a, b, std::max(p, 2), 100);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = f(g.x[i]);
            re += g.w[i] * v * std::cos(2.0 * pi * g.x[i] * u);
            im -= g.w[i] * v * std::sin(2.0 * pi * g.x[i] * u);
        }
        return re * re + im * im;
    };
    double total = 0.0;
    const double block = 2.0;
    for (int blk = 0; blk < 64; ++blk) {
        const double lo = blk * block, hi = lo + block;
        const int p = panels_for_oscillation(
            lo, hi, 2.0 * pi * std::max(std::abs(f.support_lo), std::abs(f.support_hi)), 100);
        const double part =
            2.0 * integrate_panels(lo, hi, std::max(p, 2),
                                   [&](double u) { return fhat_sq(u) * std::abs(u); }, 100);
        total += part;
        if (blk >= 2 && std::abs(part) < 1e-12 * std::max(total, 1e-30)) break;
    }
    return total;
}

double h_half_norm_sq(const TestFunction& f, NormMethod method) {
    if (f.smoothness == Smoothness::h_half_only && !f.fourier)
        throw std::invalid_argument("h_half_norm_sq: H1/2-only functions need an exact transform");
    if (method == NormMethod::fourier) return h_half_fourier(f);
    // the double-integral route needs a compact C1 function; otherwise fall
    // back to the transform when one is available
    if (!f.compact || f.smoothness == Smoothness::h_half_only) {
        if (f.fourier) return h_half_fourier(f);
        throw std::invalid_argument("h_half_norm_sq: double-integral route needs compact support");
    }
    const double v1 = h_half_double_integral(f, 8);
    const double v2 = h_half_double_integral(f, 12);
    if (std::abs(v2 - v1) > 0.02 * std::max(std::abs(v2), 1e-12))
        throw std::runtime_error("h_half_norm_sq: integral diverges under refinement (f not in H^1/2?)");
    return v2;
}

double h_one_norm_sq(const TestFunction& f) {
    if (f.smoothness != Smoothness::c1)
        throw std::invalid_argument("h_one_norm_sq: requires a C1 test function");
    const double a = f.support_lo, b = f.support_hi;
    const double v = integrate_panels(a, b, 10, [&](double x) {
        const double d = (f(x + 1e-5) - f(x - 1e-5)) / 2e-5;
        return d * d;
    }, 200);
    return v / (4.0 * pi * pi);
}

static void check_edge_quotient(const TestFunction& f) {
    // the difference quotient must stay bounded near the endpoints of [-1,1];
    // detect blow-up by its growth as the probe pair approaches the edge
    for (double sgn : {1.0, -1.0}) {
        auto probe = [&](double d) {
            const double x = sgn * (1.0 - d), y = sgn * (1.0 - 2.0 * d);
            return std::abs((f(x) - f(y)) / (x - y));
        };
        const double far = probe(1e-4), nearq = probe(1e-8);
        if (!std::isfinite(nearq) || nearq > 50.0 * (far + 1.0))
            throw std::runtime_error("sigma norm: difference quotient blows up at the edge");
    }
}

static double sigma_weighted(const TestFunction& f, bool with_one_minus_xy) {
    check_edge_quotient(f);
    PanelGrid g = panel_grid(0.0, pi, 6, 100);  // theta grid, x = cos(theta)
    const std::size_t m = g.size();
    std::vector<double> xs(m), fv(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::cos(g.x[i]);
        fv[i] = f(xs[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double q;
            if (std::abs(xs[i] - xs[j]) < 1e-6)
                q = diff_quotient(f, xs[i], xs[j]);
            else
                q = (fv[i] - fv[j]) / (xs[i] - xs[j]);
            const double wgt = with_one_minus_xy ? (1.0 - xs[i] * xs[j]) : 1.0;
            row += g.w[j] * q * q * wgt;
        }
        s += g.w[i] * row;
    }
    return with_one_minus_xy ? s / (4.0 * pi * pi) : s / (pi * pi);
}

double sigma_macro_sq(const TestFunction& f) { return sigma_weighted(f, true); }
double sigma_tilde_sq(const TestFunction& f) { return sigma_weighted(f, false); }

// --- quadrature grid for kernel functionals ------------------------------------------

namespace {

struct KernelGrid {
    std::vector<double> x, w;      // native coordinate (angle for cue)
    std::vector<double> fv;        // f(N^alpha (x - x0))
    std::vector<std::size_t> sidx; // nodes where fv may be nonzero
};

KernelGrid build_kernel_grid(const ProjectionKernel& k, const TestFunction& f, double x0,
                             double alpha, double refine) {
    const int N = k.N;
    const double h = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(N), -alpha);
    const int npp = 200;

    auto f_resc = [&](double x) { return f((x - x0) / h); };

    KernelGrid g;
    auto add_segment = [&](double a, double b, double omega) {
        if (!(b - a > 1e-14)) return;
        int p = panels_for_oscillation(a, b, omega * refine, npp);
        PanelGrid pg = panel_grid(a, b, p, npp);
        g.x.insert(g.x.end(), pg.x.begin(), pg.x.end());
        g.w.insert(g.w.end(), pg.w.begin(), pg.w.end());
    };

    const double omega_f = 12.0 / h;
    const bool compact_weight =
        k.family == KernelFamily::chebyshev ||
        (k.family == KernelFamily::generic_cd && k.basis && k.basis->compact_support);
    if (k.family != KernelFamily::cue && !compact_weight) {
        const double omega_k = pi * N * 0.5;  // phase pi N F', F' <= sqrt(2)/pi
        double slo = x0 + f.support_lo * h, shi = x0 + f.support_hi * h;
        slo = std::max(slo, k.ess_lo);
        shi = std::min(shi, k.ess_hi);
        if (!f.compact || slo >= shi) {
            add_segment(k.ess_lo, k.ess_hi, omega_k + omega_f);
        } else {
            add_segment(k.ess_lo, slo, omega_k);
            add_segment(slo, shi, omega_k + omega_f);
            add_segment(shi, k.ess_hi, omega_k);
        }
    } else if (k.family == KernelFamily::cue) {
        const double omega_k = 0.6 * N;
        double slo = x0 + f.support_lo * h, shi = x0 + f.support_hi * h;
        slo = std::max(slo, 0.0);
        shi = std::min(shi, 2.0 * pi);
        if (!f.compact || slo >= shi) {
            add_segment(0.0, 2.0 * pi, omega_k + omega_f);
        } else {
            add_segment(0.0, slo, omega_k);
            add_segment(slo, shi, omega_k + omega_f);
            add_segment(shi, 2.0 * pi, omega_k);
        }
    } else {
        // compact weight on [-1,1]: integrate in theta, x = cos(theta)
        const double omega_k = 1.2 * N;
        double slo = std::max(x0 + f.support_lo * h, -1.0);
        double shi = std::min(x0 + f.support_hi * h, 1.0);
        std::vector<double> tx, tw;
        auto add_theta = [&](double ta, double tb, double omega) {
            if (!(tb - ta > 1e-12)) return;
            int p = panels_for_oscillation(ta, tb, omega * refine, npp);
            PanelGrid pg = panel_grid(ta, tb, p, npp);
            for (std::size_t i = 0; i < pg.size(); ++i) {
                tx.push_back(std::cos(pg.x[i]));
                tw.push_back(pg.w[i] * std::sin(pg.x[i]));
            }
        };
        if (!f.compact || slo >= shi) {
            add_theta(0.0, pi, omega_k + omega_f);
        } else {
            const double t_hi = std::acos(std::clamp(slo, -1.0, 1.0));  // theta decreasing in x
            const double t_lo = std::acos(std::clamp(shi, -1.0, 1.0));
            add_theta(0.0, t_lo, omega_k);
            add_theta(t_lo, t_hi, omega_k + omega_f);
            add_theta(t_hi, pi, omega_k);
        }
        g.x = std::move(tx);
        g.w = std::move(tw);
    }

    g.fv.resize(g.x.size());
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        g.fv[i] = f_resc(g.x[i]);
        if (g.fv[i] != 0.0) g.sidx.push_back(i);
    }
    return g;
}

double variance_from_grid(const ProjectionKernel& k, const KernelGrid& g) {
    KernelTable tab(k, g.x);
    const std::size_t m = g.x.size();
    double var = 0.0;
    // 1/2 sum over S x S of (f_i - f_j)^2 K^2 + sum over S x (not S) of f_i^2 K^2
    std::vector<char> in_s(m, 0);
    for (auto i : g.sidx) in_s[i] = 1;
    for (auto i : g.sidx) {
        const double wi = g.w[i], fi = g.fv[i];
        double acc_out = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (in_s[j]) continue;
            const double kij = tab.k(i, j);
            acc_out += g.w[j] * kij * kij;
        }
        var += wi * fi * fi * acc_out;
        double acc_s = 0.0;
        for (auto j : g.sidx) {
            const double d = fi - g.fv[j];
            if (d == 0.0) continue;
            const double kij = tab.k(i, j);
            acc_s += g.w[j] * d * d * kij * kij;
        }
        var += 0.5 * wi * acc_s;
    }
    return var;
}

}  // namespace

double variance_exact(const ProjectionKernel& kernel, const TestFunction& f, double x0,
                      double alpha, bool refine_check) {
    if (kernel.family == KernelFamily::sine)
        throw std::invalid_argument("variance_exact: finite-rank kernels only");
    KernelGrid g = build_kernel_grid(kernel, f, x0, alpha, 1.0);
    const double v = variance_from_grid(kernel, g);
    if (refine_check) {
        KernelGrid g2 = build_kernel_grid(kernel, f, x0, alpha, 1.6);
        const double v2 = variance_from_grid(kernel, g2);
        const double resid = std::abs(v2 - v);
        if (resid > std::max(1e-9, 1e-5 * std::abs(v2)))
            throw std::runtime_error("variance_exact: quadrature not converged, residual " +
                                     std::to_string(resid));
        return v2;
    }
    return v;
}

double cumulant_trace(const ProjectionKernel& kernel, const TestFunction& f, double x0,
                      double alpha, int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("cumulant_trace: order must be 1, 2 or 3");
    if (kernel.family == KernelFamily::sine)
        throw std::invalid_argument("cumulant_trace: finite-rank kernels only");
    KernelGrid g = build_kernel_grid(kernel, f, x0, alpha, 1.0);
    KernelTable tab(kernel, g.x);
    const std::size_t ms = g.sidx.size();

    if (n == 1) {
        double c1 = 0.0;
        for (auto i : g.sidx) c1 += g.w[i] * g.fv[i] * tab.diag(i);
        return c1;
    }

    // restrict to the support nodes; every trace factor carries an f
    std::vector<double> wf(ms), wf2(ms), wf3(ms);
    for (std::size_t a = 0; a < ms; ++a) {
        const std::size_t i = g.sidx[a];
        wf[a] = g.w[i] * g.fv[i];
        wf2[a] = wf[a] * g.fv[i];
        wf3[a] = wf2[a] * g.fv[i];
    }
    if (n == 2) {
        double tr_f2k = 0.0;
        for (std::size_t a = 0; a < ms; ++a) tr_f2k += wf2[a] * tab.diag(g.sidx[a]);
        double tr_fkfk = 0.0;
        for (std::size_t a = 0; a < ms; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < ms; ++b) {
                const double kab = tab.k(g.sidx[a], g.sidx[b]);
                row += wf[b] * kab * kab;
            }
            tr_fkfk += wf[a] * row;
        }
        return tr_f2k - tr_fkfk;
    }

    // n = 3: C^3 = Tr[f^3 K] - 3 Tr[f^2 K f K] + 2 Tr[(f K)^3]
    if (ms > 2600) throw std::runtime_error("cumulant_trace: n=3 grid too large, O(M^3) cost");
    std::vector<double> K(ms * ms);
    for (std::size_t a = 0; a < ms; ++a)
        for (std::size_t b = 0; b < ms; ++b)
            K[a * ms + b] = (b < a) ? K[b * ms + a] : tab.k(g.sidx[a], g.sidx[b]);

    double tr1 = 0.0, tr2 = 0.0;
    for (std::size_t a = 0; a < ms; ++a) {
        tr1 += wf3[a] * K[a * ms + a];
        double row = 0.0;
        for (std::size_t b = 0; b < ms; ++b) {
            const double kab = K[a * ms + b];
            row += wf[b] * kab * kab;
        }
        tr2 += wf2[a] * row;
    }
    double tr3 = 0.0;
    std::vector<double> col(ms);
    for (std::size_t a = 0; a < ms; ++a) {
        // col_c = sum_b (wf)_b K_ab K_bc accumulated as row sweep
        std::fill(col.begin(), col.end(), 0.0);
        for (std::size_t b = 0; b < ms; ++b) {
            const double s = wf[b] * K[a * ms + b];
            if (s == 0.0) continue;
            const double* kb = &K[b * ms];
            for (std::size_t c = 0; c < ms; ++c) col[c] += s * kb[c];
        }
        double acc = 0.0;
        const double* ka = &K[a * ms];
        for (std::size_t c = 0; c < ms; ++c) acc += wf[c] * col[c] * ka[c];
        tr3 += wf[a] * acc;
    }
    return tr1 - 3.0 * tr2 + 2.0 * tr3;
}

// --- Main Combinatorial Lemma machinery ------------------------------------------------

static double composition_sum(std::span<const double> u) {
    const int n = static_cast<int>(u.size());
    double pre[8];
    pre[0] = 0.0;
    for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] + u[i];
    double fact[8];
    fact[0] = 1.0;
    for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;

    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        int ell = 1;
        double denom = 1.0;
        double mx = -std::numeric_limits<double>::infinity();
        int prev = 0;
        for (int i = 1; i <= n; ++i) {
            if (i == n || (mask >> (i - 1) & 1u)) {
                denom *= fact[i - prev];
                mx = std::max(mx, pre[i]);
                if (i < n) ++ell;
                prev = i;
            }
        }
        const double coef = ((ell % 2 == 1) ? 1.0 : -1.0) / ell * fact[n] / denom;
        total += coef * mx;
    }
    return total;
}

double upsilon(std::span<const double> u) {
    const int n = static_cast<int>(u.size());
    if (n < 2 || n > 6) throw std::invalid_argument("upsilon: need 2 <= n <= 6");
    double neg[6];
    for (int i = 0; i < n; ++i) neg[i] = -u[i];
    return -0.5 * (composition_sum(u) + composition_sum(std::span<const double>(neg, n)));
}

double mcl_permutation_sum(std::span<const double> u) {
    const int n = static_cast<int>(u.size());
    if (n < 2 || n > 6) throw std::invalid_argument("mcl_permutation_sum: need 2 <= n <= 6");
    double total = 0.0, scale = 0.0;
    for (double v : u) {
        total += v;
        scale += std::abs(v);
    }
    if (std::abs(total) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("mcl_permutation_sum: input must sum to zero");
    int idx[6];
    std::iota(idx, idx + n, 0);
    double sum = 0.0;
    double perm[6];
    do {
        for (int i = 0; i < n; ++i) perm[i] = u[idx[i]];
        sum += upsilon(std::span<const double>(perm, n));
    } while (std::next_permutation(idx, idx + n));
    return sum;
}

// --- unfolding -----------------------------------------------------------------------

UnfoldMap unfold_map(const EquilibriumMeasure& m, double x0, double alpha, int N) {
    if (!(x0 > m.bulk_lo && x0 < m.bulk_hi))
        throw std::invalid_argument("unfold_map: x0 must lie in the bulk");
    const double rho0 = m.density(x0);
    if (!(rho0 > 0.0)) throw std::invalid_argument("unfold_map: density vanishes at x0");
    const double na = std::pow(static_cast<double>(N), alpha);
    const double F0 = m.cdf(x0);
    UnfoldMap u;
    u.nu_N = static_cast<double>(N) / na * rho0;
    u.forward = [m, x0, na, rho0, F0](double x) {
        const double t = x0 + x / na;
        if (t <= m.bulk_lo || t >= m.bulk_hi)
            throw std::runtime_error("unfold_map: argument left the bulk");
        return na / rho0 * (m.cdf(t) - F0);
    };
    u.inverse = [m, x0, na, rho0, F0](double y) {
        return na * (m.quantile(F0 + rho0 * y / na) - x0);
    };
    return u;
}

TestFunction unfolded_function(const EquilibriumMeasure& m, const TestFunction& f, double x0,
                               double alpha, int N) {
    UnfoldMap u = unfold_map(m, x0, alpha, N);
    TestFunction t;
    auto inv = u.inverse;
    auto base = f;
    t.f = [base, inv](double x) { return base(inv(x)); };
    t.support_lo = u.forward(f.support_lo);
    t.support_hi = u.forward(f.support_hi);
    t.compact = f.compact;
    t.smoothness = f.smoothness;
    t.name = f.name + "_unfolded";
    return t;
}

// --- empirical cumulants ----------------------------------------------------------------

namespace {

struct PowerSums {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double n = 0;
};

// unbiased k-statistics from power sums
static void kstats_from_sums(const PowerSums& p, double out[5]) {
    const double n = p.n;
    out[1] = p.s1 / n;
    out[2] = (n * p.s2 - p.s1 * p.s1) / (n * (n - 1));
    out[3] = (n * n * p.s3 - 3.0 * n * p.s2 * p.s1 + 2.0 * p.s1 * p.s1 * p.s1) /
             (n * (n - 1) * (n - 2));
    out[4] = (n * n * (n + 1) * p.s4 - 4.0 * n * (n + 1) * p.s3 * p.s1 -
              3.0 * n * (n - 1) * p.s2 * p.s2 + 12.0 * n * p.s2 * p.s1 * p.s1 -
              6.0 * p.s1 * p.s1 * p.s1 * p.s1) /
             (n * (n - 1) * (n - 2) * (n - 3));
}

}  // namespace

KStatistics empirical_cumulants(std::span<const double> samples, int max_order) {
    const std::size_t M = samples.size();
    if (M < 100) throw std::invalid_argument("empirical_cumulants: need at least 100 samples");
    if (max_order < 2 || max_order > 4)
        throw std::invalid_argument("empirical_cumulants: max_order must be 2..4");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(M);

    // center for numerical stability; k_r (r >= 2) are shift invariant
    PowerSums full;
    full.n = static_cast<double>(M);
    std::vector<double> c(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double v = samples[i] - mean;
        c[i] = v;
        full.s1 += v;
        full.s2 += v * v;
        full.s3 += v * v * v;
        full.s4 += v * v * v * v;
    }
    double k[5];
    kstats_from_sums(full, k);

    // delete-1 jackknife standard errors
    double acc[5] = {0, 0, 0, 0, 0};
    double msum[5] = {0, 0, 0, 0, 0};
    std::vector<std::array<double, 5>> loo(M);
    for (std::size_t i = 0; i < M; ++i) {
        PowerSums p = full;
        const double v = c[i];
        p.s1 -= v;
        p.s2 -= v * v;
        p.s3 -= v * v * v;
        p.s4 -= v * v * v * v;
        p.n -= 1.0;
        double ki[5];
        kstats_from_sums(p, ki);
        for (int r = 1; r <= 4; ++r) {
            loo[i][r] = ki[r];
            msum[r] += ki[r];
        }
    }
    for (int r = 1; r <= 4; ++r) msum[r] /= static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i)
        for (int r = 1; r <= 4; ++r) {
            const double d = loo[i][r] - msum[r];
            acc[r] += d * d;
        }
    KStatistics out;
    out.M = M;
    out.k1 = k[1] + mean;
    out.k2 = k[2];
    out.k3 = k[3];
    out.k4 = k[4];
    const double fac = (static_cast<double>(M) - 1.0) / static_cast<double>(M);
    out.se1 = std::sqrt(fac * acc[1]);
    out.se2 = std::sqrt(fac * acc[2]);
    out.se3 = std::sqrt(fac * acc[3]);
    out.se4 = std::sqrt(fac * acc[4]);
    return out;
}

// --- CLT experiment ------------------------------------------------------------------------

CumulantReport clt_experiment(Ensemble ensemble, const TestFunction& f, double x0, double alpha,
                              int N, std::size_t M, SeedStream seed, int threads,
                              bool exact_cumulants, int exact_max_order) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("clt_experiment: alpha must lie in [0,1)");
    if (M < 100) throw std::invalid_argument("clt_experiment: need at least 100 samples");
    const bool global = (alpha == 0.0);
    const bool gue_rescale = global && ensemble == Ensemble::gue;  // lambda -> lambda/sqrt(2)
    const auto t_start = std::chrono::steady_clock::now();

    if (!global) {
        if (ensemble == Ensemble::gue && std::abs(x0) >= std::sqrt(2.0))
            throw std::invalid_argument("clt_experiment: x0 outside the GUE bulk");
        if (ensemble == Ensemble::chebyshev && std::abs(x0) >= 1.0)
            throw std::invalid_argument("clt_experiment: x0 outside (-1,1)");
    }

    const double s2 = std::sqrt(2.0);
    std::vector<double> stats(M);
    const int nthreads = threads > 0 ? threads : default_threads();
    parallel_for(M, nthreads, [&](std::size_t i) {
        PointConfiguration cfg;
        switch (ensemble) {
            case Ensemble::gue: cfg = sample_gue(N, seed.substream(i)); break;
            case Ensemble::cue: cfg = sample_cue(N, seed.substream(i)); break;
            case Ensemble::chebyshev: cfg = sample_chebyshev(N, seed.substream(i)); break;
            default: throw std::invalid_argument("clt_experiment: unsupported ensemble");
        }
        if (gue_rescale)
            for (auto& p : cfg.points) p /= s2;
        stats[i] = linear_statistic(cfg, f, x0, alpha);
    });

    CumulantReport rep;
    rep.ensemble = ensemble_name(ensemble);
    // the global GUE statistic is computed on lambda/sqrt(2), recorded here
    rep.function_name = gue_rescale ? f.name + "@lambda/sqrt2" : f.name;
    rep.N = N;
    rep.alpha = alpha;
    rep.x0 = x0;
    rep.M = M;
    rep.seed = seed;
    double mean = 0.0;
    for (double v : stats) mean += v;
    rep.mean = mean / static_cast<double>(M);
    rep.kstats = empirical_cumulants(stats);

    rep.target_variance = global ? sigma_macro_sq(f)
                                 : h_half_norm_sq(f, (f.smoothness == Smoothness::h_half_only)
                                                         ? NormMethod::fourier
                                                         : NormMethod::double_integral);

    if (exact_cumulants && N <= 400) {
        ProjectionKernel k = (ensemble == Ensemble::gue)   ? gue_projection(N)
                             : (ensemble == Ensemble::cue) ? cue_projection(N)
                                                            : chebyshev_projection(N);
        TestFunction fk = f;
        double kx0 = x0, kalpha = alpha;
        if (gue_rescale) {
            auto base = f;
            fk.f = [base, s2](double x) { return base(x / s2); };
            fk.support_lo = f.support_lo * s2;
            fk.support_hi = f.support_hi * s2;
            fk.name = f.name + "_gue_global";
            kx0 = 0.0;
            kalpha = 0.0;
        }
        rep.exact_c1 = cumulant_trace(k, fk, kx0, kalpha, 1);
        if (exact_max_order >= 2) rep.exact_c2 = cumulant_trace(k, fk, kx0, kalpha, 2);
        if (exact_max_order >= 3 && !global) rep.exact_c3 = cumulant_trace(k, fk, kx0, kalpha, 3);
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

}  // namespace meso
