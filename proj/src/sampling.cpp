#include "mesodpp/sampling.hpp"

#include <algorithm>
#include <complex>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace meso {

using std::numbers::pi;

std::string ensemble_name(Ensemble e) {
    switch (e) {
        case Ensemble::gue: return "gue";
        case Ensemble::cue: return "cue";
        case Ensemble::chebyshev: return "chebyshev";
        case Ensemble::generic_cd: return "generic_cd";
    }
    return "?";
}

Ensemble ensemble_from_name(const std::string& s) {
    if (s == "gue") return Ensemble::gue;
    if (s == "cue") return Ensemble::cue;
    if (s == "chebyshev") return Ensemble::chebyshev;
    if (s == "generic_cd") return Ensemble::generic_cd;
    throw std::invalid_argument("unknown ensemble: " + s);
}

// --- tridiagonal QL ------------------------------------------------------------

std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const double> offdiag) {
    const int n = static_cast<int>(diag.size());
    if (n == 0) throw std::invalid_argument("tridiag_eigenvalues: empty matrix");
    if (offdiag.size() + 1 != diag.size())
        throw std::invalid_argument("tridiag_eigenvalues: offdiag length must be n-1");
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(offdiag.begin(), offdiag.end());
    e.push_back(0.0);

    const long max_iter = 30L * n;
    long iter = 0;
    for (int l = 0; l < n; ++l) {
        for (;;) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (++iter > max_iter)
                throw std::runtime_error("tridiag_eigenvalues: QL failed to converge in 30N sweeps");
            // Wilkinson shift from the leading 2x2
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

int sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x) {
    const int n = static_cast<int>(diag.size());
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < n; ++i) {
        if (q == 0.0) q = 1e-300;
        q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

double sturm_bisect_eigenvalue(std::span<const double> diag, std::span<const double> offdiag,
                               int rank, double tol) {
    const int n = static_cast<int>(diag.size());
    if (rank < 0 || rank >= n) throw std::invalid_argument("sturm_bisect_eigenvalue: bad rank");
    // Gershgorin bounds
    double lo = diag[0], hi = diag[0];
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(offdiag[i - 1]);
        if (i < n - 1) r += std::abs(offdiag[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    lo -= tol;
    hi += tol;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, offdiag, mid) <= rank)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, int n) {
    if (matrix.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("symmetric_eigenvalues: size mismatch");
    // Householder reduction to tridiagonal form (eigenvalues only).
    std::vector<double> A(matrix.begin(), matrix.end());
    auto at = [&](int i, int j) -> double& { return A[static_cast<std::size_t>(i) * n + j]; };
    std::vector<double> d(n), e(n, 0.0);
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(at(i, k));
            if (scale == 0.0) {
                e[i] = at(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    at(i, k) /= scale;
                    h += at(i, k) * at(i, k);
                }
                double f = at(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                at(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
                    for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
                    e[j] = g / h;
                    f += e[j] * at(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = at(i, j);
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (int k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
                }
            }
        } else {
            e[i] = at(i, l);
        }
        d[i] = h;
    }
    for (int i = 0; i < n; ++i) d[i] = at(i, i);
    std::vector<double> off(e.begin() + 1, e.end());
    return tridiag_eigenvalues(d, off);
}

// --- GUE sampler -----------------------------------------------------------------

PointConfiguration sample_gue(int N, SeedStream stream) {
    if (N < 1) throw std::invalid_argument("sample_gue: N must be >= 1");
    Rng rng(stream);
    const double inv = 1.0 / std::sqrt(2.0 * N);
    std::vector<double> d(N), e(N > 1 ? N - 1 : 0);
    for (int i = 0; i < N; ++i) d[i] = rng.normal() * inv;
    for (int k = 1; k < N; ++k) e[k - 1] = rng.chi(2.0 * (N - k)) / std::sqrt(2.0) * inv;
    PointConfiguration cfg;
    cfg.points = tridiag_eigenvalues(d, e);
    cfg.ensemble = Ensemble::gue;
    cfg.N = N;
    cfg.seed = stream;
    return cfg;
}

// --- HKPV projection sampler --------------------------------------------------

namespace {

using cplx = std::complex<double>;

// Conditional-density state: selected points, incremental Cholesky of the
// (Hermitian, PSD) kernel Gram matrix, residual K(x,x) - |L^{-1} k(x)|^2.
// The CUE kernel must enter in its complex projection form
// e^{i(N-1)(x-y)/2} sin(N(x-y)/2)/(2 pi sin((x-y)/2)); the real part alone
// is not a projection and the chain rule would break down.
struct HkpvState {
    const ProjectionKernel& K;
    bool circular;
    std::vector<double> pts;
    std::vector<cplx> chol;   // row-major lower triangle, real positive diagonal
    std::vector<cplx> z;      // scratch

    explicit HkpvState(const ProjectionKernel& k)
        : K(k), circular(k.family == KernelFamily::cue) {}

    cplx kval(double x, double y) const {
        if (!circular) return cplx(K(x, y), 0.0);
        const double d = std::remainder(x - y, 2.0 * std::numbers::pi);
        const double real = cue_kernel(K.N, x, y);
        const double phase = 0.5 * (K.N - 1) * d;
        return std::polar(1.0, phase) * real;
    }

    double residual(double x) {
        const std::size_t m = pts.size();
        z.resize(m);
        double quad = 0.0;
        std::size_t row = 0;
        for (std::size_t a = 0; a < m; ++a) {
            cplx acc = kval(pts[a], x);
            for (std::size_t b = 0; b < a; ++b) acc -= chol[row + b] * z[b];
            z[a] = acc / chol[row + a].real();
            quad += std::norm(z[a]);
            row += a + 1;
        }
        const double r = K.diagonal(x) - quad;
        return r > 0.0 ? r : 0.0;
    }

    void accept(double x) {
        const double r = residual(x);  // fills z
        const std::size_t m = pts.size();
        for (std::size_t b = 0; b < m; ++b) chol.push_back(std::conj(z[b]));
        chol.push_back(std::sqrt(std::max(r, 1e-280)));
        pts.push_back(x);
    }
};

struct Envelope {
    // piecewise-constant majorant over the proposal coordinate t in [t0, t1]
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> cell;  // height per cell
    std::vector<double> cum;   // cumulative cell masses
    double mass = 0.0;

    void build_constant(double a, double b, double height) {
        t0 = a;
        t1 = b;
        cell.assign(1, height);
        cum.assign(1, height * (b - a));
        mass = cum.back();
    }

    void build(double a, double b, int cells, const std::function<double(double)>& g,
               double margin) {
        t0 = a;
        t1 = b;
        cell.resize(cells);
        const double h = (b - a) / cells;
        for (int c = 0; c < cells; ++c) {
            double mx = 0.0;
            for (int s = 0; s <= 3; ++s) mx = std::max(mx, g(a + (c + s / 3.0) * h));
            cell[c] = mx * margin + 1e-12;
        }
        cum.resize(cells);
        double acc = 0.0;
        for (int c = 0; c < cells; ++c) {
            acc += cell[c] * h;
            cum[c] = acc;
        }
        mass = acc;
    }

    double draw(Rng& rng, double& height_out) const {
        const double u = rng.uniform() * mass;
        const std::size_t c =
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        const std::size_t cc = std::min(c, cell.size() - 1);
        const double h = (t1 - t0) / cell.size();
        const double prev = cc == 0 ? 0.0 : cum[cc - 1];
        height_out = cell[cc];
        return t0 + cc * h + (u - prev) / cell[cc];
    }

    double height_at(double t) const {
        const double h = (t1 - t0) / cell.size();
        auto c = static_cast<std::size_t>((t - t0) / h);
        return cell[std::min(c, cell.size() - 1)];
    }
};

}  // namespace

PointConfiguration sample_projection_dpp(const ProjectionKernel& kernel, SeedStream stream) {
    const int N = kernel.N;
    if (N < 1) throw std::invalid_argument("sample_projection_dpp: rank must be >= 1");
    const bool circular = kernel.family == KernelFamily::cue;
    const bool compact = kernel.family == KernelFamily::chebyshev ||
                         (kernel.family == KernelFamily::generic_cd && kernel.basis &&
                          kernel.basis->compact_support);
    if (!circular && !compact)
        throw std::invalid_argument(
            "sample_projection_dpp: needs a finite-rank basis family (cue|chebyshev|generic_cd)");

    Rng rng(stream);
    HkpvState state(kernel);

    // Proposal coordinate: the angle for cue, t = arccos(x) for [-1,1] weights.
    // The unnormalized target in t is g_i(t) = f_i(x(t)) |dx/dt|; the initial
    // diagonal dominates every conditional, so the majorant is built once.
    Envelope env;
    double margin = 1.3;
    auto rebuild = [&] {
        if (circular) {
            env.build_constant(0.0, 2.0 * pi, kernel.N / (2.0 * pi) * 1.0000001);
        } else if (kernel.family == KernelFamily::chebyshev) {
            // K(x,x) sin t <= 2N/pi exactly
            env.build_constant(0.0, pi, 2.0 * N / pi * 1.0000001);
        } else {
            auto g0 = [&](double t) {
                const double x = std::cos(t);
                if (x <= kernel.domain_lo || x >= kernel.domain_hi) return 0.0;
                return kernel.diagonal(x) * std::sin(t);
            };
            env.build(0.0, pi, std::max(64, 4 * N), g0, margin);
        }
    };
    rebuild();

    long proposals = 0, accepted = 0, since_accept = 0;
    while (accepted < N) {
        double height = 0.0;
        const double t = env.draw(rng, height);
        const double x = circular ? t : std::cos(t);
        if (!circular && (x <= kernel.domain_lo || x >= kernel.domain_hi)) continue;
        const double jac = circular ? 1.0 : std::sin(t);
        const double g = state.residual(x) * jac;
        ++proposals;
        ++since_accept;
        if (g > height) {
            // majorant violated (undersampled grid): rebuild wider and restart draw
            margin *= 2.0;
            rebuild();
            continue;
        }
        if (rng.uniform() * height <= g) {
            state.accept(x);
            ++accepted;
            since_accept = 0;
        } else if (since_accept > 100000) {
            throw std::runtime_error(
                "sample_projection_dpp: acceptance rate below 1e-4 after " +
                std::to_string(accepted) + "/" + std::to_string(N) + " points");
        }
    }
    (void)proposals;

    PointConfiguration cfg;
    cfg.points = std::move(state.pts);
    std::sort(cfg.points.begin(), cfg.points.end());
    cfg.ensemble = circular ? Ensemble::cue
                            : (kernel.family == KernelFamily::chebyshev ? Ensemble::chebyshev
                                                                        : Ensemble::generic_cd);
    cfg.N = N;
    cfg.seed = stream;
    return cfg;
}

PointConfiguration sample_cue(int N, SeedStream stream) {
    return sample_projection_dpp(cue_projection(N), stream);
}

PointConfiguration sample_chebyshev(int N, SeedStream stream) {
    return sample_projection_dpp(chebyshev_projection(N), stream);
}

// --- misc ----------------------------------------------------------------------

std::string dump_configurations(std::span<const PointConfiguration> configs) {
    if (configs.empty()) return "# empty\n";
    char head[160];
    std::snprintf(head, sizeof head, "# ensemble=%s N=%d seed=%llu stream=%llu\n",
                  ensemble_name(configs[0].ensemble).c_str(), configs[0].N,
                  static_cast<unsigned long long>(configs[0].seed.root),
                  static_cast<unsigned long long>(configs[0].seed.index));
    std::string out(head);
    char buf[32];
    for (const auto& c : configs) {
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", c.points[i]);
            out += buf;
            out += (i + 1 < c.points.size()) ? "," : "\n";
        }
    }
    return out;
}

double ks_distance(std::span<const double> sorted_points,
                   const std::function<double(double)>& cdf01) {
    const std::size_t n = sorted_points.size();
    if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf01(sorted_points[i]);
        sup = std::max(sup, std::abs(F - static_cast<double>(i) / n));
        sup = std::max(sup, std::abs(F - static_cast<double>(i + 1) / n));
    }
    return sup;
}

}  // namespace meso
