#include "mesodpp/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace meso {

using std::numbers::pi;

// --- equilibrium measures ----------------------------------------------------

EquilibriumMeasure semicircle() {
    const double s2 = std::sqrt(2.0);
    EquilibriumMeasure m;
    m.bulk_lo = -s2;
    m.bulk_hi = s2;
    m.density = [s2](double x) {
        if (std::abs(x) >= s2) return 0.0;
        return std::sqrt(2.0 - x * x) / pi;
    };
    m.cdf = [s2](double x) {
        if (x <= -s2) return -0.5;
        if (x >= s2) return 0.5;
        return (x * std::sqrt(2.0 - x * x) + 2.0 * std::asin(x / s2)) / (2.0 * pi);
    };
    m.quantile = [s2, cdf = m.cdf, density = m.density](double q) {
        if (q <= -0.5) return -s2;
        if (q >= 0.5) return s2;
        // Newton with bisection safeguard; F is strictly increasing on the bulk.
        double lo = -s2, hi = s2;
        double x = s2 * std::sin(pi * q);  // exact for the arcsine shape, good start here
        for (int it = 0; it < 100; ++it) {
            const double f = cdf(x) - q;
            if (f > 0)
                hi = x;
            else
                lo = x;
            const double d = density(x);
            double xn = (d > 1e-12) ? x - f / d : 0.5 * (lo + hi);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (std::abs(xn - x) < 1e-15) return xn;
            x = xn;
        }
        return x;
    };
    return m;
}

EquilibriumMeasure arcsine() {
    EquilibriumMeasure m;
    m.bulk_lo = -1.0;
    m.bulk_hi = 1.0;
    m.density = [](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        return 1.0 / (pi * std::sqrt(1.0 - x * x));
    };
    m.cdf = [](double x) {
        if (x <= -1.0) return -0.5;
        if (x >= 1.0) return 0.5;
        return std::asin(x) / pi;
    };
    m.quantile = [](double q) {
        if (q <= -0.5) return -1.0;
        if (q >= 0.5) return 1.0;
        return std::sin(pi * q);
    };
    return m;
}

EquilibriumMeasure uniform_circle() {
    EquilibriumMeasure m;
    m.bulk_lo = 0.0;
    m.bulk_hi = 2.0 * pi;
    m.density = [](double) { return 1.0 / (2.0 * pi); };
    m.cdf = [](double x) { return x / (2.0 * pi); };
    m.quantile = [](double q) { return 2.0 * pi * q; };
    return m;
}

// --- kernels ------------------------------------------------------------------

static double basis_domain_scale(const OrthonormalBasis& basis, int N) {
    if (basis.weight_id == WeightId::hermite_fixed) return std::sqrt(2.0 * N);
    return 2.0;
}

double cd_kernel(const OrthonormalBasis& basis, int N, double x, double y) {
    if (N < 1 || N > basis.n_max) throw std::invalid_argument("cd_kernel: rank out of range");
    if (basis.compact_support &&
        (x <= basis.support_lo || x >= basis.support_hi || y <= basis.support_lo ||
         y >= basis.support_hi))
        throw std::invalid_argument("cd_kernel: point outside the weight support");

    const double delta = 1e-4 * basis_domain_scale(basis, N);
    if (std::abs(x - y) <= delta) {
        std::vector<double> px(N), py(N);
        basis.phi_batch(N - 1, x, px);
        if (x == y) {
            double s = 0.0;
            for (int k = 0; k < N; ++k) s += px[k] * px[k];
            return s;
        }
        basis.phi_batch(N - 1, y, py);
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += px[k] * py[k];
        return s;
    }
    std::vector<double> px(N + 1), py(N + 1);
    basis.phi_batch(N, x, px);
    basis.phi_batch(N, y, py);
    return basis.cd_prefactor(N) * (px[N] * py[N - 1] - px[N - 1] * py[N]) / (x - y);
}

double gue_kernel(int N, double x, double y) {
    if (N < 1) throw std::invalid_argument("gue_kernel: N must be >= 1");
    if (N > kHermiteDegreeCeiling) throw std::invalid_argument("gue_kernel: N above degree ceiling");
    const double rn = std::sqrt(static_cast<double>(N));
    const double u = rn * x, v = rn * y;
    if (x == y) {
        std::vector<double> p(N + 1);
        hermite_phi_batch(N, u, p);
        if (N == 1) return rn * N * p[0] * p[0];
        const double d =
            N * (p[N - 1] * p[N - 1] - std::sqrt(1.0 - 1.0 / N) * p[N] * p[N - 2]);
        return rn * d;
    }
    const double delta = 1e-4 * std::sqrt(2.0 * N);
    if (std::abs(u - v) <= delta) {
        std::vector<double> pu(N), pv(N);
        hermite_phi_batch(N - 1, u, pu);
        hermite_phi_batch(N - 1, v, pv);
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += pu[k] * pv[k];
        return rn * s;
    }
    std::vector<double> pu(N + 1), pv(N + 1);
    hermite_phi_batch(N, u, pu);
    hermite_phi_batch(N, v, pv);
    return rn * std::sqrt(0.5 * N) * (pu[N] * pv[N - 1] - pu[N - 1] * pv[N]) / (u - v);
}

double sine_kernel(double nu, double xi, double zeta) {
    if (!(nu > 0.0)) throw std::invalid_argument("sine_kernel: density must be positive");
    if (!std::isfinite(xi) || !std::isfinite(zeta))
        throw std::invalid_argument("sine_kernel: non-finite argument");
    const double d = xi - zeta;
    if (std::abs(d) < 1e-8) {
        const double z = pi * nu * d;
        return nu * (1.0 - z * z / 6.0);
    }
    return std::sin(pi * nu * d) / (pi * d);
}

double cue_kernel(int N, double x, double y) {
    if (N < 1) throw std::invalid_argument("cue_kernel: N must be >= 1");
    // reduce to the principal separation so the kernel is literally 2pi-periodic
    const double d = std::remainder(x - y, 2.0 * pi);
    if (std::abs(d) < 1e-8) return N / (2.0 * pi) * (1.0 - (N * N - 1.0) * d * d / 24.0);
    return std::sin(0.5 * N * d) / (2.0 * pi * std::sin(0.5 * d));
}

double chebyshev_kernel(int N, double x, double y) {
    if (N < 1) throw std::invalid_argument("chebyshev_kernel: N must be >= 1");
    if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0)
        throw std::invalid_argument("chebyshev_kernel: endpoints excluded");
    const double tx = std::acos(x), ty = std::acos(y);
    if (x == y) {
        // sum_{j=1}^N sin^2(j t) = N/2 - cos((N+1)t) sin(N t) / (2 sin t)
        const double st = std::sin(tx);
        return (2.0 / (pi * st)) * (0.5 * N - std::cos((N + 1) * tx) * std::sin(N * tx) / (2.0 * st));
    }
    if (std::abs(x - y) <= 2e-4) {
        double s = 0.0;
        const double qx = std::sqrt(std::sin(tx)), qy = std::sqrt(std::sin(ty));
        for (int k = 1; k <= N; ++k) s += std::sin(k * tx) * std::sin(k * ty);
        return 2.0 * s / (pi * qx * qy);
    }
    return (std::sin((N + 1) * tx) * std::sin(N * ty) - std::sin((N + 1) * ty) * std::sin(N * tx)) /
           (pi * std::pow(1.0 - x * x, 0.25) * std::pow(1.0 - y * y, 0.25) * (x - y));
}

double sine_approx(const EquilibriumMeasure& m, int N, double alpha, double x0, double xi,
                   double zeta) {
    if (N < 1) throw std::invalid_argument("sine_approx: N must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("sine_approx: alpha in (0,1]");
    const double h = std::pow(static_cast<double>(N), -alpha);
    const double u = x0 + xi * h, v = x0 + zeta * h;
    if (u <= m.bulk_lo || u >= m.bulk_hi || v <= m.bulk_lo || v >= m.bulk_hi)
        throw std::runtime_error("sine_approx: argument left the bulk");
    const double d = xi - zeta;
    if (std::abs(d) < 1e-8) return N * h * m.density(u);  // N^{1-alpha} rho(x0 + xi N^-alpha)
    return std::sin(pi * N * (m.cdf(u) - m.cdf(v))) / (pi * d);
}

// --- ProjectionKernel ---------------------------------------------------------

ProjectionKernel gue_projection(int N) {
    ProjectionKernel k;
    k.family = KernelFamily::gue;
    k.N = N;
    k.domain_lo = -std::numeric_limits<double>::infinity();
    k.domain_hi = std::numeric_limits<double>::infinity();
    // support sqrt(2) plus Gaussian decay; truncation error budget 1e-10
    k.ess_lo = -3.0;
    k.ess_hi = 3.0;
    return k;
}

ProjectionKernel cue_projection(int N) {
    ProjectionKernel k;
    k.family = KernelFamily::cue;
    k.N = N;
    k.domain_lo = 0.0;
    k.domain_hi = 2.0 * pi;
    k.ess_lo = 0.0;
    k.ess_hi = 2.0 * pi;
    return k;
}

ProjectionKernel chebyshev_projection(int N) {
    ProjectionKernel k;
    k.family = KernelFamily::chebyshev;
    k.N = N;
    k.domain_lo = -1.0;
    k.domain_hi = 1.0;
    k.ess_lo = -1.0;
    k.ess_hi = 1.0;
    return k;
}

ProjectionKernel generic_cd_projection(std::shared_ptr<const OrthonormalBasis> basis, int N) {
    if (!basis) throw std::invalid_argument("generic_cd_projection: null basis");
    if (N > basis->n_max) throw std::invalid_argument("generic_cd_projection: rank exceeds basis");
    ProjectionKernel k;
    k.family = KernelFamily::generic_cd;
    k.N = N;
    k.basis = std::move(basis);
    k.domain_lo = k.basis->support_lo;
    k.domain_hi = k.basis->support_hi;
    k.ess_lo = k.basis->compact_support ? k.basis->support_lo : -3.0 * std::sqrt(2.0 * N);
    k.ess_hi = k.basis->compact_support ? k.basis->support_hi : 3.0 * std::sqrt(2.0 * N);
    return k;
}

ProjectionKernel sine_projection(double nu) {
    ProjectionKernel k;
    k.family = KernelFamily::sine;
    k.nu = nu;
    k.domain_lo = -std::numeric_limits<double>::infinity();
    k.domain_hi = std::numeric_limits<double>::infinity();
    k.ess_lo = 0.0;
    k.ess_hi = 0.0;
    return k;
}

double ProjectionKernel::operator()(double x, double y) const {
    switch (family) {
        case KernelFamily::gue: return gue_kernel(N, x, y);
        case KernelFamily::cue: return cue_kernel(N, x, y);
        case KernelFamily::chebyshev: return chebyshev_kernel(N, x, y);
        case KernelFamily::generic_cd: return cd_kernel(*basis, N, x, y);
        case KernelFamily::sine: return sine_kernel(nu, x, y);
    }
    throw std::logic_error("ProjectionKernel: bad family");
}

double ProjectionKernel::diagonal(double x) const { return (*this)(x, x); }

// --- KernelTable ----------------------------------------------------------------

KernelTable::KernelTable(const ProjectionKernel& k, std::span<const double> coords)
    : kernel_(k), x_(coords.begin(), coords.end()) {
    const std::size_t m = x_.size();
    diag_.resize(m);
    switch (k.family) {
        case KernelFamily::gue: {
            const double rn = std::sqrt(static_cast<double>(k.N));
            scaled_.resize(m);
            wave_hi_.resize(m);
            wave_lo_.resize(m);
            std::vector<double> p(k.N + 1);
            for (std::size_t i = 0; i < m; ++i) {
                scaled_[i] = rn * x_[i];
                hermite_phi_batch(k.N, scaled_[i], p);
                wave_hi_[i] = p[k.N];
                wave_lo_[i] = p[k.N - 1];
                diag_[i] = (k.N == 1)
                               ? rn * p[0] * p[0]
                               : rn * k.N *
                                     (p[k.N - 1] * p[k.N - 1] -
                                      std::sqrt(1.0 - 1.0 / k.N) * p[k.N] * p[k.N - 2]);
            }
            pref_ = std::sqrt(0.5 * k.N);
            delta_ = 1e-4 * std::sqrt(2.0 * k.N);
            break;
        }
        case KernelFamily::chebyshev:
        case KernelFamily::generic_cd: {
            const OrthonormalBasis* basis = k.basis.get();
            std::shared_ptr<const OrthonormalBasis> tmp;
            if (k.family == KernelFamily::chebyshev) {
                tmp = std::make_shared<OrthonormalBasis>(chebyshev_basis(k.N + 1));
                basis = tmp.get();
            }
            scaled_ = x_;
            wave_hi_.resize(m);
            wave_lo_.resize(m);
            std::vector<double> p(k.N + 1);
            for (std::size_t i = 0; i < m; ++i) {
                basis->phi_batch(k.N, x_[i], p);
                wave_hi_[i] = p[k.N];
                wave_lo_[i] = p[k.N - 1];
                double s = 0.0;
                for (int j = 0; j < k.N; ++j) s += p[j] * p[j];
                diag_[i] = s;
            }
            pref_ = basis->cd_prefactor(k.N);
            delta_ = 1e-4 * basis_domain_scale(*basis, k.N);
            break;
        }
        case KernelFamily::cue:
        case KernelFamily::sine: {
            for (std::size_t i = 0; i < m; ++i) diag_[i] = kernel_.diagonal(x_[i]);
            break;
        }
    }
}

double KernelTable::k(std::size_t i, std::size_t j) const {
    if (i == j) return diag_[i];
    switch (kernel_.family) {
        case KernelFamily::gue:
        case KernelFamily::chebyshev:
        case KernelFamily::generic_cd: {
            const double du = scaled_[i] - scaled_[j];
            if (std::abs(du) <= delta_) return kernel_(x_[i], x_[j]);
            double v = pref_ * (wave_hi_[i] * wave_lo_[j] - wave_lo_[i] * wave_hi_[j]) / du;
            if (kernel_.family == KernelFamily::gue)
                v *= std::sqrt(static_cast<double>(kernel_.N));
            return v;
        }
        default: return kernel_(x_[i], x_[j]);
    }
}

// --- error scan ------------------------------------------------------------------

double log_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("log_log_slope: need matching arrays, size >= 2");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

ErrorScan kernel_error_scan(KernelFamily family, double alpha, double x0, double L,
                            std::span<const int> N_list, int grid_n) {
    if (N_list.size() < 3) throw std::invalid_argument("kernel_error_scan: need >= 3 sizes");
    for (std::size_t i = 1; i < N_list.size(); ++i)
        if (N_list[i] <= N_list[i - 1])
            throw std::invalid_argument("kernel_error_scan: N_list must be ascending");

    EquilibriumMeasure m;
    switch (family) {
        case KernelFamily::gue: m = semicircle(); break;
        case KernelFamily::chebyshev: m = arcsine(); break;
        case KernelFamily::cue: m = uniform_circle(); break;
        default: throw std::invalid_argument("kernel_error_scan: unsupported family");
    }

    ErrorScan out;
    for (int N : N_list) {
        const double h = std::pow(static_cast<double>(N), -alpha);
        std::vector<double> coords(grid_n);
        std::vector<double> xi(grid_n);
        for (int i = 0; i < grid_n; ++i) {
            xi[i] = -L + 2.0 * L * i / (grid_n - 1);
            coords[i] = x0 + xi[i] * h;
            if (coords[i] <= m.bulk_lo || coords[i] >= m.bulk_hi)
                throw std::runtime_error("kernel_error_scan: grid left the bulk");
        }
        ProjectionKernel pk = (family == KernelFamily::gue)        ? gue_projection(N)
                              : (family == KernelFamily::chebyshev) ? chebyshev_projection(N)
                                                                     : cue_projection(N);
        KernelTable tab(pk, coords);
        double sup = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            for (int j = 0; j < grid_n; ++j) {
                const double lhs = h * tab.k(i, j);
                const double rhs = sine_approx(m, N, alpha, x0, xi[i], xi[j]);
                sup = std::max(sup, std::abs(lhs - rhs));
            }
        }
        out.N.push_back(N);
        out.sup_error.push_back(sup);
    }
    std::vector<double> nn(out.N.begin(), out.N.end());
    out.slope = log_log_slope(nn, out.sup_error);
    return out;
}

}  // namespace meso
