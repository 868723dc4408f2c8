#include "mesodpp/orthopoly.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mesodpp/gauss.hpp"

namespace meso {

using std::numbers::pi;

static void check_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite argument");
}

double hermite_phi(int k, double x) {
    check_finite(x, "hermite_phi");
    if (k < 0) throw std::invalid_argument("hermite_phi: negative degree");
    if (k > kHermiteDegreeCeiling) throw std::invalid_argument("hermite_phi: degree above ceiling");
    double p0 = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (k == 0) return p0;
    double p1 = x * std::sqrt(2.0) * p0;
    for (int j = 1; j < k; ++j) {
        const double p2 = x * std::sqrt(2.0 / (j + 1)) * p1 - std::sqrt(double(j) / (j + 1)) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

void hermite_phi_batch(int k_max, double x, std::span<double> out) {
    check_finite(x, "hermite_phi_batch");
    if (k_max < 0) throw std::invalid_argument("hermite_phi_batch: negative degree");
    if (k_max > kHermiteDegreeCeiling)
        throw std::invalid_argument("hermite_phi_batch: degree above ceiling");
    if (out.size() < static_cast<std::size_t>(k_max) + 1)
        throw std::invalid_argument("hermite_phi_batch: output span too small");
    out[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (k_max == 0) return;
    out[1] = x * std::sqrt(2.0) * out[0];
    for (int j = 1; j < k_max; ++j)
        out[j + 1] = x * std::sqrt(2.0 / (j + 1)) * out[j] - std::sqrt(double(j) / (j + 1)) * out[j - 1];
}

std::vector<double> hermite_phi_batch(int k_max, double x) {
    std::vector<double> v(static_cast<std::size_t>(k_max) + 1);
    hermite_phi_batch(k_max, x, v);
    return v;
}

double chebyshev_u(int k, double x) {
    check_finite(x, "chebyshev_u");
    if (k < 0) throw std::invalid_argument("chebyshev_u: negative degree");
    if (std::abs(x) >= 1.0) throw std::invalid_argument("chebyshev_u: |x| must be < 1");
    const double t = std::acos(x);
    return std::sin((k + 1) * t) / (std::ldexp(1.0, k) * std::sin(t));
}

double chebyshev_wave(int k, double x) {
    check_finite(x, "chebyshev_wave");
    if (k < 0) throw std::invalid_argument("chebyshev_wave: negative degree");
    if (std::abs(x) >= 1.0) throw std::invalid_argument("chebyshev_wave: |x| must be < 1");
    const double t = std::acos(x);
    return std::sqrt(2.0 / pi) * std::sin((k + 1) * t) / std::sqrt(std::sin(t));
}

// --- OrthonormalBasis -------------------------------------------------------

double OrthonormalBasis::phi(int k, double x) const {
    std::vector<double> buf(static_cast<std::size_t>(k) + 1);
    phi_batch(k, x, buf);
    return buf[k];
}

void OrthonormalBasis::phi_batch(int k_max, double x, std::span<double> out) const {
    check_finite(x, "OrthonormalBasis::phi_batch");
    if (k_max < 0 || k_max > n_max)
        throw std::invalid_argument("OrthonormalBasis: degree out of range");
    if (out.size() < static_cast<std::size_t>(k_max) + 1)
        throw std::invalid_argument("OrthonormalBasis: output span too small");
    if (compact_support && (x <= support_lo || x >= support_hi)) {
        for (int k = 0; k <= k_max; ++k) out[k] = 0.0;
        return;
    }
    const double w = weight(x);
    out[0] = std::sqrt(w / b[0]);
    if (k_max == 0) return;
    out[1] = (x - a[0]) * out[0] / std::sqrt(b[1]);
    for (int k = 1; k < k_max; ++k)
        out[k + 1] = ((x - a[k]) * out[k] - std::sqrt(b[k]) * out[k - 1]) / std::sqrt(b[k + 1]);
}

double OrthonormalBasis::cd_prefactor(int N) const {
    if (N < 1 || N > n_max) throw std::invalid_argument("OrthonormalBasis: rank out of range");
    return std::sqrt(b[N]);
}

OrthonormalBasis hermite_basis(int n_max) {
    if (n_max < 1) throw std::invalid_argument("hermite_basis: n_max must be >= 1");
    OrthonormalBasis B;
    B.weight_id = WeightId::hermite_fixed;
    B.n_max = n_max;
    B.a.assign(n_max + 1, 0.0);
    B.b.resize(n_max + 1);
    B.b[0] = std::sqrt(pi);
    for (int k = 1; k <= n_max; ++k) B.b[k] = 0.5 * k;
    B.gamma.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        // gamma_k = sqrt(2^k/(sqrt(pi) k!)); underflows for very large k, in
        // which case ratios sqrt(b_k) are the usable quantity.
        const double lg = 0.5 * (k * std::numbers::ln2 - 0.5 * std::log(pi) - std::lgamma(k + 1.0));
        B.gamma[k] = std::exp(lg);
    }
    B.support_lo = -std::numeric_limits<double>::infinity();
    B.support_hi = std::numeric_limits<double>::infinity();
    B.compact_support = false;
    B.weight = [](double x) { return std::exp(-x * x); };
    return B;
}

OrthonormalBasis chebyshev_basis(int n_max) {
    if (n_max < 1) throw std::invalid_argument("chebyshev_basis: n_max must be >= 1");
    OrthonormalBasis B;
    B.weight_id = WeightId::chebyshev_u;
    B.n_max = n_max;
    B.a.assign(n_max + 1, 0.0);
    B.b.resize(n_max + 1);
    B.b[0] = 0.5;  // total mass of sqrt(1-x^2)/pi
    for (int k = 1; k <= n_max; ++k) B.b[k] = 0.25;
    B.gamma.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k) B.gamma[k] = std::ldexp(std::sqrt(2.0), k);
    B.support_lo = -1.0;
    B.support_hi = 1.0;
    B.compact_support = true;
    B.weight = [](double x) { return std::sqrt(1.0 - x * x) / pi; };
    return B;
}

StieltjesResult stieltjes_recurrence(const std::function<double(double)>& weight, int n,
                                     int nodes_per_degree) {
    if (n < 1 || n > 200) throw std::invalid_argument("stieltjes_recurrence: need 1 <= n <= 200");
    const int total = std::max(800, nodes_per_degree * n);
    const int panels = (total + 199) / 200;
    PanelGrid th = panel_grid(0.0, pi, panels, 200);

    const std::size_t m = th.size();
    std::vector<double> x(m), W(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = std::cos(th.x[i]);
        const double wv = weight(x[i]);
        if (!(wv > 0.0) || !std::isfinite(wv))
            throw std::invalid_argument("stieltjes_recurrence: weight must be strictly positive on (-1,1)");
        W[i] = th.w[i] * wv * std::sin(th.x[i]);  // dx = sin(theta) dtheta
    }

    StieltjesResult R;
    R.a.assign(n + 1, 0.0);
    R.b.assign(n + 1, 0.0);
    R.gamma.assign(n + 1, 0.0);

    std::vector<double> p_prev(m, 0.0), p_cur(m, 1.0);
    double norm_prev = 1.0;
    double norm_cur = 0.0;  // <p_0,p_0>
    for (std::size_t i = 0; i < m; ++i) norm_cur += W[i];
    R.b[0] = norm_cur;
    R.gamma[0] = 1.0 / std::sqrt(norm_cur);

    for (int k = 0; k <= n; ++k) {
        double xa = 0.0;
        for (std::size_t i = 0; i < m; ++i) xa += W[i] * x[i] * p_cur[i] * p_cur[i];
        R.a[k] = xa / norm_cur;
        if (k == n) break;
        double norm_next = 0.0;
        const double bk = (k == 0) ? 0.0 : R.b[k];
        for (std::size_t i = 0; i < m; ++i) {
            const double pn = (x[i] - R.a[k]) * p_cur[i] - bk * p_prev[i];
            p_prev[i] = p_cur[i];
            p_cur[i] = pn;
            norm_next += W[i] * pn * pn;
        }
        R.b[k + 1] = norm_next / norm_cur;
        if (!(R.b[k + 1] > 0.0) || !std::isfinite(R.b[k + 1]))
            throw std::runtime_error("stieltjes_recurrence: discretization too coarse (b_k <= 0)");
        R.gamma[k + 1] = R.gamma[k] / std::sqrt(R.b[k + 1]);
        norm_prev = norm_cur;
        norm_cur = norm_next;
    }
    (void)norm_prev;
    return R;
}

OrthonormalBasis jacobi_modified_basis(double gamma_plus, double gamma_minus,
                                       std::function<double(double)> h, int n_max) {
    if (gamma_plus <= -1.0 || gamma_minus <= -1.0)
        throw std::invalid_argument("jacobi_modified_basis: exponents must exceed -1");
    auto weight = [gamma_plus, gamma_minus, h](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        return h(x) * std::pow(1.0 - x, gamma_minus) * std::pow(1.0 + x, gamma_plus);
    };
    StieltjesResult R = stieltjes_recurrence(weight, n_max);
    OrthonormalBasis B;
    B.weight_id = WeightId::jacobi_modified;
    B.n_max = n_max;
    B.a = std::move(R.a);
    B.b = std::move(R.b);
    B.gamma = std::move(R.gamma);
    B.support_lo = -1.0;
    B.support_hi = 1.0;
    B.compact_support = true;
    B.weight = weight;
    return B;
}

// --- Plancherel-Rotach ------------------------------------------------------

double pr_H(double x) {
    if (std::abs(x) > 1.0) throw std::invalid_argument("pr_H: |x| must be <= 1");
    return std::acos(x) - x * std::sqrt(1.0 - x * x);
}

double pr_phase(long N, double x) {
    if (std::abs(x) >= 1.0) throw std::invalid_argument("pr_phase: |x| must be < 1");
    return N * pr_H(x) + 0.5 * std::acos(x) - 0.25 * pi;
}

double pr_varphi(double x) {
    if (std::abs(x) >= 1.0) throw std::invalid_argument("pr_varphi: |x| must be < 1");
    return 0.5 * std::acos(x) + 0.25 * pi;
}

double pr_eta(long N) {
    if (N < 1) throw std::invalid_argument("pr_eta: N must be >= 1");
    const double n = static_cast<double>(N);
    return std::exp(0.5 * (n + std::lgamma(n + 1.0) - 1.5 * std::log(pi) - (n + 0.5) * std::log(n)));
}

PRApproximant pr_asymptotic(int N, double x, PrBranch which, int order, double eps) {
    if (N < 2) throw std::invalid_argument("pr_asymptotic: N must be >= 2");
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("pr_asymptotic: eps must be in (0,1)");
    if (std::abs(x) > 1.0 - eps)
        throw std::invalid_argument("pr_asymptotic: |x| must be <= 1 - eps");
    if (order != 0 && order != 1) throw std::invalid_argument("pr_asymptotic: order must be 0 or 1");

    // Work in the natural spectral variable nu = 2k+1 of phi_k; the scaled
    // argument sqrt(2N) x sits at angle t with cos t = sqrt(2N/nu) x.
    const int k = (which == PrBranch::phi_N) ? N : N - 1;
    const double nu = 2.0 * k + 1.0;
    const double c = std::sqrt(2.0 * N / nu) * x;
    if (std::abs(c) >= 1.0)
        throw std::invalid_argument("pr_asymptotic: argument outside the oscillatory bulk");
    const double t = std::acos(c);
    const double st = std::sin(t);
    const double theta = 0.25 * nu * (2.0 * t - std::sin(2.0 * t)) - 0.25 * pi;
    const double pref = std::sqrt(2.0 / pi) / (std::pow(nu, 0.25) * std::sqrt(st));

    PRApproximant out;
    out.N = N;
    out.x = x;
    out.order = order;
    if (order == 1) {
        const double cot = c / st;
        out.correction = (0.25 * cot + (5.0 / 24.0) * cot * cot * cot) / nu * std::sin(theta);
    }
    out.value = pref * (std::cos(theta) + out.correction);
    return out;
}

}  // namespace meso
