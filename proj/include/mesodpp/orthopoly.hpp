#pragma once

#include <functional>
#include <span>
#include <vector>

namespace meso {

// --- Hermite wave functions, weight e^{-x^2} -------------------------------
//
// phi_k(x) = gamma_k pi_k(x) e^{-x^2/2},  gamma_k = sqrt(2^k / (sqrt(pi) k!)).
// Evaluated by the normalized upward recurrence on the damped functions
//   phi_{k+1} = x sqrt(2/(k+1)) phi_k - sqrt(k/(k+1)) phi_{k-1},
// starting from phi_0 = pi^{-1/4} e^{-x^2/2}; no intermediate overflow.

inline constexpr int kHermiteDegreeCeiling = 100000;

double hermite_phi(int k, double x);
void hermite_phi_batch(int k_max, double x, std::span<double> out);
std::vector<double> hermite_phi_batch(int k_max, double x);

// --- Chebyshev (2nd kind), weight w0 = sqrt(1-x^2)/pi ----------------------
//
// Monic: u_k(x) = sin((k+1) arccos x) / (2^k sqrt(1-x^2)), gamma_k = 2^k sqrt(2).
double chebyshev_u(int k, double x);
// Orthonormal wave function gamma_k u_k sqrt(w0) = sqrt(2/pi) sin((k+1)t)/sqrt(sin t).
double chebyshev_wave(int k, double x);

// --- Generic orthonormal basis ---------------------------------------------

enum class WeightId { hermite_fixed, chebyshev_u, jacobi_modified };

// Monic three-term recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1}; b_0 holds
// the total weight mass.  phi_k are the orthonormal wave functions
// gamma_k p_k sqrt(w); for b_k > 0 the recurrence applies to phi directly.
struct OrthonormalBasis {
    WeightId weight_id = WeightId::hermite_fixed;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> gamma;
    int n_max = 0;
    double support_lo = 0.0, support_hi = 0.0;  // weight support (wave functions vanish outside)
    bool compact_support = false;
    std::function<double(double)> weight;

    double phi(int k, double x) const;
    void phi_batch(int k_max, double x, std::span<double> out) const;
    // gamma_{N-1}/gamma_N = sqrt(b_N), the Christoffel-Darboux prefactor.
    double cd_prefactor(int N) const;
};

OrthonormalBasis hermite_basis(int n_max);
OrthonormalBasis chebyshev_basis(int n_max);
OrthonormalBasis jacobi_modified_basis(double gamma_plus, double gamma_minus,
                                       std::function<double(double)> h, int n_max);

// Discretized Stieltjes procedure for a positive weight on [-1,1]; composite
// Gauss grid in theta (x = cos theta) with >= 20n nodes absorbs algebraic
// endpoint singularities.
struct StieltjesResult {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> gamma;
};

StieltjesResult stieltjes_recurrence(const std::function<double(double)>& weight, int n,
                                     int nodes_per_degree = 24);

// --- Plancherel-Rotach asymptotics -----------------------------------------
//
// H(x) = arccos x - x sqrt(1-x^2),  Psi_N(x) = N H(x) + arccos(x)/2 - pi/4,
// varphi(x) = arccos(x)/2 + pi/4.
double pr_H(double x);
double pr_phase(long N, double x);    // Psi_N
double pr_varphi(double x);
// eta_N -> 2^{1/4}/sqrt(pi) monotonically, |eta_N - limit| = O(1/N); log-gamma
// evaluation, safe for N up to 1e4 and beyond.
double pr_eta(long N);

enum class PrBranch { phi_N, phi_Nm1 };

struct PRApproximant {
    int N = 0;
    double x = 0.0;
    int order = 0;
    double value = 0.0;
    double correction = 0.0;  // the order-1 term actually added (0 for order 0)
};

// Bulk asymptotic approximant of phi_N(sqrt(2N) x) (resp. phi_{N-1}(sqrt(2N) x)).
// Order 1 carries the first correction of the Plancherel-Rotach expansion and
// is accurate to O_eps(N^-2) for |x| <= 1 - eps.
PRApproximant pr_asymptotic(int N, double x, PrBranch which, int order, double eps = 1e-3);

}  // namespace meso
