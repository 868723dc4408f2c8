#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mesodpp/orthopoly.hpp"

namespace meso {

// --- Equilibrium measures ---------------------------------------------------

// Density rho, origin-anchored cdf F(x) = int_0^x rho, generalized inverse G.
struct EquilibriumMeasure {
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    double bulk_lo = 0.0;
    double bulk_hi = 0.0;
};

EquilibriumMeasure semicircle();  // rho_sc(x) = sqrt(2-x^2)/pi on (-sqrt2, sqrt2)
EquilibriumMeasure arcsine();     // rho(x) = 1/(pi sqrt(1-x^2)) on (-1,1)
EquilibriumMeasure uniform_circle();  // rho = 1/2pi on (0, 2pi), for CUE scans

// --- Correlation kernels ----------------------------------------------------

// Christoffel-Darboux kernel of rank N for a generic orthonormal basis;
// the CD quotient is swapped for the direct sum when |x-y| <= delta_switch
// (1e-4 * domain scale) to avoid cancellation near the diagonal.
double cd_kernel(const OrthonormalBasis& basis, int N, double x, double y);

// K_N^GUE(x,y) = sqrt(N) K_N^{w_G}(sqrt(N) x, sqrt(N) y) for e^{-N Tr H^2};
// the diagonal uses K^{w_G}(x,x) = N {phi_{N-1}^2 - sqrt(1-1/N) phi_N phi_{N-2}}.
double gue_kernel(int N, double x, double y);

// sin(pi nu (xi-zeta)) / (pi (xi-zeta)), diagonal nu.
double sine_kernel(double nu, double xi, double zeta);

// sin(N(x-y)/2) / (2 pi sin((x-y)/2)), 2pi-periodic, diagonal N/2pi.
double cue_kernel(int N, double x, double y);

// Closed form of the rank-N Chebyshev process kernel; equals
// cd_kernel(chebyshev basis, N, x, y).
double chebyshev_kernel(int N, double x, double y);

// Unfolded sine approximant sin[pi N (F(x0+xi N^-a) - F(x0+zeta N^-a))]/(pi(xi-zeta)),
// diagonal limit N^{1-a} rho(x0 + xi N^-a).
double sine_approx(const EquilibriumMeasure& m, int N, double alpha, double x0, double xi,
                   double zeta);

// --- Kernel value object ----------------------------------------------------

enum class KernelFamily { gue, cue, chebyshev, generic_cd, sine };

struct ProjectionKernel {
    KernelFamily family = KernelFamily::gue;
    int N = 0;
    double nu = 0.0;  // sine family only
    std::shared_ptr<const OrthonormalBasis> basis;  // generic_cd only
    // Natural domain and the truncation used for quadrature.
    double domain_lo = 0.0, domain_hi = 0.0;
    double ess_lo = 0.0, ess_hi = 0.0;

    double operator()(double x, double y) const;
    double diagonal(double x) const;
};

ProjectionKernel gue_projection(int N);
ProjectionKernel cue_projection(int N);
ProjectionKernel chebyshev_projection(int N);
ProjectionKernel generic_cd_projection(std::shared_ptr<const OrthonormalBasis> basis, int N);
ProjectionKernel sine_projection(double nu);

// Kernel values on a fixed coordinate grid with wave functions precomputed
// once per coordinate; O(1) per off-diagonal pair.
class KernelTable {
  public:
    KernelTable(const ProjectionKernel& k, std::span<const double> coords);
    double k(std::size_t i, std::size_t j) const;
    double diag(std::size_t i) const { return diag_[i]; }
    std::size_t size() const { return x_.size(); }

  private:
    ProjectionKernel kernel_;
    std::vector<double> x_;
    std::vector<double> diag_;
    std::vector<double> wave_hi_, wave_lo_;  // phi_N, phi_{N-1} at scaled coords
    std::vector<double> scaled_;
    double pref_ = 0.0, delta_ = 0.0;
};

// --- Mesoscopic error scan ---------------------------------------------------

struct ErrorScan {
    std::vector<int> N;
    std::vector<double> sup_error;
    double slope = 0.0;  // least-squares slope of log sup_error vs log N
};

ErrorScan kernel_error_scan(KernelFamily family, double alpha, double x0, double L,
                            std::span<const int> N_list, int grid_n = 33);

double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace meso
