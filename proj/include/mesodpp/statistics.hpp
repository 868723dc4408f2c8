#pragma once

#include <complex>
#include <optional>
#include <string>

#include "mesodpp/kernels.hpp"
#include "mesodpp/sampling.hpp"

namespace meso {

// --- test functions -----------------------------------------------------------

enum class Smoothness { c0, c1, h_half_only };

struct TestFunction {
    std::function<double(double)> f;
    double support_lo = 0.0, support_hi = 0.0;  // declared support
    bool compact = true;                        // evaluator is 0 outside support
    Smoothness smoothness = Smoothness::c1;
    std::optional<std::function<std::complex<double>(double)>> fourier;  // exact FT, if any
    std::string name;

    double operator()(double x) const {
        if (compact && (x <= support_lo || x >= support_hi)) return 0.0;
        return f(x);
    }
};

TestFunction bump();            // exp(1 - 1/(1-x^2)) on (-1,1)
TestFunction gaussian_bump();   // e^{-x^2} clipped to [-6.5, 6.5]
TestFunction mollified_step();  // smooth transition 1 -> 0, support (-1,1)
TestFunction sine_bump();       // sin(2 pi x) * bump window, support (-1,1)
TestFunction monomial(int p);   // x or x^2, non-compact, for the global regime
TestFunction scaled(const TestFunction& f, double eta, std::string name = "");  // f(eta x)

// --- linear statistics ----------------------------------------------------------

// Xi_N^{x0,alpha} f = sum f(N^alpha (lambda_k - x0)); alpha = 0 gives the
// global statistic.
double linear_statistic(const PointConfiguration& config, const TestFunction& f, double x0,
                        double alpha);

// --- norms -----------------------------------------------------------------------

enum class NormMethod { double_integral, fourier };

// ||f||^2_{H^{1/2}} = int |fhat|^2 |u| du = (1/4pi^2) intint |(f(x)-f(y))/(x-y)|^2.
double h_half_norm_sq(const TestFunction& f, NormMethod method = NormMethod::double_integral);

// ||f||^2_{H^1} = (1/4pi^2) int |f'|^2 (centered differences, h = 1e-5).
double h_one_norm_sq(const TestFunction& f);

// Sigma(f)^2: weight (1-xy)/(sqrt(1-x^2) sqrt(1-y^2)) / 4pi^2 over [-1,1]^2.
double sigma_macro_sq(const TestFunction& f);
// SigmaTilde(f)^2: weight 1/(sqrt sqrt) / pi^2; always >= Sigma(f)^2.
double sigma_tilde_sq(const TestFunction& f);

// --- exact variance & cumulants ---------------------------------------------------

// Var = 1/2 intint |f(x)-f(y)|^2 K(x,y)^2 over (rescaled support) u (kernel
// essential support), panelized Gauss-Legendre.  Throws if one grid
// refinement moves the value by more than the residual tolerance.
double variance_exact(const ProjectionKernel& kernel, const TestFunction& f, double x0,
                      double alpha, bool refine_check = true);

// C^n of the linear statistic via the trace expansion over compositions,
// n <= 3; n = 2 must agree with variance_exact to 1e-8.
double cumulant_trace(const ProjectionKernel& kernel, const TestFunction& f, double x0,
                      double alpha, int n);

// --- combinatorial lemma ------------------------------------------------------------

// Upsilon_n: alternating composition sum with the max of breakpoint partial
// sums, symmetrized over u -> -u (the cumulant integrand is u -> -u invariant
// for real test functions, which fixes the printed sign ambiguity).
// Satisfies Upsilon_2(u,-u) = |u|/2.
double upsilon(std::span<const double> u);

// sum over all n! permutations; |u_1| for n = 2 and 0 for n > 2 on zero-sum u.
double mcl_permutation_sum(std::span<const double> u);

// --- unfolding -----------------------------------------------------------------------

struct UnfoldMap {
    // y(x) = N^alpha / rho(x0) * (F(x0 + N^-alpha x) - F(x0)), anchored y(0)=0
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    double nu_N = 0.0;  // N^{1-alpha} rho(x0)
};

UnfoldMap unfold_map(const EquilibriumMeasure& m, double x0, double alpha, int N);
// f_N(x) = f(N^alpha {G(F(x0) + rho(x0) x / N^alpha) - x0})
TestFunction unfolded_function(const EquilibriumMeasure& m, const TestFunction& f, double x0,
                               double alpha, int N);

// --- empirical cumulants ----------------------------------------------------------------

struct KStatistics {
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0;
    double se1 = 0, se2 = 0, se3 = 0, se4 = 0;  // delete-1 jackknife
    std::size_t M = 0;
};

KStatistics empirical_cumulants(std::span<const double> samples, int max_order = 4);

// --- CLT experiment ------------------------------------------------------------------------

struct CumulantReport {
    std::string ensemble;
    std::string function_name;
    int N = 0;
    double alpha = 0.0;
    double x0 = 0.0;
    std::size_t M = 0;
    SeedStream seed;
    double mean = 0.0;
    KStatistics kstats;
    double target_variance = 0.0;  // ||f||^2_{H1/2} mesoscopic, Sigma(f)^2 global
    std::optional<double> exact_c1, exact_c2, exact_c3;
    double wall_seconds = 0.0;
};

// Draws M configurations, centers the linear statistic, estimates cumulants,
// and attaches the Gaussian target.  Global mode (alpha = 0) on the GUE uses
// the support rescaling lambda -> lambda/sqrt(2) so [-1,1] geometry applies.
CumulantReport clt_experiment(Ensemble ensemble, const TestFunction& f, double x0, double alpha,
                              int N, std::size_t M, SeedStream seed, int threads = 0,
                              bool exact_cumulants = true, int exact_max_order = 3);

}  // namespace meso
