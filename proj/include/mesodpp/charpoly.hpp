#pragma once

#include <complex>

#include "mesodpp/statistics.hpp"

namespace meso {

// g_t(x) = 1/2 log( ((x-t)^2 + eta^2) / (x^2 + eta^2) ), the linear-statistic
// form of the regularized log characteristic polynomial increment.
double g_t_value(double t, double eta, double x);

// ghat_t(u) = (1 - e^{-2 pi i u t}) e^{-2 pi |u| eta} / (2|u|).
std::complex<double> g_t_fourier(double t, double eta, double u);

// Numerical inverse transform of ghat_t; agrees with g_t_value to 1e-6 on
// [-5,5] (oscillation-resolving panels, absolutely convergent for eta > 0).
double g_t_fourier_inverse(double t, double eta, double x);

// TestFunction wrapper carrying the exact transform (H^{1/2}-only smoothness tag).
TestFunction g_t_function(double t, double eta);

// W_N(t) = Xi_N^{x0,alpha} g_t.
double w_statistic(const PointConfiguration& config, double t, double eta, double x0,
                   double alpha);
// Same number through log|det(H - x0 - z_t N^-alpha)| - log|det(H - x0 - z_0 N^-alpha)|.
double w_statistic_logdet(const PointConfiguration& config, double t, double eta, double x0,
                          double alpha);

// <g_t, g_s>_{H^{1/2}} = 1/4 { log(1 + t^2/4eta^2) + log(1 + s^2/4eta^2)
//                              - log(1 + (t-s)^2/4eta^2) }.
double fbm_covariance(double t, double s, double eta);

// ||g_t||^2_{H^{1/2}} three ways: closed form, Fourier quadrature of the exact
// transform, and the real-space double integral.
struct GtNormRoutes {
    double closed_form = 0.0;
    double fourier = 0.0;
    double double_integral = 0.0;
};
GtNormRoutes g_t_norm_sq_routes(double t, double eta);

struct FbmParams {
    double eta = 1.0;
    double alpha = 0.6;
    double x0 = 0.0;
    std::vector<double> grid;  // t_1 < ... < t_k, distinct
};

struct FbmIncrementDiagnostic {
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;  // increments W(a1)-W(a0), W(b1)-W(b0)
    double cov = 0.0;
    double se = 0.0;
    double predicted = 0.0;  // closed-form value implied by fbm_covariance
};

struct FbmReport {
    FbmParams params;
    std::string ensemble;
    int N = 0;
    std::size_t M = 0;
    SeedStream seed;
    std::vector<double> mean;                  // empirical mean of W(t_j)
    std::vector<std::vector<double>> cov;      // empirical covariance (centered at MC mean)
    std::vector<std::vector<double>> cov_se;   // jackknife standard errors
    std::vector<std::vector<double>> cov_closed;  // closed-form covariance
    std::vector<double> exact_mean;            // trace centering cross-check (N <= 400)
    std::vector<double> var_bound_ratio;       // Var[W(t)] / (32 ||g_t||^2)
    std::vector<FbmIncrementDiagnostic> increments;
    double wall_seconds = 0.0;
};

FbmReport fbm_experiment(const FbmParams& params, Ensemble ensemble, int N, std::size_t M,
                         SeedStream seed, int threads = 0, bool exact_centering = true);

}  // namespace meso
