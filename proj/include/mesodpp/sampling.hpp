#pragma once

#include <string>
#include <vector>

#include "mesodpp/kernels.hpp"
#include "mesodpp/rng.hpp"

namespace meso {

enum class Ensemble { gue, cue, chebyshev, generic_cd };

std::string ensemble_name(Ensemble e);
Ensemble ensemble_from_name(const std::string& s);

// One sampled eigenvalue/angle configuration.  Points are sorted ascending.
struct PointConfiguration {
    std::vector<double> points;
    Ensemble ensemble = Ensemble::gue;
    int N = 0;
    SeedStream seed;
};

// --- symmetric tridiagonal eigensolver ---------------------------------------

// All eigenvalues of the symmetric tridiagonal matrix (implicit-shift QL with
// Wilkinson shifts, eigenvalues only), sorted ascending.
// offdiag.size() must equal diag.size() - 1.
std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const double> offdiag);

// Number of eigenvalues strictly below x (Sturm sign-count); the bisection
// solver below is the independent oracle for QL results.
int sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x);
double sturm_bisect_eigenvalue(std::span<const double> diag, std::span<const double> offdiag,
                               int rank, double tol = 1e-13);

// Eigenvalues of a dense symmetric matrix (row-major n x n): Householder
// reduction to tridiagonal form, then QL.  Used for Gram/PSD checks.
std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, int n);

// --- samplers -----------------------------------------------------------------

// Dumitriu-Edelman beta=2 tridiagonal model scaled to e^{-N Tr H^2}: diagonal
// ~ N(0,1), off-diagonal ~ chi_{2(N-k)}/sqrt(2), everything divided by
// sqrt(2N).  Joint eigenvalue density prod |dl|^2 e^{-N sum l^2}.
PointConfiguration sample_gue(int N, SeedStream stream);

// Exact HKPV sampler for a rank-N projection kernel (cue | chebyshev |
// generic_cd): point i is drawn from the conditional density
// (K(x,x) - k_S(x)^T K_S^{-1} k_S(x)) / (N - i + 1) by rejection under a
// piecewise-constant majorant refreshed every draw, then the drawn point is
// projected out of the kernel (incremental Cholesky of K_S).
PointConfiguration sample_projection_dpp(const ProjectionKernel& kernel, SeedStream stream);

PointConfiguration sample_cue(int N, SeedStream stream);
PointConfiguration sample_chebyshev(int N, SeedStream stream);

// Raw-sample dump: header line, then one configuration per line of
// comma-separated sorted points.
std::string dump_configurations(std::span<const PointConfiguration> configs);

// Kolmogorov-Smirnov distance between sample points and a cdf given as a
// plain [0,1]-normalized function.
double ks_distance(std::span<const double> sorted_points,
                   const std::function<double(double)>& cdf01);

}  // namespace meso
