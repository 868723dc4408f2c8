#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mesodpp/charpoly.hpp"
#include "mesodpp/cli.hpp"
#include "mesodpp/kernels.hpp"
#include "mesodpp/orthopoly.hpp"
#include "mesodpp/sampling.hpp"
#include "mesodpp/statistics.hpp"

namespace py = pybind11;
using namespace meso;

namespace {

TestFunction function_by_name(const std::string& id, double t, double eta) {
    if (id == "bump") return bump();
    if (id == "gaussian") return gaussian_bump();
    if (id == "mollified_step") return mollified_step();
    if (id == "g_t") return g_t_function(t, eta);
    if (id == "x") return monomial(1);
    if (id == "x^2") return monomial(2);
    throw std::invalid_argument("unknown test function: " + id);
}

ProjectionKernel kernel_by_name(const std::string& family, int N) {
    if (family == "gue") return gue_projection(N);
    if (family == "cue") return cue_projection(N);
    if (family == "chebyshev") return chebyshev_projection(N);
    throw std::invalid_argument("unknown kernel family: " + family);
}

}  // namespace

PYBIND11_MODULE(_mesodpp, m) {
    m.doc() = "determinantal point processes of unitary-invariant ensembles: kernels, "
              "exact samplers, cumulants and mesoscopic CLT experiments";

    py::class_<SeedStream>(m, "SeedStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("root"), py::arg("index") = 0)
        .def_readwrite("root", &SeedStream::root)
        .def_readwrite("index", &SeedStream::index);

    py::class_<PointConfiguration>(m, "PointConfiguration")
        .def_readonly("points", &PointConfiguration::points)
        .def_readonly("N", &PointConfiguration::N)
        .def_property_readonly("ensemble",
                               [](const PointConfiguration& c) { return ensemble_name(c.ensemble); });

    // orthopoly
    m.def("hermite_phi", &hermite_phi, py::arg("k"), py::arg("x"));
    m.def("hermite_phi_batch",
          py::overload_cast<int, double>(&hermite_phi_batch), py::arg("k_max"), py::arg("x"));
    m.def("chebyshev_u", &chebyshev_u, py::arg("k"), py::arg("x"));
    m.def("chebyshev_wave", &chebyshev_wave, py::arg("k"), py::arg("x"));
    m.def("pr_phase", &pr_phase, py::arg("N"), py::arg("x"));
    m.def("pr_H", &pr_H, py::arg("x"));
    m.def("pr_eta", &pr_eta, py::arg("N"));
    m.def(
        "pr_asymptotic",
        [](int N, double x, const std::string& which, int order, double eps) {
            const PrBranch b = which == "phi_N" ? PrBranch::phi_N : PrBranch::phi_Nm1;
            return pr_asymptotic(N, x, b, order, eps).value;
        },
        py::arg("N"), py::arg("x"), py::arg("which") = "phi_N", py::arg("order") = 1,
        py::arg("eps") = 1e-3);

    // kernels
    m.def("gue_kernel", &gue_kernel, py::arg("N"), py::arg("x"), py::arg("y"));
    m.def("cue_kernel", &cue_kernel, py::arg("N"), py::arg("x"), py::arg("y"));
    m.def("chebyshev_kernel", &chebyshev_kernel, py::arg("N"), py::arg("x"), py::arg("y"));
    m.def("sine_kernel", &sine_kernel, py::arg("nu"), py::arg("xi"), py::arg("zeta"));
    m.def(
        "sine_approx",
        [](const std::string& measure, int N, double alpha, double x0, double xi, double zeta) {
            const EquilibriumMeasure me = measure == "semicircle" ? semicircle() : arcsine();
            return sine_approx(me, N, alpha, x0, xi, zeta);
        },
        py::arg("measure"), py::arg("N"), py::arg("alpha"), py::arg("x0"), py::arg("xi"),
        py::arg("zeta"));
    m.def(
        "kernel_error_scan",
        [](const std::string& family, double alpha, double x0, double L, std::vector<int> Ns,
           int grid_n) {
            KernelFamily f = family == "gue"   ? KernelFamily::gue
                             : family == "cue" ? KernelFamily::cue
                                               : KernelFamily::chebyshev;
            ErrorScan s = kernel_error_scan(f, alpha, x0, L, Ns, grid_n);
            return py::make_tuple(s.N, s.sup_error, s.slope);
        },
        py::arg("family"), py::arg("alpha"), py::arg("x0"), py::arg("L"), py::arg("N_list"),
        py::arg("grid_n") = 33);

    // sampling
    m.def(
        "sample_gue",
        [](int N, std::uint64_t seed, std::uint64_t index) {
            return sample_gue(N, SeedStream{seed, index});
        },
        py::arg("N"), py::arg("seed"), py::arg("index") = 0);
    m.def(
        "sample_cue",
        [](int N, std::uint64_t seed, std::uint64_t index) {
            return sample_cue(N, SeedStream{seed, index});
        },
        py::arg("N"), py::arg("seed"), py::arg("index") = 0);
    m.def(
        "sample_chebyshev",
        [](int N, std::uint64_t seed, std::uint64_t index) {
            return sample_chebyshev(N, SeedStream{seed, index});
        },
        py::arg("N"), py::arg("seed"), py::arg("index") = 0);
    m.def(
        "tridiag_eigenvalues",
        [](std::vector<double> d, std::vector<double> e) { return tridiag_eigenvalues(d, e); },
        py::arg("diag"), py::arg("offdiag"));

    // statistics
    m.def(
        "linear_statistic",
        [](const PointConfiguration& c, const std::string& f, double x0, double alpha, double t,
           double eta) { return linear_statistic(c, function_by_name(f, t, eta), x0, alpha); },
        py::arg("config"), py::arg("f"), py::arg("x0"), py::arg("alpha"), py::arg("t") = 1.0,
        py::arg("eta") = 1.0);
    m.def(
        "h_half_norm_sq",
        [](const std::string& f, const std::string& method, double t, double eta) {
            return h_half_norm_sq(function_by_name(f, t, eta),
                                  method == "fourier" ? NormMethod::fourier
                                                      : NormMethod::double_integral);
        },
        py::arg("f"), py::arg("method") = "double_integral", py::arg("t") = 1.0,
        py::arg("eta") = 1.0);
    m.def(
        "variance_exact",
        [](const std::string& family, int N, const std::string& f, double x0, double alpha,
           double t, double eta) {
            return variance_exact(kernel_by_name(family, N), function_by_name(f, t, eta), x0,
                                  alpha);
        },
        py::arg("family"), py::arg("N"), py::arg("f"), py::arg("x0"), py::arg("alpha"),
        py::arg("t") = 1.0, py::arg("eta") = 1.0);
    m.def(
        "cumulant_trace",
        [](const std::string& family, int N, const std::string& f, double x0, double alpha, int n,
           double t, double eta) {
            return cumulant_trace(kernel_by_name(family, N), function_by_name(f, t, eta), x0,
                                  alpha, n);
        },
        py::arg("family"), py::arg("N"), py::arg("f"), py::arg("x0"), py::arg("alpha"),
        py::arg("n"), py::arg("t") = 1.0, py::arg("eta") = 1.0);
    m.def("upsilon", [](std::vector<double> u) { return upsilon(u); }, py::arg("u"));
    m.def("mcl_permutation_sum", [](std::vector<double> u) { return mcl_permutation_sum(u); },
          py::arg("u"));
    m.def(
        "empirical_cumulants",
        [](std::vector<double> samples) {
            KStatistics k = empirical_cumulants(samples);
            py::dict d;
            d["k1"] = k.k1;
            d["k2"] = k.k2;
            d["k3"] = k.k3;
            d["k4"] = k.k4;
            d["se1"] = k.se1;
            d["se2"] = k.se2;
            d["se3"] = k.se3;
            d["se4"] = k.se4;
            return d;
        },
        py::arg("samples"));
    m.def(
        "clt_experiment",
        [](const std::string& ensemble, const std::string& f, double x0, double alpha, int N,
           std::size_t M, std::uint64_t seed, int threads, double t, double eta) {
            CumulantReport r =
                clt_experiment(ensemble_from_name(ensemble), function_by_name(f, t, eta), x0,
                               alpha, N, M, SeedStream{seed, 0}, threads);
            return meso::cli::report_json(r);
        },
        py::arg("ensemble"), py::arg("f"), py::arg("x0"), py::arg("alpha"), py::arg("N"),
        py::arg("M"), py::arg("seed"), py::arg("threads") = 0, py::arg("t") = 1.0,
        py::arg("eta") = 1.0);

    // charpoly
    m.def("g_t", &g_t_value, py::arg("t"), py::arg("eta"), py::arg("x"));
    m.def("fbm_covariance", &fbm_covariance, py::arg("t"), py::arg("s"), py::arg("eta"));
    m.def(
        "w_statistic",
        [](const PointConfiguration& c, double t, double eta, double x0, double alpha) {
            return w_statistic(c, t, eta, x0, alpha);
        },
        py::arg("config"), py::arg("t"), py::arg("eta"), py::arg("x0"), py::arg("alpha"));

    m.attr("__version__") = meso::cli::kVersion;
}
