#include "mesodpp/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace meso {

static GaussRule compute_gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

PanelGrid panel_grid(double a, double b, int panels, int nodes_per_panel) {
    if (!(b > a)) throw std::invalid_argument("panel_grid: empty interval");
    if (panels < 1) panels = 1;
    const GaussRule& gl = gauss_legendre(nodes_per_panel);
    PanelGrid g;
    g.x.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
    g.w.reserve(g.x.capacity());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int i = 0; i < nodes_per_panel; ++i) {
            g.x.push_back(mid + 0.5 * h * gl.nodes[i]);
            g.w.push_back(0.5 * h * gl.weights[i]);
        }
    }
    return g;
}

int panels_for_oscillation(double a, double b, double omega, int nodes_per_panel) {
    const double cycles = std::abs(omega) * (b - a) / (2.0 * std::numbers::pi);
    const double cycles_per_panel = nodes_per_panel / 8.0;
    int p = static_cast<int>(std::ceil(cycles / cycles_per_panel));
    return p < 1 ? 1 : p;
}

double integrate(const PanelGrid& g, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(g.x[i]);
    return s;
}

double integrate_panels(double a, double b, int panels, const std::function<double(double)>& f,
                        int nodes_per_panel) {
    return integrate(panel_grid(a, b, panels, nodes_per_panel), f);
}

}  // namespace meso
