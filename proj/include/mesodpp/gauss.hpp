#pragma once

#include <functional>
#include <span>
#include <vector>

namespace meso {

// Gauss-Legendre rule on [-1,1].  Nodes/weights are computed by Newton
// iteration on P_n and cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Composite grid: `panels+1` breakpoints between a and b, an n-point rule
// per panel.  Total size = panels * n.
struct PanelGrid {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

PanelGrid panel_grid(double a, double b, int panels, int nodes_per_panel = 400);

// Panel count so that an integrand oscillating with |phase'| <= omega
// (radians per unit length) is resolved with >= ~8 nodes per wavelength.
int panels_for_oscillation(double a, double b, double omega, int nodes_per_panel = 400);

double integrate(const PanelGrid& g, const std::function<double(double)>& f);
double integrate_panels(double a, double b, int panels, const std::function<double(double)>& f,
                        int nodes_per_panel = 400);

}  // namespace meso
