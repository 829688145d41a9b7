#include "bubblelab/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace bubblelab {

// Nodes on [-1,1] by Newton iteration on P_Q with the asymptotic start
// cos(pi*(i+0.75)/(Q+0.5)); converges to full precision in a few steps.
QuadratureRule gauss_quadrature(int Q) {
    if (Q < 2) throw ValidationError("quadrature order must be at least 2");
    QuadratureRule rule;
    rule.order = Q;
    rule.nodes.resize(Q);
    rule.weights.resize(Q);
    const int m = (Q + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (Q + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= Q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = Q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [0,1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[Q - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[Q - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace bubblelab
