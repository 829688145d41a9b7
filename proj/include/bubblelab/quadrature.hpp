#pragma once
//
// Gauss-Legendre quadrature on (0,1), used for the radial inner products
// on the unit ball. Nodes are strictly interior, so integrands with a
// removable singularity at y=0 never get evaluated at the origin.
//
#include <vector>

#include "bubblelab/params.hpp"

namespace bubblelab {

struct QuadratureRule {
    std::vector<double> nodes;    // in (0,1), ascending
    std::vector<double> weights;  // positive, sum to 1
    int order = 0;                // node count Q; exact for degree <= 2Q-1
};

// Q-point Gauss-Legendre rule mapped to (0,1). Throws for Q < 2.
QuadratureRule gauss_quadrature(int Q);

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
    double acc = 0.0;
    for (int q = 0; q < rule.order; ++q) acc += rule.weights[q] * f(rule.nodes[q]);
    return acc;
}

// Integral over the unit ball of a radial function: 4*pi * int_0^1 f(y) y^2 dy.
template <class F>
double ball_integrate(const QuadratureRule& rule, F&& f) {
    double acc = 0.0;
    for (int q = 0; q < rule.order; ++q) {
        const double y = rule.nodes[q];
        acc += rule.weights[q] * y * y * f(y);
    }
    return 4.0 * 3.14159265358979323846 * acc;
}

}  // namespace bubblelab
