#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace cfkit {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule mapped to (0,1). Nodes are the roots of P_n found by
// Newton iteration on the three-term recurrence; this is accurate to machine
// precision for the node counts used here (n <= a few thousand).
inline QuadratureRule gauss_legendre_01(int n) {
    if (n < 1) throw invalid_argument_error("gauss_legendre_01: need n >= 1, got " + std::to_string(n));
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2; // roots come in +/- pairs on (-1,1)
    for (int k = 0; k < m; ++k) {
        // Tricomi-style initial guess, then Newton on P_n(x).
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one clean-up pass keeps the weight formula at full accuracy
                double q0 = 1.0, q1 = x;
                for (int j = 2; j <= n; ++j) {
                    double q2 = ((2.0 * j - 1.0) * x * q1 - (j - 1.0) * q0) / j;
                    q0 = q1;
                    q1 = q2;
                }
                dp = n * (x * q1 - q0) / (x * x - 1.0);
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map (-1,1) -> (0,1): node (1+x)/2 with weight w/2; x>0 pairs with -x
        rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<std::size_t>(k)] = 0.5 * w;
        rule.nodes[static_cast<std::size_t>(n - 1 - k)] = 0.5 * (1.0 + x);
        rule.weights[static_cast<std::size_t>(n - 1 - k)] = 0.5 * w;
    }
    return rule;
}

} // namespace cfkit
