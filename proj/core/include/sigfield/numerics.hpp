#pragma once

#include <functional>
#include <vector>

namespace sigfield {

// Adaptive Simpson quadrature, absolute tolerance, depth-capped.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 60);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    static const GaussLegendre& order(int n);
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    // 95% half-width from the regression standard error of the slope.
    double slope_half_width = 0.0;
};

// Least-squares line through (x_i, y_i).
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// One-sided sign test: P(Binomial(n, 1/2) >= wins).
double sign_test_p_value(int wins, int n);

}  // namespace sigfield
