#pragma once

#include <vector>

#include "trispec/coefficients.hpp"

namespace trispec {

enum class Order { O0, O1, O2, O3 };

struct AsymptoticPrediction {
    int n = 0;
    Order order = Order::O0;
    double value = 0.0;
    double claimed_error_exponent = 0.0;  // 1/2, -1/2, -3/2 for O1..O3
};

/// High-energy eigenvalue prediction at the given order. Negative n is handled
/// through the reflection mu_{-n}(p, q) = -mu_n(p^-, -q^-).
AsymptoticPrediction predict(const CoefficientPair& pair, int n, Order order);

/// Variants written directly in hat coefficients of p', p'', q, q'; identical to
/// predict(..., O2/O3) as functions of the harmonic table.
double predict_hat_O2(const CoefficientPair& pair, int n);
double predict_hat_O3(const CoefficientPair& pair, int n);

struct ResidualPoint {
    int n = 0;
    double residual = 0.0;
};

/// residual = computed mu_n - predict(n, order); `computed` pairs (n, mu_n).
std::vector<ResidualPoint> residual_series(const CoefficientPair& pair, Order order,
                                           const std::vector<std::pair<int, double>>& computed);

struct DecayFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    int points_used = 0;
};

/// Least-squares slope of log|residual| against log|n|; throws DegenerateFit
/// when fewer than 6 usable (non-underflowing) points remain.
DecayFit decay_fit(const std::vector<ResidualPoint>& residuals);

}  // namespace trispec
