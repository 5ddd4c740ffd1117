#include "trispec/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "trispec/errors.hpp"
#include "trispec/propagator.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

double claimed_exponent(Order o) {
    switch (o) {
        case Order::O0: return 1.0;  // leading term itself
        case Order::O1: return 0.5;
        case Order::O2: return -0.5;
        case Order::O3: return -1.5;
    }
    return 0.0;
}

double predict_positive(const CoefficientPair& pair, int n, Order order) {
    const double nu = nu_const();
    const double nn = nu * n;
    double v = nn * nn * nn;
    if (order == Order::O0) return v;
    const double p0 = pair.p.hat_coeff(0).real();
    v += -2.0 * nn * p0 + nn * pair.p.tilde_coeff(n);
    if (order == Order::O1) return v;
    const double q0 = pair.q.hat_coeff(0).real();
    v += q0 - pair.q.tilde_coeff(n);
    if (order == Order::O2) return v;
    v += 4.0 * p0 * p0 / (3.0 * nn);
    return v;
}
}  // namespace

AsymptoticPrediction predict(const CoefficientPair& pair, int n, Order order) {
    AsymptoticPrediction r;
    r.n = n;
    r.order = order;
    r.claimed_error_exponent = claimed_exponent(order);
    r.value = n > 0 ? predict_positive(pair, n, order)
                    : -predict_positive(pair.reflected(), -n, order);
    return r;
}

double predict_hat_O2(const CoefficientPair& pair, int n) {
    if (n < 0) return -predict_hat_O2(pair.reflected(), -n);
    const double nu = nu_const();
    const double nn = nu * n;
    const double p0 = pair.p.hat_coeff(0).real();
    const double q0 = pair.q.hat_coeff(0).real();
    const auto dpn = pair.p.derivative(1).hat_coeff(n);
    const auto qn = pair.q.hat_coeff(n);
    return nn * nn * nn - 2.0 * nn * p0 + q0
         + (dpn / 3.0 - qn).real() + (qn + dpn).imag() / sqrt3;
}

double predict_hat_O3(const CoefficientPair& pair, int n) {
    if (n < 0) return -predict_hat_O3(pair.reflected(), -n);
    const double nu = nu_const();
    const double nn = nu * n;
    const double p0 = pair.p.hat_coeff(0).real();
    const double q0 = pair.q.hat_coeff(0).real();
    const auto ddpn = pair.p.derivative(2).hat_coeff(n);
    const auto dqn = pair.q.derivative(1).hat_coeff(n);
    return nn * nn * nn - 2.0 * nn * p0 + q0 + 2.0 * p0 * p0 / (sqrt3 * pi * n)
         + ((ddpn / 3.0 - dqn).imag() - (ddpn + dqn).real() / sqrt3) / (2.0 * pi * n);
}

std::vector<ResidualPoint> residual_series(const CoefficientPair& pair, Order order,
                                           const std::vector<std::pair<int, double>>& computed) {
    std::vector<ResidualPoint> out;
    out.reserve(computed.size());
    for (const auto& [n, mu] : computed)
        out.push_back({n, mu - predict(pair, n, order).value});
    return out;
}

DecayFit decay_fit(const std::vector<ResidualPoint>& residuals) {
    std::vector<double> lx, ly;
    for (const auto& r : residuals) {
        if (std::abs(r.residual) < 1e-280 || r.n == 0) continue;
        lx.push_back(std::log(std::abs(static_cast<double>(r.n))));
        ly.push_back(std::log(std::abs(r.residual)));
    }
    const int m = static_cast<int>(lx.size());
    if (m < 6) throw DegenerateFit("fewer than 6 nonzero residuals (better than measurable)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw DegenerateFit("degenerate abscissas");
    DecayFit f;
    f.slope = (m * sxy - sx * sy) / denom;
    const double b = (sy - f.slope * sx) / m;
    double ss = 0;
    for (int i = 0; i < m; ++i) {
        const double e = ly[i] - (f.slope * lx[i] + b);
        ss += e * e;
    }
    f.stderr_slope = m > 2 ? std::sqrt(ss / (m - 2) / (sxx - sx * sx / m)) : 0.0;
    f.points_used = m;
    return f;
}

}  // namespace trispec
