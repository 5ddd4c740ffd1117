#include "trispec/coefficients.hpp"

#include <cmath>
#include <numbers>

namespace trispec {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
const double inv_sqrt3 = 1.0 / std::sqrt(3.0);

double coeff_at(const std::vector<double>& v, int k) {
    return (k >= 1 && k <= static_cast<int>(v.size())) ? v[k - 1] : 0.0;
}
}  // namespace

int PeriodicCoefficient::degree() const {
    int d = 0;
    for (int k = static_cast<int>(cos_coeffs.size()); k >= 1; --k)
        if (cos_coeffs[k - 1] != 0.0) { d = k; break; }
    for (int k = static_cast<int>(sin_coeffs.size()); k >= 1; --k)
        if (sin_coeffs[k - 1] != 0.0) { d = std::max(d, k); break; }
    return d;
}

bool PeriodicCoefficient::is_zero() const { return mean == 0.0 && degree() == 0; }

double PeriodicCoefficient::eval(double x) const {
    double v = mean;
    const int n = static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    for (int k = 1; k <= n; ++k) {
        const double a = coeff_at(cos_coeffs, k);
        const double b = coeff_at(sin_coeffs, k);
        if (a == 0.0 && b == 0.0) continue;
        const double w = two_pi * k * x;
        v += a * std::cos(w) + b * std::sin(w);
    }
    return v;
}

double eval(const PeriodicCoefficient& c, double x) { return c.eval(x); }

PeriodicCoefficient PeriodicCoefficient::derivative(int order) const {
    PeriodicCoefficient r = *this;
    for (int o = 0; o < order; ++o) {
        const int n = static_cast<int>(std::max(r.cos_coeffs.size(), r.sin_coeffs.size()));
        PeriodicCoefficient d;
        d.cos_coeffs.assign(n, 0.0);
        d.sin_coeffs.assign(n, 0.0);
        for (int k = 1; k <= n; ++k) {
            const double a = coeff_at(r.cos_coeffs, k);
            const double b = coeff_at(r.sin_coeffs, k);
            d.cos_coeffs[k - 1] = two_pi * k * b;
            d.sin_coeffs[k - 1] = -two_pi * k * a;
        }
        r = std::move(d);
    }
    return r;
}

PeriodicCoefficient PeriodicCoefficient::shift(double t) const {
    const int n = static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    PeriodicCoefficient r;
    r.mean = mean;
    r.cos_coeffs.assign(n, 0.0);
    r.sin_coeffs.assign(n, 0.0);
    for (int k = 1; k <= n; ++k) {
        const double a = coeff_at(cos_coeffs, k);
        const double b = coeff_at(sin_coeffs, k);
        const double c = std::cos(two_pi * k * t);
        const double s = std::sin(two_pi * k * t);
        // cos(w + kwt) expansion: f(x+t) harmonics rotate by angle 2 pi k t.
        r.cos_coeffs[k - 1] = a * c + b * s;
        r.sin_coeffs[k - 1] = -a * s + b * c;
    }
    return r;
}

PeriodicCoefficient PeriodicCoefficient::reflect() const {
    PeriodicCoefficient r = *this;
    for (auto& b : r.sin_coeffs) b = -b;
    return r;
}

PeriodicCoefficient PeriodicCoefficient::negate() const {
    PeriodicCoefficient r = *this;
    r.mean = -r.mean;
    for (auto& a : r.cos_coeffs) a = -a;
    for (auto& b : r.sin_coeffs) b = -b;
    return r;
}

std::complex<double> PeriodicCoefficient::hat_coeff(int n) const {
    if (n == 0) return {mean, 0.0};
    const int k = std::abs(n);
    const double a = coeff_at(cos_coeffs, k);
    const double b = coeff_at(sin_coeffs, k);
    // cos_k -> 1/2 at n = +-k, sin_k -> -i/2 at n = +k, +i/2 at n = -k.
    std::complex<double> h{0.5 * a, -0.5 * b};
    return n > 0 ? h : std::conj(h);
}

double PeriodicCoefficient::tilde_coeff(int n) const {
    const auto h = hat_coeff(n);
    return h.real() - h.imag() * inv_sqrt3;
}

double PeriodicCoefficient::integral0(double x) const {
    double v = mean * x;
    const int n = static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    for (int k = 1; k <= n; ++k) {
        const double a = coeff_at(cos_coeffs, k);
        const double b = coeff_at(sin_coeffs, k);
        if (a == 0.0 && b == 0.0) continue;
        const double w = two_pi * k;
        v += a * std::sin(w * x) / w + b * (1.0 - std::cos(w * x)) / w;
    }
    return v;
}

}  // namespace trispec
