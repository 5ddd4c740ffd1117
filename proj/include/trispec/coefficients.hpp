#pragma once

#include <complex>
#include <vector>

namespace trispec {

/// Real 1-periodic coefficient stored as a finite trigonometric polynomial
///   f(x) = mean + sum_k cos_coeffs[k-1] cos(2 pi k x) + sin_coeffs[k-1] sin(2 pi k x).
/// All Fourier data below comes from this harmonic table in closed form.
struct PeriodicCoefficient {
    double mean = 0.0;
    std::vector<double> cos_coeffs;  // k = 1, 2, ...
    std::vector<double> sin_coeffs;

    PeriodicCoefficient() = default;
    PeriodicCoefficient(double mean_, std::vector<double> cos_, std::vector<double> sin_)
        : mean(mean_), cos_coeffs(std::move(cos_)), sin_coeffs(std::move(sin_)) {}

    int degree() const;
    bool is_zero() const;

    double eval(double x) const;

    /// Termwise derivative of the given order; order 0 returns a copy.
    PeriodicCoefficient derivative(int order) const;

    /// g with g(x) = f(x + t).
    PeriodicCoefficient shift(double t) const;

    /// g with g(x) = f(-x).
    PeriodicCoefficient reflect() const;

    PeriodicCoefficient negate() const;

    /// hat f_n = int_0^1 e^{-i 2 pi n x} f(x) dx, exact from the table.
    std::complex<double> hat_coeff(int n) const;

    /// tilde f_n = Re hat f_n - Im hat f_n / sqrt(3), n >= 1.
    double tilde_coeff(int n) const;

    /// int_0^x f(s) ds (mean * x plus the periodic antiderivative vanishing at 0).
    double integral0(double x) const;
};

double eval(const PeriodicCoefficient& c, double x);

struct CoefficientPair {
    PeriodicCoefficient p;
    PeriodicCoefficient q;

    /// (p^-, -q^-) of the reflection identity for D; maps mu_{-n} analysis to +n.
    CoefficientPair reflected() const { return {p.reflect(), q.reflect().negate()}; }
    CoefficientPair shifted(double t) const { return {p.shift(t), q.shift(t)}; }
};

struct HatCoefficient {
    int n = 0;
    std::complex<double> value;
};

}  // namespace trispec
