#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trispec/coefficients.hpp"

using namespace trispec;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

PeriodicCoefficient random_poly(std::mt19937& rng, int degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(degree), s(degree);
    for (auto& v : c) v = u(rng);
    for (auto& v : s) v = u(rng);
    return {u(rng), c, s};
}

// quadrature oracle for the projection integral defining the tilde coefficients
double tilde_by_quadrature(const PeriodicCoefficient& f, int n) {
    const int m = 1 << 14;
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
        const double x = (k + 0.5) / m;
        s += f.eval(x) * std::cos(2.0 * pi * n * x - pi / 6.0);
    }
    return 2.0 / sqrt3 * s / m;
}
}  // namespace

TEST_CASE("eval basics") {
    CHECK(PeriodicCoefficient{0.0, {1.0}, {}}.eval(0.0) == doctest::Approx(1.0));
    CHECK(PeriodicCoefficient{0.5, {}, {}}.eval(0.37) == doctest::Approx(0.5));
    CHECK(PeriodicCoefficient{0.0, {}, {1.0}}.eval(0.25) == doctest::Approx(1.0));
}

TEST_CASE("periodicity") {
    std::mt19937 rng(7);
    const auto f = random_poly(rng, 5);
    for (double x : {0.1, 0.37, 0.9, 1.7}) CHECK(f.eval(x + 1.0) == doctest::Approx(f.eval(x)));
}

TEST_CASE("derivative termwise") {
    const PeriodicCoefficient c{0.0, {1.0}, {}};
    const auto d = c.derivative(1);
    CHECK(d.sin_coeffs[0] == doctest::Approx(-2.0 * pi));
    CHECK(d.cos_coeffs[0] == doctest::Approx(0.0));

    const PeriodicCoefficient s2{0.0, {0.0, 0.0}, {0.0, 1.0}};
    const auto dd = s2.derivative(2);
    CHECK(dd.sin_coeffs[1] == doctest::Approx(-(4.0 * pi) * (4.0 * pi)));

    std::mt19937 rng(11);
    const auto f = random_poly(rng, 4);
    const auto f0 = f.derivative(0);
    CHECK(f0.eval(0.3) == doctest::Approx(f.eval(0.3)));
    CHECK(f.derivative(1).hat_coeff(0).real() == doctest::Approx(0.0));
}

TEST_CASE("shift") {
    std::mt19937 rng(3);
    const auto f = random_poly(rng, 6);
    const auto g = f.shift(0.31);
    for (double x : {0.0, 0.2, 0.77}) CHECK(g.eval(x) == doctest::Approx(f.eval(x + 0.31)));
    const auto back = g.shift(1.0 - 0.31);
    for (double x : {0.1, 0.5}) CHECK(back.eval(x) == doctest::Approx(f.eval(x)).epsilon(1e-12));

    const PeriodicCoefficient c{0.0, {1.0}, {}};
    const auto sh = c.shift(0.25);  // cos(2 pi (x + 1/4)) = -sin(2 pi x)
    CHECK(sh.sin_coeffs[0] == doctest::Approx(-1.0));
    CHECK(sh.cos_coeffs[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("hat coefficients") {
    PeriodicCoefficient c3{0.0, {0.0, 0.0, 1.0}, {}};
    CHECK(c3.hat_coeff(3).real() == doctest::Approx(0.5));
    CHECK(c3.hat_coeff(3).imag() == doctest::Approx(0.0));
    CHECK(PeriodicCoefficient{0.7, {}, {}}.hat_coeff(0).real() == doctest::Approx(0.7));
    PeriodicCoefficient s2{0.0, {}, {0.0, 1.0}};
    CHECK(s2.hat_coeff(2).imag() == doctest::Approx(-0.5));
    CHECK(s2.hat_coeff(-2).imag() == doctest::Approx(0.5));
}

TEST_CASE("tilde coefficients and identities") {
    PeriodicCoefficient c1{0.0, {1.0}, {}};
    CHECK(c1.tilde_coeff(1) == doctest::Approx(0.5));
    PeriodicCoefficient m{1.0, {}, {}};
    CHECK(m.tilde_coeff(3) == doctest::Approx(0.0));

    std::mt19937 rng(2026);
    for (int trial = 0; trial < 8; ++trial) {
        const auto f = random_poly(rng, 8);
        for (int n = 1; n <= 10; ++n) {
            const auto h = f.hat_coeff(n);
            const double tilde = f.tilde_coeff(n);
            CHECK(tilde == doctest::Approx(h.real() - h.imag() / sqrt3).epsilon(1e-14));
            CHECK(tilde == doctest::Approx(tilde_by_quadrature(f, n)).epsilon(1e-11));
        }
    }
}

TEST_CASE("hat identities under derivative and shift") {
    std::mt19937 rng(5);
    const auto f = random_poly(rng, 8);
    const auto df = f.derivative(1);
    for (int n = -10; n <= 10; ++n) {
        const auto lhs = df.hat_coeff(n);
        const auto rhs = cplx{0.0, 2.0 * pi * n} * f.hat_coeff(n);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    const double t = 0.41;
    const auto g = f.shift(t);
    for (int n = -8; n <= 8; ++n) {
        const auto lhs = g.hat_coeff(n);
        const auto rhs = std::exp(cplx{0.0, 2.0 * pi * n * t}) * f.hat_coeff(n);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    // real coefficients: hat(-n) = conj hat(n)
    for (int n = 1; n <= 8; ++n)
        CHECK(std::abs(f.hat_coeff(-n) - std::conj(f.hat_coeff(n))) < 1e-15);
}

TEST_CASE("shift and derivative commute") {
    std::mt19937 rng(9);
    const auto f = random_poly(rng, 5);
    const auto a = f.shift(0.23).derivative(1);
    const auto b = f.derivative(1).shift(0.23);
    for (double x : {0.0, 0.13, 0.88}) CHECK(a.eval(x) == doctest::Approx(b.eval(x)));
}
