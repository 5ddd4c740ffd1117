#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trispec/deltamodel.hpp"
#include "trispec/errors.hpp"
#include "trispec/propagator.hpp"

using namespace trispec;

namespace {
constexpr double pi = std::numbers::pi;
const CoefficientPair zero_pair{};

CoefficientPair pair_P1() {
    return {{0.0, {0.3}, {}}, {0.0, {0.0, 0.1}, {0.2}}};
}
}  // namespace

TEST_CASE("sector root branch") {
    CHECK(std::abs(sector_root({8.0, 0.0}) - cplx{2.0, 0.0}) < 1e-14);
    const cplx zneg = sector_root({-8.0, 0.0});  // arg lambda = pi -> arg z = pi/3
    CHECK(std::arg(zneg) == doctest::Approx(pi / 3.0));
    CHECK(std::abs(zneg) == doctest::Approx(2.0));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const cplx lam{10.0 * u(rng), 10.0 * u(rng)};
        const cplx z = sector_root(lam);
        CHECK(std::abs(z * z * z - lam) < 1e-12 * (1.0 + std::abs(lam)));
        CHECK(std::arg(z) > -pi / 3.0 - 1e-15);
        CHECK(std::arg(z) <= pi / 3.0 + 1e-15);
    }
}

TEST_CASE("companion matrix") {
    auto c0 = companion(zero_pair, {0.0, 0.0});
    const Matrix3C m0 = c0(0.3);
    CHECK(m0(0, 1) == cplx{1.0, 0.0});
    CHECK(m0(1, 2) == cplx{1.0, 0.0});
    CHECK(m0(2, 0) == cplx{0.0, 0.0});

    auto c1 = companion(zero_pair, {1.0, 0.0});
    CHECK(c1(0.0)(2, 0) == cplx{1.0, 0.0});

    CoefficientPair pc{{0.0, {1.0}, {}}, {}};
    auto ci = companion(pc, {0.0, 1.0});
    const Matrix3C mi = ci(0.0);
    CHECK(mi(1, 0) == cplx{-1.0, 0.0});
    CHECK(mi(2, 0) == cplx{0.0, 1.0});
    CHECK(mi(2, 1) == cplx{-1.0, 0.0});
    // trace vanishes identically
    CHECK(std::abs(mi(0, 0) + mi(1, 1) + mi(2, 2)) == 0.0);
}

TEST_CASE("unperturbed fundamental matrix at lambda 0") {
    const auto ms = fundamental_matrix(zero_pair, {0.0, 0.0}, {1.0});
    const Matrix3C& m = ms[0];
    CHECK(std::abs(m(0, 0) - 1.0) < 1e-11);
    CHECK(std::abs(m(0, 1) - 1.0) < 1e-11);
    CHECK(std::abs(m(0, 2) - 0.5) < 1e-11);
    CHECK(std::abs(m(1, 2) - 1.0) < 1e-11);
    CHECK(std::abs(m(2, 2) - 1.0) < 1e-11);
    CHECK(std::abs(m(2, 0)) < 1e-11);
}

TEST_CASE("initial condition and Liouville identity") {
    const auto pair = pair_P1();
    const auto ms = fundamental_matrix(pair, {50.0, 30.0}, {0.0, 0.7, 1.3, 2.0});
    CHECK(max_abs_diff(ms[0], Matrix3C::identity()) < 1e-13);
    for (const auto& m : ms) CHECK(std::abs(m.det() - 1.0) < 1e-9);
}

TEST_CASE("oracle equivalence with the closed exponential forms") {
    // M first row at p = q = 0 equals phi_j^o for |z| up to 40, mixed argument
    for (const cplx z : {cplx{8.0, 0.0}, cplx{20.0, 11.0}, cplx{13.0, 22.0}, cplx{40.0, 0.1}}) {
        const cplx lam = z * z * z;
        const auto ms = fundamental_matrix(zero_pair, lam, {0.5, 1.0, 2.0});
        const double xs[3] = {0.5, 1.0, 2.0};
        for (int i = 0; i < 3; ++i) {
            double scale = 0.0;
            for (int j = 1; j <= 3; ++j)
                scale = std::max(scale, std::abs(phi_unperturbed(j, xs[i], lam)));
            for (int j = 1; j <= 3; ++j) {
                const cplx want = phi_unperturbed(j, xs[i], lam);
                CHECK(std::abs(ms[i](0, j - 1) - want) < 1e-9 * scale);
            }
        }
    }
}

TEST_CASE("semigroup restart consistency") {
    const auto pair = pair_P1();
    const cplx lam{120.0, 40.0};
    const auto ms = fundamental_matrix(pair, lam, {1.0, 2.0});
    // restart at x = 1 with M(1) as initial data: M(2) = W(2) * M(1) where W solves
    // the same system on [1, 2]; realized by the shifted pair on [0, 1]
    const CoefficientPair sh = pair.shifted(1.0);
    const auto w = fundamental_matrix(sh, lam, {1.0});
    const Matrix3C m2b = w[0] * ms[0];
    CHECK(max_abs_diff(m2b, ms[1]) < 1e-9 * ms[1].max_abs());
}

TEST_CASE("reality and conjugation") {
    const auto pair = pair_P1();
    const auto ms = fundamental_matrix(pair, {77.0, 0.0}, {1.0, 2.0});
    for (const auto& m : ms) CHECK(m.max_abs_imag() < 1e-10 * m.max_abs());

    const cplx lam{30.0, 17.0};
    const auto a = fundamental_matrix(pair, lam, {1.0, 2.0});
    const auto b = fundamental_matrix(pair, std::conj(lam), {1.0, 2.0});
    for (int i = 0; i < 2; ++i)
        CHECK(max_abs_diff(a[i].conj(), b[i]) < 1e-12 * a[i].max_abs());
}

TEST_CASE("char_D basics") {
    CHECK(std::abs(char_D(zero_pair, {0.0, 0.0}).d_value - 1.0) < 1e-10);
    const double nu = nu_const();
    const cplx d = char_D(zero_pair, {nu * nu * nu, 0.0}).d_value;
    CHECK(std::abs(d) < 1e-8);
    // real lambda -> real D
    const auto pair = pair_P1();
    const cplx dr = char_D(pair, {321.0, 0.0}).d_value;
    CHECK(std::abs(dr.imag()) <= 1e-10 * std::abs(dr));
}

TEST_CASE("char_D0 closed form") {
    CHECK(std::abs(char_D0({0.0, 0.0}) - 1.0) < 1e-12);
    const double nu = nu_const();
    for (int n = 1; n <= 5; ++n) {
        const double mu = std::pow(nu * n, 3.0);
        CHECK(std::abs(char_D0({mu, 0.0})) < 1e-9 * mu);
        CHECK(std::abs(char_D0({-mu, 0.0})) < 1e-9 * mu);
    }
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
    for (int i = 0; i < 12; ++i) {
        const cplx lam = std::polar(10.0, u(rng));
        const cplx want = char_D(zero_pair, lam).d_value;
        CHECK(std::abs(char_D0(lam) - want) < 1e-9 * std::abs(want));
    }
    // series / product seam
    for (double r : {0.009, 0.011}) {
        const cplx a = char_D0({r, 0.0004});
        CHECK(std::abs(a) > 0.5);
    }
    CHECK(std::abs(char_D0({0.0100001, 0.0}) - char_D0({0.0099999, 0.0})) < 1e-9);
}

TEST_CASE("symmetry residual") {
    // even p, odd q: the reflected pair equals the original, D(lambda) = D(-lambda)
    CoefficientPair sym{{0.1, {0.4}, {}}, {0.0, {}, {0.3}}};
    for (const cplx lam : {cplx{37.0, 0.0}, cplx{5.0, 2.0}, cplx{-60.0, 11.0}}) {
        const double d = symmetry_residual(sym, lam);
        const double scale = 1.0 + std::abs(char_D(sym, lam).d_value);
        CHECK(d <= 1e-8 * scale);
    }
    // generic pair
    const auto pair = pair_P1();
    const double r = symmetry_residual(pair, {5.0, 2.0});
    CHECK(r <= 1e-8 * (1.0 + std::abs(char_D(pair, {5.0, 2.0}).d_value)));
}

TEST_CASE("overflow guard") {
    CHECK_THROWS_AS(fundamental_matrix(zero_pair, {1.0e8, 0.0}, {2.0}), OverflowGuard);
}
