#include "trispec/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "trispec/errors.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);
}  // namespace

double nu_const() { return 2.0 * pi / sqrt3; }

cplx tau_const() { return {-0.5, 0.5 * sqrt3}; }

cplx sector_root(cplx lambda) {
    if (lambda == cplx{0.0, 0.0}) return {0.0, 0.0};
    const double r = std::pow(std::abs(lambda), 1.0 / 3.0);
    const double a = std::arg(lambda);  // (-pi, pi]
    return std::polar(r, a / 3.0);
}

Matrix3C CompanionMatrix::operator()(double x) const {
    const double pv = pair->p.eval(x);
    const double qv = pair->q.eval(x);
    Matrix3C m;
    m(0, 1) = 1.0;
    m(1, 0) = -pv;
    m(1, 2) = 1.0;
    m(2, 0) = lambda - qv;
    m(2, 1) = -pv;
    return m;
}

CompanionMatrix companion(const CoefficientPair& pair, cplx lambda) {
    return CompanionMatrix{&pair, lambda};
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct Dopri5 {
    const CompanionMatrix& rhs_mat;
    RkOptions opt;
    double x;
    Matrix3C y;
    Matrix3C k1;
    bool have_k1 = false;

    Matrix3C deriv(double xv, const Matrix3C& m) const { return rhs_mat(xv) * m; }

    double error_norm(const Matrix3C& err, const Matrix3C& y0, const Matrix3C& y1) const {
        double e = 0.0;
        for (int i = 0; i < 9; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y0.a[i]), std::abs(y1.a[i]));
            e = std::max(e, std::abs(err.a[i]) / sc);
        }
        return e;
    }

    double initial_step(double x_end) const {
        double ynorm = y.max_abs();
        double fnorm = deriv(x, y).max_abs();
        double h = (fnorm > 1e-10) ? 0.01 * (1.0 + ynorm) / fnorm : 1e-4;
        return std::min(h, (x_end - x) * 0.5 + 1e-300);
    }

    // advance to x_end exactly
    void integrate_to(double x_end) {
        if (x_end <= x) return;
        if (!have_k1) { k1 = deriv(x, y); have_k1 = true; }
        double h = initial_step(x_end);
        int rejects_in_row = 0;
        while (x < x_end) {
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
                throw StepSizeUnderflow("adaptive step collapsed at x = " + std::to_string(x));
            bool last = false;
            if (x + 1.01 * h >= x_end) { h = x_end - x; last = true; }

            const Matrix3C k2 = deriv(x + c2 * h, y + k1 * (h * a21));
            const Matrix3C k3 = deriv(x + c3 * h, y + k1 * (h * a31) + k2 * (h * a32));
            const Matrix3C k4 = deriv(x + c4 * h, y + k1 * (h * a41) + k2 * (h * a42) + k3 * (h * a43));
            const Matrix3C k5 = deriv(x + c5 * h, y + k1 * (h * a51) + k2 * (h * a52) + k3 * (h * a53) + k4 * (h * a54));
            const Matrix3C k6 = deriv(x + h, y + k1 * (h * a61) + k2 * (h * a62) + k3 * (h * a63) + k4 * (h * a64) + k5 * (h * a65));
            const Matrix3C ynew = y + k1 * (h * a71) + k3 * (h * a73) + k4 * (h * a74) + k5 * (h * a75) + k6 * (h * a76);
            const Matrix3C k7 = deriv(x + h, ynew);
            const Matrix3C err = k1 * (h * e1) + k3 * (h * e3) + k4 * (h * e4) + k5 * (h * e5) + k6 * (h * e6) + k7 * (h * e7);

            const double en = error_norm(err, y, ynew);
            if (en <= 1.0) {
                x = last ? x_end : x + h;
                y = ynew;
                k1 = k7;  // FSAL
                if (ynew.max_abs() > 1e290)
                    throw OverflowGuard("fundamental matrix exceeds the floating ceiling");
                const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
                h *= fac;
                rejects_in_row = 0;
            } else {
                h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
                if (++rejects_in_row > 60)
                    throw StepSizeUnderflow("step control not converging at x = " + std::to_string(x));
            }
        }
    }
};

}  // namespace

std::vector<Matrix3C> fundamental_matrix(const CoefficientPair& pair, cplx lambda,
                                         const std::vector<double>& xs, const RkOptions& opt) {
    const cplx z = sector_root(lambda);
    const double xmax = xs.empty() ? 0.0 : xs.back();
    if (1.5 * std::max(z.real(), 0.0) * xmax > overflow_guard_log)
        throw OverflowGuard("Re z too large for direct integration; use the scaled representation");

    const CompanionMatrix rhs = companion(pair, lambda);
    Dopri5 stepper{rhs, opt, 0.0, Matrix3C::identity(), {}, false};
    std::vector<Matrix3C> out;
    out.reserve(xs.size());
    for (double xv : xs) {
        stepper.integrate_to(xv);
        out.push_back(stepper.y);
    }
    return out;
}

CharacteristicValue char_D(const CoefficientPair& pair, cplx lambda, const RkOptions& opt) {
    const auto ms = fundamental_matrix(pair, lambda, {1.0, 2.0}, opt);
    CharacteristicValue cv;
    cv.lambda = lambda;
    cv.z = sector_root(lambda);
    cv.d_value = ms[0](0, 1) * ms[1](0, 2) - ms[0](0, 2) * ms[1](0, 1);
    cv.log_scale_hint = 1.5 * std::max(cv.z.real(), 0.0);
    return cv;
}

cplx char_D0(cplx lambda) {
    if (std::abs(lambda) < 1e-2) {
        // entire series: D0 = phi2(1)phi3(2) - phi3(1)phi2(2) with
        // phi_j = sum_k lambda^k x^{3k+j-1}/(3k+j-1)!.
        auto phi = [&](int j, double x) {
            cplx s = 0.0, term;
            double fact = 1.0;
            for (int m = 1; m < j; ++m) fact *= m;
            double xp = std::pow(x, j - 1);
            cplx lp = 1.0;
            for (int k = 0;; ++k) {
                term = lp * xp / fact;
                s += term;
                if (std::abs(term) < 1e-19 && k > 1) break;
                lp *= lambda;
                for (int m = 1; m <= 3; ++m) fact *= (3 * k + j - 1 + m);
                xp *= x * x * x;
            }
            return s;
        };
        return phi(2, 1) * phi(3, 2) - phi(3, 1) * phi(2, 2);
    }
    const cplx z = sector_root(lambda);
    const cplx t = tau_const();
    const cplx s1 = std::sin(0.5 * sqrt3 * z);
    const cplx s2 = std::sin(0.5 * sqrt3 * t * z);
    const cplx s3 = std::sin(0.5 * sqrt3 * t * t * z);
    return 8.0 / (3.0 * sqrt3 * lambda) * s1 * s2 * s3;
}

double symmetry_residual(const CoefficientPair& pair, cplx lambda, const RkOptions& opt) {
    const cplx d1 = char_D(pair, lambda, opt).d_value;
    const cplx d2 = char_D(pair.reflected(), -lambda, opt).d_value;
    return std::abs(d1 - d2);
}

}  // namespace trispec
