#pragma once

#include <functional>
#include <vector>

#include "trispec/coefficients.hpp"
#include "trispec/matrix3.hpp"

namespace trispec {

/// nu = 2 pi / sqrt(3); the unperturbed eigenvalues are (nu n)^3.
double nu_const();
/// tau = e^{i 2 pi / 3}.
cplx tau_const();

/// Cube root with arg z in (-pi/3, pi/3]; ties at arg lambda = pi go to pi/3.
cplx sector_root(cplx lambda);

struct RkOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
};

/// Companion matrix P(x, lambda): rows [[0,1,0],[-p,0,1],[lambda-q,-p,0]].
struct CompanionMatrix {
    const CoefficientPair* pair;
    cplx lambda;
    Matrix3C operator()(double x) const;
};

CompanionMatrix companion(const CoefficientPair& pair, cplx lambda);

/// Largest Re(z)*x product the direct integrator accepts before the dominant
/// exponential e^{(3/2) Re z x} exceeds the double range.
constexpr double overflow_guard_log = 690.0;

/// Integrate M' = P M, M(0) = I; returns M at each requested x (sorted, in [0,2]).
/// Throws OverflowGuard / StepSizeUnderflow.
std::vector<Matrix3C> fundamental_matrix(const CoefficientPair& pair, cplx lambda,
                                         const std::vector<double>& xs,
                                         const RkOptions& opt = {});

struct CharacteristicValue {
    cplx lambda;
    cplx d_value;
    cplx z;                    // sector cube root of lambda
    double log_scale_hint = 0; // magnitude log of the dominant exponential, diagnostic
};

/// D(lambda) = phi2(1) phi3(2) - phi3(1) phi2(2) from one integration pass.
CharacteristicValue char_D(const CoefficientPair& pair, cplx lambda,
                           const RkOptions& opt = {});

/// Closed form of D at p = q = 0, normalized so char_D0(0) = 1.
cplx char_D0(cplx lambda);

/// |D(lambda,p,q) - D(-lambda,p^-,-q^-)|.
double symmetry_residual(const CoefficientPair& pair, cplx lambda,
                         const RkOptions& opt = {});

}  // namespace trispec
