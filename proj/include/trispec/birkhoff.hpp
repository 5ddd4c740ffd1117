#pragma once

#include <array>
#include <vector>

#include "trispec/coefficients.hpp"
#include "trispec/matrix3.hpp"

namespace trispec {

/// Point of the open sector arg z in [0, pi/3) with a lower bound on |z|.
struct SectorPoint {
    cplx z;
    double r_min = 0.0;
    bool valid() const;
};

/// Constant model matrices of the high-energy normal form.
namespace model {
Matrix3C mat_T();                 // diag(tau, tau^2, 1)
Matrix3C mat_T2();                // diag(tau^2, tau, 1)
Matrix3C mat_Omega(cplx z);       // rows (1,1,1), (tau z, tau^2 z, z), (tau^2 z^2, ...)
Matrix3C mat_P();                 // off-diagonal part generator, diagonal 2*diag(T^2)
Matrix3C mat_Q();                 // rank-one (tau, tau^2, 1)^T (1,1,1)
Matrix3C mat_W1();
Matrix3C mat_Q1();                // P W1 - 2 W1 T^2, off-diagonal
cplx kappa();                     // i (tau - 1)
cplx h_func(const CoefficientPair& pair, double x);  // tau (p' - i sqrt3 q)
Matrix3C mat_W2(const CoefficientPair& pair, double x);
Matrix3C mat_W2_deriv(const CoefficientPair& pair, double x);
}  // namespace model

/// One instance of the high-energy integral equation X = I + z^{-m} K X.
/// m = 1 is an exact reformulation of the original system; m = 2, 3 carry the
/// explicitly written perturbation only (their remainder is of the modeled order).
struct BirkhoffSetup {
    int m = 1;
    CoefficientPair pair;
    PeriodicCoefficient dp;    // p'
    PeriodicCoefficient ddp;   // p''
    PeriodicCoefficient dq;    // q'

    static BirkhoffSetup make(int m, const CoefficientPair& pair);

    /// Diagonal entries Theta_j(x, z).
    std::array<cplx, 3> theta(double x, cplx z) const;
    /// J_j(x) = int_0^x Theta_j(s, z) ds, assembled in closed form.
    std::array<cplx, 3> theta_antideriv(double x, cplx z) const;
    Matrix3C phi_mat(double x, cplx z) const;
    Matrix3C u_mat(double x, cplx z) const;
};

/// Kernel entry K_{l j}(x, s, z); one-sided in x - s with the closed-form
/// Theta difference in the exponent.
cplx kernel_K(const BirkhoffSetup& setup, int l, int j, double x, double s, cplx z);

struct SolveOptions {
    int n_nodes = 0;          // 0 = automatic from |z| (>= 513, ~8 nodes per radian)
    double picard_tol = 1e-12;
    double refine_tol = 1e-10;
    int max_nodes = 32769;
    bool refine = true;
    int max_iter = 400;
};

struct XSolution {
    cplx z;
    std::vector<double> grid;
    std::vector<Matrix3C> values;
    int iterations = 0;
    double contraction_estimate = 0.0;

    int index_of(double x) const;  // grid is uniform on [0,2]
    const Matrix3C& at(double x) const { return values[index_of(x)]; }
};

/// Picard iteration on the integral equation; throws NotContractive when the
/// measured contraction factor reaches 0.9, NoConvergence past max_iter.
XSolution solve_X(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt = {});

/// First correction B = K I (on the solver grid).
std::vector<Matrix3C> B_term(const BirkhoffSetup& setup, cplx z, const XSolution& xs);

/// A(x, z) = Omega U X e^{z int Theta} kept as the bounded factor plus the
/// diagonal exponents, so callers can form ratios without overflow.
struct ScaledSolution {
    cplx z;
    std::vector<double> grid;
    std::vector<Matrix3C> bounded;                // Omega U(x) X(x)
    std::vector<std::array<cplx, 3>> exponents;   // z J_j(x)

    int index_of(double x) const;
    /// Materialize A at a grid point; throws OverflowGuard if e^{zJ} overflows.
    Matrix3C materialize(double x) const;
};

ScaledSolution build_A(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt = {});

/// Jost-type solution phi_j(x, z) = A_{1j}(x, z) (x snapped to the solver grid).
cplx jost_phi(const BirkhoffSetup& setup, int j, double x, cplx z,
              const SolveOptions& opt = {});

/// Scaled first-row data of A at x = 0, 1, 2: phi_j(x) = e^{expo[j]} psi[j].
struct PhiTriple {
    cplx z;
    std::array<cplx, 3> expo0, expo1, expo2;
    std::array<cplx, 3> psi0, psi1, psi2;
    Matrix3C x0;  // X(0, z), for det A(0)
    Matrix3C u0;  // U(0, z)
};

PhiTriple phi_triple(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt = {});

/// Reduced characteristic xi(z) = det phi(z) / phi_3(2, z).
cplx xi(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt = {});

/// Sub-sector reduction: phi_1(0)phi_2(1) - phi_2(0)phi_1(1) with the common
/// exponential scale factored out; shares its large-|z| zeros with D on the
/// positive side. Used as the Newton target for large real eigenvalues.
cplx xi2_scaled(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt = {});
cplx xi2_scaled(const PhiTriple& t);

/// log det phi and friends in scaled form: det phi = e^{scale} * mantissa with
/// real scale, grouped so no catastrophic cancellation occurs in the sector.
struct LogDetPhi {
    double scale = 0.0;
    cplx mantissa;      // det phi * e^{-scale}
    cplx det_ux0;       // det(U(0) X(0)); det A(0,z) = -i 3 sqrt3 z^3 det_ux0
};

LogDetPhi logdet_phi(const PhiTriple& t);

/// D(lambda) in scaled form via the factorized representation (valid for
/// z = sector_root(lambda) with |z| above the contraction radius).
struct ScaledValue {
    double scale = 0.0;  // real log-scale
    cplx mantissa;       // value * e^{-scale}
};

ScaledValue char_D_scaled_birkhoff(const BirkhoffSetup& setup, cplx lambda,
                                   const SolveOptions& opt = {});

}  // namespace trispec
