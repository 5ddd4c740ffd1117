#include "trispec/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trispec/errors.hpp"
#include "trispec/propagator.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);
const cplx tau = tau_const();
const cplx tau2 = tau * tau;
const std::array<cplx, 3> tvec{tau, tau2, cplx{1.0, 0.0}};
const std::array<cplx, 3> t2vec{tau2, tau, cplx{1.0, 0.0}};
}  // namespace

bool SectorPoint::valid() const {
    const double a = std::arg(z);
    return a >= 0.0 && a < pi / 3.0 && std::abs(z) > r_min;
}

namespace model {

Matrix3C mat_T() {
    Matrix3C m;
    m(0, 0) = tau; m(1, 1) = tau2; m(2, 2) = 1.0;
    return m;
}

Matrix3C mat_T2() {
    Matrix3C m;
    m(0, 0) = tau2; m(1, 1) = tau; m(2, 2) = 1.0;
    return m;
}

Matrix3C mat_Omega(cplx z) {
    Matrix3C m;
    m(0, 0) = 1.0;        m(0, 1) = 1.0;         m(0, 2) = 1.0;
    m(1, 0) = tau * z;    m(1, 1) = tau2 * z;    m(1, 2) = z;
    m(2, 0) = tau2 * z * z; m(2, 1) = tau * z * z; m(2, 2) = z * z;
    return m;
}

Matrix3C mat_P() {
    Matrix3C m;
    m(0, 0) = 2.0 * tau2; m(0, 1) = -tau;       m(0, 2) = -1.0;
    m(1, 0) = -tau2;      m(1, 1) = 2.0 * tau;  m(1, 2) = -1.0;
    m(2, 0) = -tau2;      m(2, 1) = -tau;       m(2, 2) = 2.0;
    return m;
}

Matrix3C mat_Q() {
    Matrix3C m;
    for (int j = 0; j < 3; ++j) {
        m(0, j) = tau;
        m(1, j) = tau2;
        m(2, j) = 1.0;
    }
    return m;
}

Matrix3C mat_W1() {
    const cplx c = cplx{0.0, 1.0} / sqrt3;
    Matrix3C m;
    m(0, 1) = c * tau;   m(0, 2) = -c * tau;
    m(1, 0) = -c * tau2; m(1, 2) = c * tau2;
    m(2, 0) = c;         m(2, 1) = -c;
    return m;
}

Matrix3C mat_Q1() {
    // P W1 - 2 W1 T^2; off-diagonal by the commutator identity behind T1.
    Matrix3C q1 = mat_P() * mat_W1() - (mat_W1() * mat_T2()) * 2.0;
    for (int j = 0; j < 3; ++j) q1(j, j) = 0.0;
    return q1;
}

cplx kappa() { return cplx{0.0, 1.0} * (tau - 1.0); }

cplx h_func(const CoefficientPair& pair, double x) {
    return tau * (pair.p.derivative(1).eval(x) - cplx{0.0, sqrt3} * pair.q.eval(x));
}

namespace {
Matrix3C w2_from_h(cplx h) {
    const cplx hb = std::conj(h);
    Matrix3C m;
    m(0, 1) = h;  m(0, 2) = hb;
    m(1, 0) = hb; m(1, 2) = h;
    m(2, 0) = h;  m(2, 1) = hb;
    return m * (1.0 / 3.0);
}
}  // namespace

Matrix3C mat_W2(const CoefficientPair& pair, double x) {
    return w2_from_h(h_func(pair, x));
}

Matrix3C mat_W2_deriv(const CoefficientPair& pair, double x) {
    const cplx hp = tau * (pair.p.derivative(2).eval(x)
                           - cplx{0.0, sqrt3} * pair.q.derivative(1).eval(x));
    return w2_from_h(hp);
}

}  // namespace model

BirkhoffSetup BirkhoffSetup::make(int m, const CoefficientPair& pair) {
    BirkhoffSetup s;
    s.m = m;
    s.pair = pair;
    s.dp = pair.p.derivative(1);
    s.ddp = pair.p.derivative(2);
    s.dq = pair.q.derivative(1);
    return s;
}

std::array<cplx, 3> BirkhoffSetup::theta(double x, cplx z) const {
    const double pv = pair.p.eval(x);
    std::array<cplx, 3> th;
    const cplx z2 = z * z;
    for (int j = 0; j < 3; ++j)
        th[j] = tvec[j] - 2.0 * pv / (3.0 * z2) * t2vec[j];
    if (m >= 2) {
        const double qv = pair.q.eval(x);
        for (int j = 0; j < 3; ++j) th[j] -= qv / (3.0 * z2 * z) * tvec[j];
    }
    return th;
}

std::array<cplx, 3> BirkhoffSetup::theta_antideriv(double x, cplx z) const {
    const double ip = pair.p.integral0(x);
    std::array<cplx, 3> J;
    const cplx z2 = z * z;
    for (int j = 0; j < 3; ++j)
        J[j] = tvec[j] * x - 2.0 * ip / (3.0 * z2) * t2vec[j];
    if (m >= 2) {
        const double iq = pair.q.integral0(x);
        for (int j = 0; j < 3; ++j) J[j] -= iq / (3.0 * z2 * z) * tvec[j];
    }
    return J;
}

Matrix3C BirkhoffSetup::phi_mat(double x, cplx z) const {
    static const Matrix3C P = model::mat_P();
    static const Matrix3C Q = model::mat_Q();
    static const Matrix3C W1 = model::mat_W1();
    static const Matrix3C Q1 = model::mat_Q1();

    if (m == 1) {
        // -(1/3)( p (P - 2 T^2) + (q/z) Q ); P - 2 T^2 is off-diagonal.
        const double pv = pair.p.eval(x);
        const double qv = pair.q.eval(x);
        Matrix3C poff = P;
        for (int j = 0; j < 3; ++j) poff(j, j) = 0.0;
        return poff * (-pv / 3.0) + Q * (-qv / (3.0 * z));
    }
    if (m == 2) {
        // P1 + (q/3) T - (p^2 / 9z) Q1, with P1 = -(1/3)(q Q + p' W1).
        const double pv = pair.p.eval(x);
        const double qv = pair.q.eval(x);
        const double dpv = dp.eval(x);
        Matrix3C r = Q * (-qv / 3.0) + W1 * (-dpv / 3.0);
        for (int j = 0; j < 3; ++j) r(j, j) += qv / 3.0 * tvec[j];
        r += Q1 * (-pv * pv / (9.0 * z));
        return r;
    }
    // m == 3: -(1/3) W2' - (p^2/9) Q1.
    const double pv = pair.p.eval(x);
    return model::mat_W2_deriv(pair, x) * (-1.0 / 3.0) + Q1 * (-pv * pv / 9.0);
}

Matrix3C BirkhoffSetup::u_mat(double x, cplx z) const {
    Matrix3C u = Matrix3C::identity();
    if (m >= 2) u += model::mat_W1() * (pair.p.eval(x) / (3.0 * z * z));
    if (m >= 3) u += model::mat_W2(pair, x) * (1.0 / (3.0 * z * z * z));
    return u;
}

cplx kernel_K(const BirkhoffSetup& setup, int l, int j, double x, double s, cplx z) {
    const auto Jx = setup.theta_antideriv(x, z);
    const auto Js = setup.theta_antideriv(s, z);
    const cplx e = z * ((Jx[l] - Jx[j]) - (Js[l] - Js[j]));
    if (l < j) return x >= s ? std::exp(e) : cplx{0.0, 0.0};
    return s >= x ? -std::exp(e) : cplx{0.0, 0.0};
}

namespace {

// m_r = int_0^L s^r e^{-mu s} ds, r = 0, 1, 2; series branch keeps small |mu L| exact.
void moments(cplx mu, double L, cplx& m0, cplx& m1, cplx& m2) {
    const cplx x = mu * L;
    if (std::abs(x) < 0.25) {
        cplx term = 1.0, s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < 40; ++k) {
            s0 += term / double(k + 1);
            s1 += term / double(k + 2);
            s2 += term / double(k + 3);
            term *= -x / double(k + 1);
            if (std::abs(term) < 1e-19 && k > 2) break;
        }
        m0 = L * s0;
        m1 = L * L * s1;
        m2 = L * L * L * s2;
        return;
    }
    const cplx e = std::exp(-x);
    m0 = (1.0 - e) / mu;
    m1 = (m0 - L * e) / mu;
    m2 = (2.0 * m1 - L * L * e) / mu;
}

// Per-panel, per-entry precomputed quadrature data: all z-dependent exponential
// factors are sweep-invariant, so Picard sweeps reduce to small dot products.
struct PanelData {
    cplx exp_dg;     // e^{g(k+1)-g(k)}
    cplx fold[3];    // e^{-r} at the three stencil nodes
    int base;        // first stencil node index
    double t0;       // stencil offset of the first node relative to x_k
    cplx m0, m1, m2; // moments of e^{-slope s} over [0, h]
};

struct EntryKernel {
    std::vector<cplx> g;          // g(x_k) = z (J_l - J_j)(x_k)
    std::vector<PanelData> panel;
};

struct KernelCache {
    int n = 0;
    double h = 0.0;
    std::array<EntryKernel, 9> entry;  // index 3*l + j
};

KernelCache build_cache(const BirkhoffSetup& setup, cplx z, const std::vector<double>& xs) {
    KernelCache kc;
    const int n = static_cast<int>(xs.size());
    kc.n = n;
    kc.h = xs[1] - xs[0];
    std::vector<std::array<cplx, 3>> J(n);
    for (int k = 0; k < n; ++k) J[k] = setup.theta_antideriv(xs[k], z);

    for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j) {
            EntryKernel& ek = kc.entry[3 * l + j];
            ek.g.resize(n);
            for (int k = 0; k < n; ++k) ek.g[k] = z * (J[k][l] - J[k][j]);
            ek.panel.resize(n - 1);
            for (int k = 0; k + 1 < n; ++k) {
                PanelData& pd = ek.panel[k];
                const cplx dg = ek.g[k + 1] - ek.g[k];
                const cplx slope = dg / kc.h;
                pd.exp_dg = std::exp(dg);
                const bool forward = l < j;
                int base;
                double t0;
                if (forward) {
                    if (k == 0) { base = 0; t0 = 0.0; }
                    else { base = k - 1; t0 = -kc.h; }
                } else {
                    if (k == n - 2) { base = k - 1; t0 = -kc.h; }
                    else { base = k; t0 = 0.0; }
                }
                pd.base = base;
                pd.t0 = t0;
                for (int ii = 0; ii < 3; ++ii) {
                    const double tt = t0 + ii * kc.h;
                    const cplx r = ek.g[base + ii] - ek.g[k] - slope * tt;
                    pd.fold[ii] = std::exp(-r);
                }
                moments(slope, kc.h, pd.m0, pd.m1, pd.m2);
            }
        }
    return kc;
}

// One application of K to F-values (F = Phi X at nodes), entry (l, j).
void apply_entry(const EntryKernel& ek, int l, int j, int n, double h,
                 const std::vector<cplx>& f, std::vector<cplx>& out) {
    const bool forward = l < j;
    if (forward) {
        cplx acc = 0.0;
        out[0] = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            const PanelData& pd = ek.panel[k];
            const cplx f0 = pd.fold[0] * f[pd.base];
            const cplx f1 = pd.fold[1] * f[pd.base + 1];
            const cplx f2 = pd.fold[2] * f[pd.base + 2];
            // Newton form -> monomial coefficients on the panel-local axis
            const cplx d01 = (f1 - f0) / h;
            const cplx d012 = (f2 - 2.0 * f1 + f0) / (2.0 * h * h);
            const double u0 = pd.t0, u1 = pd.t0 + h;
            const cplx c2 = d012;
            const cplx c1 = d01 - d012 * (u0 + u1);
            const cplx c0 = f0 - u0 * d01 + d012 * u0 * u1;
            const cplx pint = c0 * pd.m0 + c1 * pd.m1 + c2 * pd.m2;
            acc = pd.exp_dg * (acc + pint);
            out[k + 1] = acc;
        }
    } else {
        cplx acc = 0.0;
        out[n - 1] = 0.0;
        for (int k = n - 2; k >= 0; --k) {
            const PanelData& pd = ek.panel[k];
            const cplx f0 = pd.fold[0] * f[pd.base];
            const cplx f1 = pd.fold[1] * f[pd.base + 1];
            const cplx f2 = pd.fold[2] * f[pd.base + 2];
            const cplx d01 = (f1 - f0) / h;
            const cplx d012 = (f2 - 2.0 * f1 + f0) / (2.0 * h * h);
            const double u0 = pd.t0, u1 = pd.t0 + h;
            const cplx c2 = d012;
            const cplx c1 = d01 - d012 * (u0 + u1);
            const cplx c0 = f0 - u0 * d01 + d012 * u0 * u1;
            const cplx pint = c0 * pd.m0 + c1 * pd.m1 + c2 * pd.m2;
            acc = acc / pd.exp_dg + pint;
            out[k] = -acc;
        }
    }
}

struct Solver {
    const BirkhoffSetup& setup;
    cplx z;
    std::vector<double> xs;
    std::vector<Matrix3C> phi_nodes;
    KernelCache kc;

    Solver(const BirkhoffSetup& s, cplx zz, int n) : setup(s), z(zz) {
        xs.resize(n);
        for (int k = 0; k < n; ++k) xs[k] = 2.0 * k / (n - 1);
        phi_nodes.resize(n);
        for (int k = 0; k < n; ++k) phi_nodes[k] = s.phi_mat(xs[k], z);
        kc = build_cache(s, z, xs);
    }

    void apply_K(const std::vector<Matrix3C>& X, std::vector<Matrix3C>& KX) const {
        const int n = kc.n;
        std::vector<cplx> f(n), out(n);
        for (int l = 0; l < 3; ++l)
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < n; ++k) {
                    cplx s = 0.0;
                    for (int a = 0; a < 3; ++a) s += phi_nodes[k](l, a) * X[k](a, j);
                    f[k] = s;
                }
                apply_entry(kc.entry[3 * l + j], l, j, n, kc.h, f, out);
                for (int k = 0; k < n; ++k) KX[k](l, j) = out[k];
            }
    }

    // Full Picard iteration; returns max change of the last step.
    void solve(std::vector<Matrix3C>& X, int& iters, double& contraction,
               double picard_tol, int max_iter) const {
        const int n = kc.n;
        X.assign(n, Matrix3C::identity());
        std::vector<Matrix3C> KX(n);
        const double zm = std::pow(std::abs(z), setup.m);
        const cplx zmc = std::pow(z, setup.m);
        contraction = 0.0;
        for (iters = 1; iters <= max_iter; ++iters) {
            apply_K(X, KX);
            double diff = 0.0;
            for (int k = 0; k < n; ++k) {
                Matrix3C xn = Matrix3C::identity() + KX[k] * (1.0 / zmc);
                diff = std::max(diff, max_abs_diff(xn, X[k]));
                X[k] = xn;
            }
            if (iters == 1) {
                double knorm = 0.0;
                for (int k = 0; k < n; ++k) knorm = std::max(knorm, KX[k].max_abs());
                contraction = knorm / zm;
                if (contraction >= 0.9)
                    throw NotContractive("kernel norm / |z|^m = " + std::to_string(contraction));
            }
            if (diff <= picard_tol) return;
        }
        throw NoConvergence("Picard iteration did not settle");
    }
};

int auto_nodes(cplx z, int requested, int max_nodes) {
    if (requested > 0) return requested;
    int n = 513;
    while (n - 1 < 8.0 * std::abs(z) && 2 * (n - 1) + 1 <= max_nodes) n = 2 * (n - 1) + 1;
    return n;
}

}  // namespace

int XSolution::index_of(double x) const {
    const int n = static_cast<int>(grid.size());
    const int k = static_cast<int>(std::lround(x / 2.0 * (n - 1)));
    return std::clamp(k, 0, n - 1);
}

int ScaledSolution::index_of(double x) const {
    const int n = static_cast<int>(grid.size());
    const int k = static_cast<int>(std::lround(x / 2.0 * (n - 1)));
    return std::clamp(k, 0, n - 1);
}

XSolution solve_X(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt) {
    int n = auto_nodes(z, opt.n_nodes, opt.max_nodes);
    XSolution sol;
    sol.z = z;
    Solver sv(setup, z, n);
    sv.solve(sol.values, sol.iterations, sol.contraction_estimate, opt.picard_tol, opt.max_iter);
    sol.grid = sv.xs;

    while (opt.refine && 2 * (n - 1) + 1 <= opt.max_nodes) {
        const int n2 = 2 * (n - 1) + 1;
        Solver sv2(setup, z, n2);
        XSolution fine;
        fine.z = z;
        sv2.solve(fine.values, fine.iterations, fine.contraction_estimate, opt.picard_tol,
                  opt.max_iter);
        fine.grid = sv2.xs;
        double shift = 0.0;
        for (int k = 0; k < n; ++k)
            shift = std::max(shift, max_abs_diff(sol.values[k], fine.values[2 * k]));
        sol = std::move(fine);
        n = n2;
        if (shift <= opt.refine_tol) break;
        if (2 * (n - 1) + 1 > opt.max_nodes)
            throw QuadratureStall("grid refinement hit the node cap with shift " +
                                  std::to_string(shift));
    }
    return sol;
}

std::vector<Matrix3C> B_term(const BirkhoffSetup& setup, cplx z, const XSolution& xsol) {
    const int n = static_cast<int>(xsol.grid.size());
    Solver sv(setup, z, n);
    std::vector<Matrix3C> eye(n, Matrix3C::identity()), B(n);
    sv.apply_K(eye, B);
    return B;
}

ScaledSolution build_A(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt) {
    XSolution xsol = solve_X(setup, z, opt);
    const int n = static_cast<int>(xsol.grid.size());
    ScaledSolution a;
    a.z = z;
    a.grid = xsol.grid;
    a.bounded.resize(n);
    a.exponents.resize(n);
    const Matrix3C omega = model::mat_Omega(z);
    for (int k = 0; k < n; ++k) {
        a.bounded[k] = omega * setup.u_mat(a.grid[k], z) * xsol.values[k];
        const auto J = setup.theta_antideriv(a.grid[k], z);
        for (int j = 0; j < 3; ++j) a.exponents[k][j] = z * J[j];
    }
    return a;
}

Matrix3C ScaledSolution::materialize(double x) const {
    const int k = index_of(x);
    Matrix3C m = bounded[k];
    for (int j = 0; j < 3; ++j) {
        if (exponents[k][j].real() > 700.0)
            throw OverflowGuard("exponential factor exceeds the floating ceiling");
        const cplx e = std::exp(exponents[k][j]);
        for (int r = 0; r < 3; ++r) m(r, j) *= e;
    }
    return m;
}

cplx jost_phi(const BirkhoffSetup& setup, int j, double x, cplx z, const SolveOptions& opt) {
    const ScaledSolution a = build_A(setup, z, opt);
    const int k = a.index_of(x);
    if (a.exponents[k][j - 1].real() > 700.0)
        throw OverflowGuard("phi_j exceeds the floating ceiling");
    return a.bounded[k](0, j - 1) * std::exp(a.exponents[k][j - 1]);
}

PhiTriple phi_triple(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt) {
    XSolution xsol = solve_X(setup, z, opt);
    PhiTriple t;
    t.z = z;
    auto fill = [&](double x, std::array<cplx, 3>& expo, std::array<cplx, 3>& psi) {
        const int k = xsol.index_of(x);
        const Matrix3C ux = setup.u_mat(x, z) * xsol.values[k];
        const auto J = setup.theta_antideriv(x, z);
        for (int j = 0; j < 3; ++j) {
            expo[j] = z * J[j];
            psi[j] = ux(0, j) + ux(1, j) + ux(2, j);  // first row of Omega * UX
        }
    };
    fill(0.0, t.expo0, t.psi0);
    fill(1.0, t.expo1, t.psi1);
    fill(2.0, t.expo2, t.psi2);
    t.x0 = xsol.values[0];
    t.u0 = setup.u_mat(0.0, z);
    return t;
}

cplx xi2_scaled(const PhiTriple& t) {
    const cplx e1 = t.expo1[1];  // z J_2(1)
    const cplx e2 = t.expo1[0];  // z J_1(1)
    const cplx sc = 0.5 * (e1 + e2);
    return std::exp(e1 - sc) * t.psi0[0] * t.psi1[1] - std::exp(e2 - sc) * t.psi0[1] * t.psi1[0];
}

cplx xi2_scaled(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt) {
    return xi2_scaled(phi_triple(setup, z, opt));
}

LogDetPhi logdet_phi(const PhiTriple& t) {
    // det phi = phi3(2) B12(0,1) - phi3(1) B12(0,2) + phi3(0) B12(1,2),
    // each B12(a,b) = phi1(a)phi2(b) - phi2(a)phi1(b) with max-exponent factoring.
    const std::array<const std::array<cplx, 3>*, 3> expo{&t.expo0, &t.expo1, &t.expo2};
    const std::array<const std::array<cplx, 3>*, 3> psi{&t.psi0, &t.psi1, &t.psi2};
    struct Term { double scale; cplx mant; };
    std::array<Term, 3> terms;
    const int idx[3][3] = {{2, 0, 1}, {1, 0, 2}, {0, 1, 2}};
    const double sgn[3] = {1.0, -1.0, 1.0};
    for (int it = 0; it < 3; ++it) {
        const int c = idx[it][0], a = idx[it][1], b = idx[it][2];
        const cplx e1 = (*expo[a])[0] + (*expo[b])[1];
        const cplx e2 = (*expo[a])[1] + (*expo[b])[0];
        const double em = std::max(e1.real(), e2.real());
        const cplx br = std::exp(e1 - em) * (*psi[a])[0] * (*psi[b])[1]
                      - std::exp(e2 - em) * (*psi[a])[1] * (*psi[b])[0];
        const cplx e3 = (*expo[c])[2];
        terms[it].scale = em + e3.real();
        terms[it].mant = sgn[it] * br * (*psi[c])[2] * std::exp(cplx{0.0, e3.imag()});
    }
    LogDetPhi out;
    out.scale = std::max({terms[0].scale, terms[1].scale, terms[2].scale});
    cplx s = 0.0;
    for (const auto& tm : terms) s += tm.mant * std::exp(cplx{tm.scale - out.scale, 0.0});
    out.mantissa = s;
    out.det_ux0 = (t.u0 * t.x0).det();
    return out;
}

cplx xi(const BirkhoffSetup& setup, cplx z, const SolveOptions& opt) {
    const PhiTriple t = phi_triple(setup, z, opt);
    const LogDetPhi ld = logdet_phi(t);
    // xi = det phi / phi3(2) = e^{scale - z J3(2)} mantissa / psi3(2)
    const cplx e = cplx{ld.scale, 0.0} - t.expo2[2];
    if (e.real() > 700.0) throw OverflowGuard("xi exceeds the floating ceiling");
    return ld.mantissa / t.psi2[2] * std::exp(e);
}

ScaledValue char_D_scaled_birkhoff(const BirkhoffSetup& setup, cplx lambda,
                                   const SolveOptions& opt) {
    const cplx z = sector_root(lambda);
    const PhiTriple t = phi_triple(setup, z, opt);
    const LogDetPhi ld = logdet_phi(t);
    // D = det phi / det A(0, z), det A(0, z) = det Omega det(U(0) X(0)).
    const cplx det_omega = cplx{0.0, -3.0 * sqrt3} * z * z * z;
    ScaledValue v;
    v.scale = ld.scale;
    v.mantissa = ld.mantissa / (det_omega * ld.det_ux0);
    return v;
}

}  // namespace trispec
