#include "trispec/deltamodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trispec/errors.hpp"
#include "trispec/propagator.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
}

cplx phi_unperturbed(int j, double x, cplx lambda) {
    const cplx z = sector_root(lambda);
    const cplx tau = tau_const();
    if (std::abs(z) * std::max(x, 0.3) < 0.6) {
        // series sum_k lambda^k x^{3k+j-1} / (3k+j-1)!
        cplx s = 0.0, lp = 1.0;
        double fact = 1.0;
        for (int m = 1; m < j; ++m) fact *= m;
        double xp = std::pow(x, j - 1);
        for (int k = 0; k < 60; ++k) {
            const cplx term = lp * xp / fact;
            s += term;
            if (std::abs(term) < 1e-20 && k > 1) break;
            lp *= lambda;
            for (int m = 1; m <= 3; ++m) fact *= (3 * k + j - 1 + m);
            xp *= x * x * x;
        }
        return s;
    }
    const cplx e1 = std::exp(z * x), e2 = std::exp(tau * z * x), e3 = std::exp(tau * tau * z * x);
    switch (j) {
        case 1: return (e1 + e2 + e3) / 3.0;
        case 2: return (e1 + tau * tau * e2 + tau * e3) / (3.0 * z);
        default: return (e1 + tau * e2 + tau * tau * e3) / (3.0 * z * z);
    }
}

cplx delta_phi(int j, int x, cplx lambda, const DeltaConfig& cfg) {
    const double g = cfg.gamma, t = cfg.t;
    auto p0 = [&](int jj, double xx) { return phi_unperturbed(jj, xx, lambda); };
    if (x == 1) return p0(j, 1.0) - g * p0(j, t) * p0(3, 1.0 - t);
    return p0(j, 2.0) - g * p0(j, t) * p0(3, 2.0 - t)
         - g * p0(3, 1.0 - t) * (p0(j, t + 1.0) - g * p0(j, t) * p0(3, 1.0));
}

cplx delta_D(cplx lambda, const DeltaConfig& cfg) {
    return delta_phi(2, 1, lambda, cfg) * delta_phi(3, 2, lambda, cfg)
         - delta_phi(3, 1, lambda, cfg) * delta_phi(2, 2, lambda, cfg);
}

namespace {

ScaledValue delta_eval(cplx lambda, const DeltaConfig& cfg) {
    return {0.0, delta_D(lambda, cfg)};
}

ContourScan delta_scan(const DeltaConfig& cfg, cplx center, double radius,
                       const SpectrumOptions& opt, bool want_moments) {
    auto eval = [&cfg](cplx lam) { return delta_eval(lam, cfg); };
    auto nodes = [&](int n) {
        std::vector<cplx> out(n);
        for (int k = 0; k < n; ++k)
            out[k] = center + std::polar(radius, 2.0 * pi * (k + 0.5) / n);
        return out;
    };
    return scan_contour(eval, nodes, opt, want_moments);
}

}  // namespace

int delta_winding(const DeltaConfig& cfg, cplx lambda_center, double lambda_radius,
                  const SpectrumOptions& opt) {
    return delta_scan(cfg, lambda_center, lambda_radius, opt, false).winding;
}

namespace {

struct PairState {
    cplx center;
    double radius;
    cplx mu_pos, mu_neg;
    double disc;
};

// moments of the two tracked roots inside an adaptive circle
PairState pair_roots(double gamma, double t, cplx center, double radius,
                     const SpectrumOptions& opt) {
    const DeltaConfig cfg{gamma, t};
    for (int attempt = 0; attempt < 8; ++attempt) {
        const ContourScan sc = delta_scan(cfg, center, radius, opt, true);
        if (sc.winding == 2) {
            const cplx s1 = sc.moment1;
            const cplx e2 = 0.5 * (s1 * s1 - sc.moment2);
            const cplx sq = std::sqrt(s1 * s1 - 4.0 * e2);
            PairState ps;
            ps.center = center;
            ps.radius = radius;
            ps.mu_pos = 0.5 * (s1 + sq);
            ps.mu_neg = 0.5 * (s1 - sq);
            ps.disc = (s1 * s1 - 4.0 * e2).real();
            // keep both roots comfortably inside; recentre when one drifts out
            const double d = std::max(std::abs(ps.mu_pos - center), std::abs(ps.mu_neg - center));
            if (d < 0.75 * radius) return ps;
            center = 0.5 * (ps.mu_pos + ps.mu_neg);
            radius = std::max(2.5 * std::abs(ps.mu_pos - ps.mu_neg), 0.8 * radius);
            continue;
        }
        // a root escaped: widen around the last centre
        radius *= 1.6;
    }
    throw LostTrack("pair contour never captured exactly two roots");
}

}  // namespace

DeltaFlowResult delta_flow(double gamma, const std::vector<double>& t_grid,
                           const SpectrumOptions& opt) {
    if (t_grid.size() < 2) throw InsufficientData("flow grid needs at least two points");
    const double nu3 = std::pow(nu_const(), 3.0);

    DeltaFlowResult out;
    cplx center{0.0, 0.0};
    double radius = 1.8 * nu3;

    // branch identity by continuity: mu_pos starts at +nu^3
    cplx prev_pos{nu3, 0.0}, prev_neg{-nu3, 0.0};
    for (double t : t_grid) {
        PairState ps = pair_roots(gamma, t, center, radius, opt);
        // assign to branches by minimal total motion
        const double keep = std::abs(ps.mu_pos - prev_pos) + std::abs(ps.mu_neg - prev_neg);
        const double swap = std::abs(ps.mu_pos - prev_neg) + std::abs(ps.mu_neg - prev_pos);
        if (swap < keep) std::swap(ps.mu_pos, ps.mu_neg);
        prev_pos = ps.mu_pos;
        prev_neg = ps.mu_neg;
        center = ps.center;
        radius = ps.radius;
        out.points.push_back({t, ps.mu_pos, ps.mu_neg, ps.disc});
    }

    // collisions: discriminant sign changes, bisected in t
    for (size_t i = 0; i + 1 < out.points.size(); ++i) {
        double a = out.points[i].t, b = out.points[i + 1].t;
        double da = out.points[i].disc, db = out.points[i + 1].disc;
        if (da == 0.0) continue;
        if ((da > 0.0) == (db > 0.0)) continue;
        cplx c = 0.5 * (out.points[i].mu_pos + out.points[i].mu_neg);
        double r = std::max(4.0 * std::abs(out.points[i].mu_pos - out.points[i].mu_neg),
                            0.05 * nu3);
        PairState ps{};
        for (int it = 0; it < 64 && b - a > 1e-8; ++it) {
            const double m = 0.5 * (a + b);
            ps = pair_roots(gamma, m, c, r, opt);
            if ((ps.disc > 0.0) == (da > 0.0)) a = m;
            else b = m;
            c = 0.5 * (ps.mu_pos + ps.mu_neg);
            r = std::max(4.0 * std::abs(ps.mu_pos - ps.mu_neg), 0.05 * nu3);
        }
        if (b - a > 1e-7)
            throw CollisionNotBracketed("discriminant bisection stalled");
        out.collisions.push_back({0.5 * (a + b), 0.5 * (ps.mu_pos + ps.mu_neg)});
    }
    return out;
}

std::vector<FlowPoint> delta_flow_branch(double gamma, int n,
                                         const std::vector<double>& t_grid,
                                         const SpectrumOptions& opt) {
    if (n != 1 && n != -1) throw Error("delta flow tracks indices +1 and -1 only");
    const DeltaFlowResult r = delta_flow(gamma, t_grid, opt);
    std::vector<FlowPoint> out;
    out.reserve(r.points.size());
    for (const auto& p : r.points) {
        EigenvalueRecord rec;
        rec.index = n;
        rec.value = n > 0 ? p.mu_pos : p.mu_neg;
        rec.multiplicity = 1;
        rec.method = LocateMethod::contour_cluster;
        out.push_back({p.t, rec});
    }
    return out;
}

}  // namespace trispec
