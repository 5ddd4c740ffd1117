#include "trispec/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trispec/asymptotics.hpp"
#include "trispec/errors.hpp"
#include "trispec/parallel.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
}

double potential_V(const CoefficientPair& pair, double x) {
    return pair.q.eval(x) - pair.p.derivative(1).eval(x) / 3.0;
}

TraceEvaluator::TraceEvaluator(const CoefficientPair& pair, int N, const TraceOptions& opt)
    : pair_(pair), N_(N), opt_(opt), arc_radius_z_(nu_const() * (N + 0.25)) {}

std::vector<cplx> TraceEvaluator::arc_z(int segments) const {
    std::vector<cplx> zs(segments + 1);
    for (int k = 0; k <= segments; ++k)
        zs[k] = std::polar(arc_radius_z_, (pi / 3.0) * k / segments);
    return zs;
}

std::vector<TraceEvaluator::NodeData> TraceEvaluator::eval_nodes(
    const CoefficientPair& shifted, const std::vector<cplx>& zs) const {
    const BirkhoffSetup setup = BirkhoffSetup::make(1, shifted);
    std::vector<NodeData> out(zs.size());
    parallel_for(static_cast<int>(zs.size()), opt_.threads, [&](int k) {
        const PhiTriple t = phi_triple(setup, zs[k], opt_.spec.birkhoff);
        const LogDetPhi ld = logdet_phi(t);
        out[k] = {ld.mantissa, ld.det_ux0};
    });
    return out;
}

double TraceEvaluator::lhs_on_arc(const std::vector<NodeData>& vt,
                                  const std::vector<NodeData>& v0,
                                  const std::vector<cplx>& zs) const {
    // Delta log D = log(mant_t / mant_0) - log(detUX0_t / detUX0_0): the real
    // exponential scales and det Omega are shift-independent and cancel.
    const int n = static_cast<int>(zs.size());
    std::vector<cplx> dl(n);
    double prev_arg = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx ratio = (vt[k].mantissa / v0[k].mantissa)
                         * (v0[k].det_ux0 / vt[k].det_ux0);
        double a = std::arg(ratio);
        if (k > 0) {
            while (a - prev_arg > pi) a -= 2.0 * pi;
            while (a - prev_arg < -pi) a += 2.0 * pi;
        }
        prev_arg = a;
        dl[k] = cplx{std::log(std::abs(ratio)), a};
    }
    cplx I = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const cplx zm = 0.5 * (zs[k] + zs[k + 1]);
        I += zm * zm * zm * (dl[k + 1] - dl[k]);
    }
    return I.imag() / pi;
}

double TraceEvaluator::lhs_contour(double t) {
    if (t == 0.0) return 0.0;
    int seg = opt_.arc_min_nodes > 0 ? opt_.arc_min_nodes : std::max(128, 6 * N_);
    const CoefficientPair shifted = pair_.shifted(t);
    double prev = 0.0;
    bool have_prev = false;
    while (seg <= opt_.arc_max_nodes) {
        const std::vector<cplx> zs = arc_z(seg);
        auto base_it = base_cache_.find(seg);
        if (base_it == base_cache_.end())
            base_it = base_cache_.emplace(seg, eval_nodes(pair_, zs)).first;
        const std::vector<NodeData> vt = eval_nodes(shifted, zs);
        const double lhs = lhs_on_arc(vt, base_it->second, zs);
        if (have_prev && std::abs(lhs - prev) <= opt_.arc_tol) return lhs;
        prev = lhs;
        have_prev = true;
        seg *= 2;
    }
    throw QuadratureStall("trace arc quadrature did not settle");
}

double TraceEvaluator::mu_at(double t, int n) {
    const auto key = std::make_pair(n, static_cast<long long>(std::llround(t * 1e12)));
    const auto it = mu_cache_.find(key);
    if (it != mu_cache_.end()) return it->second;
    SpectrumOptions so = opt_.spec;
    so.verify_winding = false;
    const double v = locate_eigenvalue(pair_.shifted(t), n, so).value.real();
    mu_cache_[key] = v;
    return v;
}

double TraceEvaluator::per_index_sum(double t, int upto) {
    // parallel location of all four families (n, -n) x (t, 0)
    std::vector<int> ns;
    for (int k = 1; k <= upto; ++k) { ns.push_back(k); ns.push_back(-k); }
    std::vector<double> dt(ns.size());
    parallel_for(static_cast<int>(ns.size()), opt_.threads, [&](int i) {
        dt[i] = mu_at(t, ns[i]) - mu_at(0.0, ns[i]);
    });
    double s = 0.0;
    for (double v : dt) s += v;
    return s;
}

double TraceEvaluator::tail_estimate(double t) {
    const int lo = std::max(4, N_ / 2);
    std::vector<double> c;
    std::vector<int> ns;
    for (int n = lo; n <= N_; ++n) { ns.push_back(n); ns.push_back(-n); }
    std::vector<double> vals(ns.size());
    parallel_for(static_cast<int>(ns.size()), opt_.threads, [&](int i) {
        vals[i] = std::abs(mu_at(t, ns[i]) - mu_at(0.0, ns[i]));
    });
    for (size_t i = 0; i < ns.size(); ++i)
        c.push_back(vals[i] * std::pow(std::abs(ns[i]), 1.5));
    std::sort(c.begin(), c.end());
    const double cmed = c.empty() ? 0.0 : c[c.size() / 2];
    return 4.0 * cmed / std::sqrt(static_cast<double>(N_));
}

TraceCheck TraceEvaluator::check(double t) {
    TraceCheck tc;
    tc.t = t;
    tc.N = N_;
    tc.lhs = lhs_contour(t);
    tc.rhs = potential_V(pair_, 0.0) - potential_V(pair_, t);
    tc.tail_estimate = tail_estimate(t);
    if (opt_.per_index) {
        tc.lhs_perindex = per_index_sum(t, N_);
        tc.perindex_valid = true;
    }
    return tc;
}

TraceCheck trace_partial_sum(const CoefficientPair& pair, double t, int N,
                             const TraceOptions& opt) {
    TraceEvaluator ev(pair, N, opt);
    return ev.check(t);
}

SampledFunction recover_q(const std::function<double(double)>& trace_sum,
                          const PeriodicCoefficient& p, double q0,
                          const std::vector<double>& t_grid) {
    if (t_grid.size() < 4) throw InsufficientData("recovery grid too coarse");
    const PeriodicCoefficient dp = p.derivative(1);
    const double V0 = q0 - dp.eval(0.0) / 3.0;
    SampledFunction out;
    out.t = t_grid;
    out.value.resize(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        const double V = V0 - trace_sum(t_grid[i]);
        out.value[i] = V + dp.eval(t_grid[i]) / 3.0;
    }
    return out;
}

SampledFunction recover_p(const std::function<double(double)>& trace_sum,
                          const PeriodicCoefficient& q, double p0, double p_prime0,
                          const std::vector<double>& t_grid, double periodicity_tol) {
    if (t_grid.size() < 4) throw InsufficientData("recovery grid too coarse");
    const double V0 = q.eval(0.0) - p_prime0 / 3.0;
    const size_t n = t_grid.size();
    std::vector<double> dp(n);
    for (size_t i = 0; i < n; ++i) {
        const double V = V0 - trace_sum(t_grid[i]);
        dp[i] = 3.0 * (q.eval(t_grid[i]) - V);
    }
    SampledFunction out;
    out.t = t_grid;
    out.value.resize(n);
    out.value[0] = p0;
    for (size_t i = 1; i < n; ++i)
        out.value[i] = out.value[i - 1]
                     + 0.5 * (dp[i] + dp[i - 1]) * (t_grid[i] - t_grid[i - 1]);
    if (std::abs(t_grid.back() - (t_grid.front() + 1.0)) < 1e-12) {
        const double drift = std::abs(out.value.back() - out.value.front());
        if (drift > periodicity_tol)
            throw PeriodicityViolation("p(1) - p(0) drift " + std::to_string(drift));
    }
    return out;
}

}  // namespace trispec
