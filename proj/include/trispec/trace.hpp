#pragma once

#include <functional>
#include <map>
#include <vector>

#include "trispec/coefficients.hpp"
#include "trispec/spectrum.hpp"

namespace trispec {

/// V = q - p'/3, the quantity the eigenvalue sums recover.
double potential_V(const CoefficientPair& pair, double x);

struct TraceCheck {
    double t = 0.0;
    int N = 0;
    double lhs = 0.0;            // sum_{|n|<=N} (mu_n(t) - mu_n(0)), contour form
    double rhs = 0.0;            // V(0) - V(t)
    double tail_estimate = 0.0;  // fitted c * N^{-1/2}
    double lhs_perindex = 0.0;   // per-index cross-check (when computed)
    bool perindex_valid = false;
};

struct TraceOptions {
    SpectrumOptions spec{};
    int threads = 0;         // 0 = hardware concurrency
    double arc_tol = 1e-5;   // absolute stop for the arc quadrature of lhs
    int arc_min_nodes = 0;   // 0 = automatic from N
    int arc_max_nodes = 16384;
    bool per_index = false;  // also form the per-index sum over all |n| <= N
};

/// Partial trace sums over the big contour, with the shift-t and shift-0
/// characteristic evaluations differenced node by node so all exponential
/// scales cancel. t = 0 data is computed once and shared across calls.
class TraceEvaluator {
  public:
    TraceEvaluator(const CoefficientPair& pair, int N, const TraceOptions& opt = {});

    double lhs_contour(double t);
    /// sum over 1 <= |n| <= upto of (mu_n(t) - mu_n(0)) via per-index location.
    double per_index_sum(double t, int upto);
    /// fitted tail c N^{-1/2} from the last decade of per-index terms at this t.
    double tail_estimate(double t);
    TraceCheck check(double t);

    int big_index() const { return N_; }

  private:
    struct NodeData {
        cplx mantissa;   // grouped det-phi mantissa (scale dropped; t-independent)
        cplx det_ux0;
    };
    std::vector<NodeData> eval_nodes(const CoefficientPair& shifted,
                                     const std::vector<cplx>& zs) const;
    std::vector<cplx> arc_z(int segments) const;
    double lhs_on_arc(const std::vector<NodeData>& vt, const std::vector<NodeData>& v0,
                      const std::vector<cplx>& zs) const;
    double mu_at(double t, int n);

    CoefficientPair pair_;
    int N_;
    TraceOptions opt_;
    double arc_radius_z_;
    std::map<int, std::vector<NodeData>> base_cache_;  // t = 0, keyed by segment count
    std::map<std::pair<int, long long>, double> mu_cache_;
};

TraceCheck trace_partial_sum(const CoefficientPair& pair, double t, int N,
                             const TraceOptions& opt = {});

struct SampledFunction {
    std::vector<double> t;
    std::vector<double> value;
};

/// q(t) = V(t) + p'(t)/3 with V(t) = V(0) - trace_sum(t), V(0) anchored by q(0)
/// and the known p. trace_sum(t) must return sum (mu_n(t) - mu_n(0)).
SampledFunction recover_q(const std::function<double(double)>& trace_sum,
                          const PeriodicCoefficient& p, double q0,
                          const std::vector<double>& t_grid);

/// p'(t) = 3 (q(t) - V(t)) anchored by p'(0); p(t) = p(0) + int_0^t p'.
/// Throws PeriodicityViolation when the accumulated drift p(1) - p(0) exceeds tol.
SampledFunction recover_p(const std::function<double(double)>& trace_sum,
                          const PeriodicCoefficient& q, double p0, double p_prime0,
                          const std::vector<double>& t_grid,
                          double periodicity_tol = 1e-3);

}  // namespace trispec
