#pragma once

#include <vector>

#include "trispec/matrix3.hpp"
#include "trispec/spectrum.hpp"

namespace trispec {

/// Periodic delta-comb example: p = 0, q a comb of strength gamma with kicks
/// at x = t + n, handled through closed formulas (never through the generic
/// integrator).
struct DeltaConfig {
    double gamma = 0.0;
    double t = 0.0;
};

/// Unperturbed fundamental solutions phi_j^o(x, lambda), entire in lambda;
/// the lambda -> 0 limits are x^{j-1}/(j-1)!.
cplx phi_unperturbed(int j, double x, cplx lambda);

/// Kicked solution values phi_j(x, lambda, t) for j = 2, 3 at x = 1 or 2.
cplx delta_phi(int j, int x, cplx lambda, const DeltaConfig& cfg);

/// Characteristic function of the comb operator.
cplx delta_D(cplx lambda, const DeltaConfig& cfg);

/// Winding number of delta_D around a lambda-circle.
int delta_winding(const DeltaConfig& cfg, cplx lambda_center, double lambda_radius,
                  const SpectrumOptions& opt = {});

struct DeltaFlowPoint {
    double t = 0.0;
    cplx mu_pos;       // index +1 branch
    cplx mu_neg;       // index -1 branch
    double disc = 0.0; // (mu_pos - mu_neg)^2, real up to roundoff
};

struct DeltaCollision {
    double t = 0.0;
    cplx mu;
};

struct DeltaFlowResult {
    std::vector<DeltaFlowPoint> points;
    std::vector<DeltaCollision> collisions;  // discriminant sign changes, bisected
};

/// Track mu_{+-1}(t) along the grid via contour pair-moments (robust through
/// collisions); collisions are bisected to 1e-8 in t.
DeltaFlowResult delta_flow(double gamma, const std::vector<double>& t_grid,
                           const SpectrumOptions& opt = {});

/// Single-branch view of delta_flow for n = +1 or -1.
std::vector<FlowPoint> delta_flow_branch(double gamma, int n,
                                         const std::vector<double>& t_grid,
                                         const SpectrumOptions& opt = {});

}  // namespace trispec
