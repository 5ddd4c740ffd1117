#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "trispec/birkhoff.hpp"
#include "trispec/coefficients.hpp"
#include "trispec/propagator.hpp"

namespace trispec {

enum class LocateMethod { disk_newton, contour_cluster, continuation };

struct EigenvalueRecord {
    int index = 0;                  // nonzero; sign follows the labeling order
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;          // scaled characteristic magnitude at the root
    LocateMethod method = LocateMethod::disk_newton;
};

/// z-plane counting disk of radius nu/4 around nu n (n > 0) or around
/// e^{i pi/3} nu |n| together with its conjugate twin (n < 0).
struct CountingDisk {
    int index = 0;
    cplx center_z;
    double radius_z = 0.0;
    static CountingDisk for_index(int n);
};

struct Contour {
    enum class Kind { big_circle, small_circle, z_disk, lambda_circle };
    Kind kind = Kind::big_circle;
    int index = 0;        // N for big_circle, n for small_circle / z_disk
    int node_count = 0;   // 0 = adaptive
    cplx center;          // z-plane center (z_disk/small_circle) or lambda center
    double radius = 0.0;

    static Contour gamma(int N, int nodes = 0);        // |z| = nu (N + 1/4)
    static Contour ell(int n, int nodes = 0);          // |z - nu n| = pi/4
    static Contour disk(int n, int nodes = 0);         // counting disk boundary
    static Contour circle(cplx lambda_center, double lambda_radius, int nodes = 0);

    std::vector<cplx> lambda_nodes(int n) const;
};

/// Options shared by the contour/Newton machinery.
struct SpectrumOptions {
    RkOptions rk{};
    SolveOptions birkhoff{};
    double z_direct_max = 12.0;   // switch point direct integration -> scaled route
    double newton_tol = 1e-9;     // |last lambda increment| <= tol * max(1, |z|)
    int newton_max_iter = 60;
    double winding_tol = 1e-3;    // |raw winding - integer| accepted
    double moment_tol = 1e-7;     // relative stop for cluster moments
    int contour_min_nodes = 64;
    int contour_max_nodes = 65536;
    bool verify_winding = true;   // re-verify Newton roots by winding 1
    double merge_tol_scale = 1e-6;
    int quadtree_depth_cap = 12;
};

/// Stable characteristic evaluation: direct integration for small |z|, the
/// scaled factorized representation beyond; D = mantissa * e^{scale}.
class CharEvaluator {
  public:
    CharEvaluator(const CoefficientPair& pair, const SpectrumOptions& opt);
    ScaledValue eval(cplx lambda) const;
    const SpectrumOptions& options() const { return opt_; }
    const CoefficientPair& pair() const { return pair_; }

  private:
    CoefficientPair pair_;
    SpectrumOptions opt_;
    BirkhoffSetup setup_;
};

struct ContourScan {
    double winding_raw = 0.0;
    int winding = 0;
    cplx moment1;   // sum of enclosed zeros
    cplx moment2;   // sum of squares of enclosed zeros
    int nodes_used = 0;
};

/// Winding number and first two log-derivative moments along a closed lambda
/// contour, with adaptive node doubling. `eval` must return scaled values of an
/// analytic function with conj symmetry handled by the caller-side evaluator.
ContourScan scan_contour(const std::function<ScaledValue(cplx)>& eval,
                         const std::function<std::vector<cplx>(int)>& nodes,
                         const SpectrumOptions& opt, bool want_moments);

int winding_count(const CoefficientPair& pair, const Contour& contour,
                  const SpectrumOptions& opt = {});

cplx cluster_sum(const CoefficientPair& pair, const Contour& contour,
                 const SpectrumOptions& opt = {});

EigenvalueRecord locate_eigenvalue(const CoefficientPair& pair, int n,
                                   const SpectrumOptions& opt = {});

std::vector<EigenvalueRecord> spectrum_range(const CoefficientPair& pair, int N,
                                             const SpectrumOptions& opt = {});

struct FlowPoint {
    double t = 0.0;
    EigenvalueRecord record;
};

std::vector<FlowPoint> eigenvalue_flow(const CoefficientPair& pair, int n,
                                       const std::vector<double>& t_grid,
                                       const SpectrumOptions& opt = {});

}  // namespace trispec
