#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trispec/coefficients.hpp"

namespace trispec {

/// Flat key = value configuration with array literals, e.g.
///   p.mean = 0.0
///   p.cos  = [0.3]
///   q.sin  = [0.2, 0.0]
///   spectrum.n_max = 10
/// '#' starts a comment. One file per run.
class RunConfig {
  public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_array(const std::string& key) const;
    std::vector<double> get_array_or(const std::string& key) const;

    /// Requires p.* and q.* blocks (at least one key each).
    CoefficientPair coefficient_pair() const;
    PeriodicCoefficient coefficient(const std::string& prefix) const;

    const std::map<std::string, std::string>& raw() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    [[noreturn]] void missing(const std::string& key) const;
};

/// Named tolerance overrides with sane bounds (1e-14 .. 1e-3).
struct ToleranceSet {
    double rk_rtol = 1e-11;
    double rk_atol = 1e-13;
    double newton_tol = 1e-9;
    double det_tol = 1e-9;
    double picard_tol = 1e-12;
    double refine_tol = 1e-10;
    double winding_tol = 1e-3;
    double moment_tol = 1e-7;
    double arc_tol = 1e-5;
    double merge_tol_scale = 1e-6;

    void override_named(const std::string& name, double value);
    static std::vector<std::string> names();
};

std::string format_csv_number(double v);

}  // namespace trispec
