#include "trispec/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trispec/errors.hpp"

namespace trispec {

namespace {
std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& s, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": field '" + key
                          + "' is not a number: '" + s + "'");
    }
}
}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_[key] = val;
        cfg.lines_[key] = lineno;
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

void RunConfig::missing(const std::string& key) const {
    throw ConfigError("missing required field '" + key + "'");
}

double RunConfig::get_double(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) missing(key);
    return parse_number(it->second, key, lines_.at(key));
}

double RunConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int RunConfig::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9)
        throw ConfigError("field '" + key + "' must be an integer");
    return i;
}

int RunConfig::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> RunConfig::get_array(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) missing(key);
    const std::string& s = it->second;
    const int line = lines_.at(key);
    if (s.empty() || s.front() != '[' || s.back() != ']')
        throw ConfigError("line " + std::to_string(line) + ": field '" + key
                          + "' must be an array literal [..]");
    std::vector<double> out;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(item, key, line));
    }
    return out;
}

std::vector<double> RunConfig::get_array_or(const std::string& key) const {
    return has(key) ? get_array(key) : std::vector<double>{};
}

PeriodicCoefficient RunConfig::coefficient(const std::string& prefix) const {
    const std::string km = prefix + ".mean", kc = prefix + ".cos", ks = prefix + ".sin";
    if (!has(km) && !has(kc) && !has(ks))
        throw ConfigError("missing coefficient block '" + prefix
                          + "' (need " + km + ", " + kc + " or " + ks + ")");
    return PeriodicCoefficient(get_double_or(km, 0.0), get_array_or(kc), get_array_or(ks));
}

CoefficientPair RunConfig::coefficient_pair() const {
    return {coefficient("p"), coefficient("q")};
}

void ToleranceSet::override_named(const std::string& name, double value) {
    if (value < 1e-14 || value > 1e-3)
        throw ConfigError("tolerance '" + name + "' = " + std::to_string(value)
                          + " outside the sane range [1e-14, 1e-3]");
    if (name == "rk_rtol") rk_rtol = value;
    else if (name == "rk_atol") rk_atol = value;
    else if (name == "newton_tol") newton_tol = value;
    else if (name == "det_tol") det_tol = value;
    else if (name == "picard_tol") picard_tol = value;
    else if (name == "refine_tol") refine_tol = value;
    else if (name == "winding_tol") winding_tol = value;
    else if (name == "moment_tol") moment_tol = value;
    else if (name == "arc_tol") arc_tol = value;
    else if (name == "merge_tol_scale") merge_tol_scale = value;
    else throw ConfigError("unknown tolerance '" + name + "'");
}

std::vector<std::string> ToleranceSet::names() {
    return {"rk_rtol", "rk_atol", "newton_tol", "det_tol", "picard_tol",
            "refine_tol", "winding_tol", "moment_tol", "arc_tol", "merge_tol_scale"};
}

std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace trispec
