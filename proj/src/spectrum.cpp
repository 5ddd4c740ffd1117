#include "trispec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trispec/asymptotics.hpp"
#include "trispec/errors.hpp"

namespace trispec {

namespace {
constexpr double pi = std::numbers::pi;
}

CountingDisk CountingDisk::for_index(int n) {
    const double nu = nu_const();
    CountingDisk d;
    d.index = n;
    d.radius_z = nu / 4.0;
    d.center_z = n > 0 ? cplx{nu * n, 0.0} : std::polar(nu * std::abs(n), pi / 3.0);
    return d;
}

Contour Contour::gamma(int N, int nodes) {
    Contour c;
    c.kind = Kind::big_circle;
    c.index = N;
    c.node_count = nodes;
    c.radius = nu_const() * (N + 0.25);  // z-plane radius; lambda radius is its cube
    return c;
}

Contour Contour::ell(int n, int nodes) {
    Contour c;
    c.kind = Kind::small_circle;
    c.index = n;
    c.node_count = nodes;
    c.center = CountingDisk::for_index(n).center_z;
    c.radius = pi / 4.0;
    return c;
}

Contour Contour::disk(int n, int nodes) {
    Contour c;
    c.kind = Kind::z_disk;
    c.index = n;
    c.node_count = nodes;
    const auto d = CountingDisk::for_index(n);
    c.center = d.center_z;
    c.radius = d.radius_z;
    return c;
}

Contour Contour::circle(cplx lambda_center, double lambda_radius, int nodes) {
    Contour c;
    c.kind = Kind::lambda_circle;
    c.index = 0;
    c.node_count = nodes;
    c.center = lambda_center;
    c.radius = lambda_radius;
    return c;
}

std::vector<cplx> Contour::lambda_nodes(int n) const {
    std::vector<cplx> out(n);
    if (kind == Kind::big_circle) {
        // uniform in the z-arc argument; lambda = z^3 sweeps the full circle
        for (int k = 0; k < n; ++k) {
            const double psi = -pi / 3.0 + 2.0 * pi / 3.0 * (k + 0.5) / n;
            const cplx z = std::polar(radius, psi);
            out[k] = z * z * z;
        }
        return out;
    }
    if (kind == Kind::lambda_circle) {
        for (int k = 0; k < n; ++k)
            out[k] = center + std::polar(radius, 2.0 * pi * (k + 0.5) / n);
        return out;
    }
    // z-plane circle mapped through lambda = z^3
    for (int k = 0; k < n; ++k) {
        const cplx z = center + std::polar(radius, 2.0 * pi * (k + 0.5) / n);
        out[k] = z * z * z;
    }
    return out;
}

CharEvaluator::CharEvaluator(const CoefficientPair& pair, const SpectrumOptions& opt)
    : pair_(pair), opt_(opt), setup_(BirkhoffSetup::make(1, pair)) {}

ScaledValue CharEvaluator::eval(cplx lambda) const {
    if (lambda.imag() < 0.0) {
        ScaledValue v = eval(std::conj(lambda));
        v.mantissa = std::conj(v.mantissa);
        return v;
    }
    const cplx z = sector_root(lambda);
    if (std::abs(z) <= opt_.z_direct_max)
        return {0.0, char_D(pair_, lambda, opt_.rk).d_value};
    return char_D_scaled_birkhoff(setup_, lambda, opt_.birkhoff);
}

namespace {

struct LogSample {
    double logmag;
    double arg;  // principal, unwrapped later
};

LogSample to_log(const ScaledValue& v) {
    return {v.scale + std::log(std::abs(v.mantissa)), std::arg(v.mantissa)};
}

}  // namespace

ContourScan scan_contour(const std::function<ScaledValue(cplx)>& eval,
                         const std::function<std::vector<cplx>(int)>& nodes,
                         const SpectrumOptions& opt, bool want_moments) {
    int n = opt.contour_min_nodes;
    std::optional<ContourScan> prev;
    while (n <= opt.contour_max_nodes) {
        const std::vector<cplx> lam = nodes(n);
        std::vector<LogSample> s(n);
        bool zero_hit = false;
        for (int k = 0; k < n; ++k) {
            const ScaledValue v = eval(lam[k]);
            if (v.mantissa == cplx{0.0, 0.0}) { zero_hit = true; break; }
            s[k] = to_log(v);
        }
        if (zero_hit) throw ZeroOnContour("characteristic value vanished on a contour node");

        // floor guard: a node exponentially below both neighbours sits too
        // close to a zero of D for the scan to be trusted
        for (int k = 0; k < n; ++k) {
            const double nb = std::min(s[(k + 1) % n].logmag, s[(k + n - 1) % n].logmag);
            if (s[k].logmag < nb - 23.0)
                throw ZeroOnContour("contour passes too close to a zero");
        }

        ContourScan sc;
        sc.nodes_used = n;
        double total = 0.0;
        cplx m1 = 0.0, m2 = 0.0;
        bool fold_ok = true;
        for (int k = 0; k < n; ++k) {
            const LogSample& a = s[k];
            const LogSample& b = s[(k + 1) % n];
            double da = b.arg - a.arg;
            da -= 2.0 * pi * std::floor((da + pi) / (2.0 * pi));
            if (std::abs(da) > 0.75 * pi) fold_ok = false;
            total += da;
            if (want_moments) {
                const cplx lam_mid = 0.5 * (lam[k] + lam[(k + 1) % n]);
                const cplx dlog{b.logmag - a.logmag, da};
                m1 += lam_mid * dlog;
                m2 += lam_mid * lam_mid * dlog;
            }
        }
        sc.winding_raw = total / (2.0 * pi);
        sc.winding = static_cast<int>(std::lround(sc.winding_raw));
        sc.moment1 = m1 / cplx{0.0, 2.0 * pi};
        sc.moment2 = m2 / cplx{0.0, 2.0 * pi};

        const bool winding_clean =
            fold_ok && std::abs(sc.winding_raw - sc.winding) <= opt.winding_tol;
        bool converged = winding_clean && prev && prev->winding == sc.winding;
        if (converged && want_moments) {
            const double scale = 1.0 + std::abs(sc.moment1);
            converged = std::abs(sc.moment1 - prev->moment1) <= opt.moment_tol * scale
                     && std::abs(sc.moment2 - prev->moment2)
                            <= opt.moment_tol * (1.0 + std::abs(sc.moment2));
        }
        if (converged) return sc;
        if (winding_clean) prev = sc;
        n *= 2;
    }
    throw NonIntegerWinding("contour scan did not stabilize");
}

namespace {

std::function<ScaledValue(cplx)> make_eval(const CharEvaluator& ev) {
    return [&ev](cplx lam) { return ev.eval(lam); };
}

ContourScan scan(const CharEvaluator& ev, const Contour& c, const SpectrumOptions& opt,
                 bool want_moments) {
    auto nodes = [&c](int n) { return c.lambda_nodes(n); };
    SpectrumOptions o = opt;
    if (c.node_count > 0) o.contour_min_nodes = c.node_count;
    if (c.kind == Contour::Kind::big_circle)
        o.contour_min_nodes = std::max(o.contour_min_nodes, 16 * std::max(c.index, 4));
    return scan_contour(make_eval(ev), nodes, o, want_moments);
}

}  // namespace

int winding_count(const CoefficientPair& pair, const Contour& contour,
                  const SpectrumOptions& opt) {
    CharEvaluator ev(pair, opt);
    return scan(ev, contour, opt, false).winding;
}

cplx cluster_sum(const CoefficientPair& pair, const Contour& contour,
                 const SpectrumOptions& opt) {
    CharEvaluator ev(pair, opt);
    return scan(ev, contour, opt, true).moment1;
}

namespace {

// Newton iteration on the direct characteristic function in lambda.
struct NewtonResult {
    cplx root;
    double last_step = 0.0;
    double fmag = 0.0;
    bool converged = false;
};

NewtonResult newton_direct(const CoefficientPair& pair, cplx lam0, const SpectrumOptions& opt) {
    NewtonResult r;
    cplx lam = lam0;
    for (int it = 0; it < opt.newton_max_iter; ++it) {
        const double h = 1e-5 * (1.0 + std::pow(std::abs(lam), 2.0 / 3.0));
        const cplx f = char_D(pair, lam, opt.rk).d_value;
        const cplx fp = (char_D(pair, lam + h, opt.rk).d_value
                       - char_D(pair, lam - h, opt.rk).d_value) / (2.0 * h);
        if (fp == cplx{0.0, 0.0}) break;
        const cplx step = f / fp;
        lam -= step;
        r.last_step = std::abs(step);
        if (r.last_step <= opt.newton_tol * std::max(1.0, std::pow(std::abs(lam), 1.0 / 3.0))) {
            r.root = lam;
            r.fmag = std::abs(char_D(pair, lam, opt.rk).d_value);
            r.converged = true;
            return r;
        }
    }
    r.root = lam;
    return r;
}

// Newton on the reduced 2x2 determinant in the z variable (positive-side roots).
NewtonResult newton_xi2(const BirkhoffSetup& setup, cplx z0, const SpectrumOptions& opt) {
    NewtonResult r;
    cplx z = z0;
    const double dz = 1e-6;
    for (int it = 0; it < opt.newton_max_iter; ++it) {
        const cplx f = xi2_scaled(setup, z, opt.birkhoff);
        const cplx fp = (xi2_scaled(setup, z + dz, opt.birkhoff)
                       - xi2_scaled(setup, z - dz, opt.birkhoff)) / (2.0 * dz);
        if (fp == cplx{0.0, 0.0}) break;
        const cplx step = f / fp;
        z -= step;
        const cplx lam = z * z * z;
        r.last_step = 3.0 * std::abs(z * z) * std::abs(step);
        if (r.last_step <= opt.newton_tol * std::max(1.0, std::abs(z))) {
            r.root = lam;
            r.fmag = std::abs(xi2_scaled(setup, z, opt.birkhoff));
            r.converged = true;
            return r;
        }
    }
    r.root = z * z * z;
    return r;
}

bool inside_disk(cplx lambda, const CountingDisk& d) {
    const cplx z = sector_root(lambda);
    if (std::abs(z - d.center_z) < d.radius_z) return true;
    return std::abs(z - std::conj(d.center_z)) < d.radius_z;
}

EigenvalueRecord locate_positive(const CoefficientPair& pair, int n,
                                 const SpectrumOptions& opt) {
    const double seed = predict(pair, n, Order::O3).value;
    const CountingDisk disk = CountingDisk::for_index(n);
    NewtonResult nr;
    if (nu_const() * n <= opt.z_direct_max) {
        nr = newton_direct(pair, {seed, 0.0}, opt);
    } else {
        const BirkhoffSetup setup = BirkhoffSetup::make(1, pair);
        nr = newton_xi2(setup, sector_root({seed, 0.0}), opt);
    }
    if (!nr.converged)
        throw NoConvergence("Newton did not converge for index " + std::to_string(n));
    if (!inside_disk(nr.root, disk) && n >= 4)
        throw NotSimpleInDisk("root left the counting disk for index " + std::to_string(n));

    EigenvalueRecord rec;
    rec.index = n;
    rec.value = nr.root;
    rec.multiplicity = 1;
    rec.residual = nr.fmag;
    rec.method = LocateMethod::disk_newton;

    if (opt.verify_winding) {
        CharEvaluator ev(pair, opt);
        const double rz = 0.02 * nu_const();  // small z-circle around the root
        const double lam_rad =
            std::max(3.0 * std::norm(sector_root(nr.root)) * rz, 1e-3);
        const Contour c = Contour::circle(nr.root, lam_rad);
        const int w = scan(ev, c, opt, false).winding;
        if (w != 1)
            throw NotSimpleInDisk("verification winding = " + std::to_string(w)
                                  + " for index " + std::to_string(n));
    }
    return rec;
}

}  // namespace

EigenvalueRecord locate_eigenvalue(const CoefficientPair& pair, int n,
                                   const SpectrumOptions& opt) {
    if (n == 0) throw Error("index 0 is not part of the labeling");
    if (n > 0) return locate_positive(pair, n, opt);
    EigenvalueRecord rec = locate_positive(pair.reflected(), -n, opt);
    rec.index = n;
    rec.value = -rec.value;
    return rec;
}

namespace {

struct QuadCell {
    double re_lo, re_hi, im_lo, im_hi;
};

std::vector<cplx> cell_nodes(const QuadCell& c, int n) {
    // polygonal boundary, n nodes total distributed over the four edges
    std::vector<cplx> out;
    out.reserve(n);
    const int per = std::max(n / 4, 4);
    const double w = c.re_hi - c.re_lo, h = c.im_hi - c.im_lo;
    for (int k = 0; k < per; ++k)
        out.emplace_back(c.re_lo + w * (k + 0.5) / per, c.im_lo);
    for (int k = 0; k < per; ++k)
        out.emplace_back(c.re_hi, c.im_lo + h * (k + 0.5) / per);
    for (int k = 0; k < per; ++k)
        out.emplace_back(c.re_hi - w * (k + 0.5) / per, c.im_hi);
    for (int k = 0; k < per; ++k)
        out.emplace_back(c.re_lo, c.im_hi - h * (k + 0.5) / per);
    return out;
}

ContourScan scan_cell(const CharEvaluator& ev, const QuadCell& cell, const SpectrumOptions& opt,
                      bool want_moments) {
    // jitter the cell boundary when it lands on a zero
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double j = attempt * 0.0037;
        QuadCell c = cell;
        const double w = c.re_hi - c.re_lo, h = c.im_hi - c.im_lo;
        c.re_lo -= j * w; c.re_hi += j * w;
        c.im_lo -= j * h; c.im_hi += j * h;
        try {
            auto nodes = [&c](int n) { return cell_nodes(c, n); };
            return scan_contour(make_eval(ev), nodes, opt, want_moments);
        } catch (const ZeroOnContour&) {
            if (attempt == 5) throw;
        }
    }
    throw ZeroOnContour("unreachable");
}

void quadtree_collect(const CharEvaluator& ev, const QuadCell& cell, int depth,
                      const SpectrumOptions& opt, std::vector<EigenvalueRecord>& out) {
    const ContourScan sc = scan_cell(ev, cell, opt, true);
    if (sc.winding == 0) return;
    if (sc.winding == 1) {
        // Newton from the centroid; the inner region has small |z| so the
        // direct characteristic function is accurate there.
        const cplx seed = sc.moment1;
        NewtonResult nr = newton_direct(ev.pair(), seed, ev.options());
        EigenvalueRecord rec;
        rec.value = nr.converged ? nr.root : seed;
        rec.multiplicity = 1;
        rec.residual = nr.converged ? nr.fmag : std::abs(sc.moment1 - seed);
        rec.method = nr.converged ? LocateMethod::disk_newton : LocateMethod::contour_cluster;
        out.push_back(rec);
        return;
    }
    if (depth >= opt.quadtree_depth_cap) {
        EigenvalueRecord rec;
        rec.value = sc.moment1 / static_cast<double>(sc.winding);
        rec.multiplicity = sc.winding;
        rec.residual = std::abs(sc.moment2 - sc.moment1 * sc.moment1 / cplx(sc.winding, 0.0));
        rec.method = LocateMethod::contour_cluster;
        out.push_back(rec);
        return;
    }
    const double rm = 0.5 * (cell.re_lo + cell.re_hi);
    const double im = 0.5 * (cell.im_lo + cell.im_hi);
    const QuadCell cells[4] = {{cell.re_lo, rm, cell.im_lo, im},
                               {rm, cell.re_hi, cell.im_lo, im},
                               {cell.re_lo, rm, im, cell.im_hi},
                               {rm, cell.re_hi, im, cell.im_hi}};
    for (const auto& c : cells) quadtree_collect(ev, c, depth + 1, opt, out);
}

}  // namespace

std::vector<EigenvalueRecord> spectrum_range(const CoefficientPair& pair, int N,
                                             const SpectrumOptions& opt) {
    CharEvaluator ev(pair, opt);

    // per-disk winding from the outside in; the first index where every larger
    // disk holds exactly one simple zero bounds the irregular inner region
    int n_bad = 0;
    std::vector<int> disk_ok;
    for (int k = N; k >= 1; --k) {
        bool ok = true;
        for (int sgn : {+1, -1}) {
            const int w = scan(ev, Contour::disk(sgn * k), opt, false).winding;
            if (w != 1) { ok = false; break; }
        }
        if (ok) disk_ok.push_back(k);
        else { n_bad = k; break; }
    }

    std::vector<EigenvalueRecord> records;
    SpectrumOptions fast = opt;
    fast.verify_winding = false;  // disks were just audited
    for (int k : disk_ok) {
        records.push_back(locate_eigenvalue(pair, k, fast));
        records.push_back(locate_eigenvalue(pair, -k, fast));
    }

    if (n_bad > 0) {
        const double L = std::pow(nu_const() * (n_bad + 0.25), 3.0);
        std::vector<EigenvalueRecord> inner;
        quadtree_collect(ev, {-L, L, -L, L}, 0, opt, inner);
        for (auto& r : inner) records.push_back(r);
    }

    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });

    // winding audit over the big circle: total count with multiplicity
    const int total = scan(ev, Contour::gamma(N), opt, false).winding;
    int found = 0;
    for (const auto& r : records) found += r.multiplicity;
    if (found != total)
        throw NonIntegerWinding("count audit failed: located " + std::to_string(found)
                                + " but the big circle encloses " + std::to_string(total));

    // label in nondecreasing Re order, negative half first, skipping index zero;
    // a record of multiplicity m carries the index of its first slot
    auto slot_index = [total](int slot) {
        const int neg = total / 2;
        return slot < neg ? slot - neg : slot - neg + 1;
    };
    int slot = 0;
    for (auto& r : records) {
        r.index = slot_index(slot);
        slot += r.multiplicity;
    }
    return records;
}

std::vector<FlowPoint> eigenvalue_flow(const CoefficientPair& pair, int n,
                                       const std::vector<double>& t_grid,
                                       const SpectrumOptions& opt) {
    if (t_grid.empty()) return {};
    // negative indices flow on the reflected pair with reversed shifts
    const bool reflect = n < 0;
    const CoefficientPair base = reflect ? pair.reflected() : pair;
    const int k = std::abs(n);

    SpectrumOptions fast = opt;
    fast.verify_winding = false;

    std::vector<FlowPoint> out;
    out.reserve(t_grid.size());

    const BirkhoffSetup setup0 = BirkhoffSetup::make(1, base);
    cplx prev;
    {
        const double s0 = reflect ? -t_grid.front() : t_grid.front();
        EigenvalueRecord r0 = locate_eigenvalue(base.shifted(s0), k, fast);
        prev = r0.value;
        r0.index = n;
        if (reflect) r0.value = -r0.value;
        r0.method = LocateMethod::continuation;
        out.push_back({t_grid.front(), r0});
    }

    const double jump_cap = 0.45 * nu_const();

    std::function<EigenvalueRecord(double, double, cplx, int)> advance =
        [&](double t_from, double t_to, cplx seed, int depth) -> EigenvalueRecord {
        if (depth > 22) throw LostTrack("continuation bisection depth exceeded");
        const double s = reflect ? -t_to : t_to;
        const CoefficientPair shifted = base.shifted(s);
        NewtonResult nr;
        const cplx zs = sector_root(seed);
        if (std::abs(zs) <= fast.z_direct_max || std::abs(seed.imag()) > 1e-9) {
            nr = newton_direct(shifted, seed, fast);
        } else {
            const BirkhoffSetup setup = BirkhoffSetup::make(1, shifted);
            nr = newton_xi2(setup, zs, fast);
        }
        const bool jumped = std::abs(sector_root(nr.root) - zs) > jump_cap;
        if (!nr.converged || jumped) {
            const double tm = 0.5 * (t_from + t_to);
            const EigenvalueRecord mid = advance(t_from, tm, seed, depth + 1);
            return advance(tm, t_to, mid.value, depth + 1);
        }
        EigenvalueRecord rec;
        rec.index = n;
        rec.value = nr.root;
        rec.multiplicity = 1;
        rec.residual = nr.fmag;
        rec.method = LocateMethod::continuation;
        return rec;
    };

    for (size_t i = 1; i < t_grid.size(); ++i) {
        EigenvalueRecord rec = advance(t_grid[i - 1], t_grid[i], prev, 0);
        prev = rec.value;
        if (reflect) rec.value = -rec.value;
        out.push_back({t_grid[i], rec});
    }
    return out;
}

}  // namespace trispec
