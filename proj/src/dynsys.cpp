#include "varhorse/dynsys.hpp"

#include <cmath>
#include <random>

namespace varhorse {

Mat2 FactoredCocycle::to_matrix() const {
    double e1 = std::exp(log_r1), e2 = std::exp(log_r2);
    Mat2 t{e1, e1 * u, 0.0, e2};
    return q * t;
}

Vec2 FactoredCocycle::apply(const Vec2& v) const {
    double e1 = std::exp(log_r1), e2 = std::exp(log_r2);
    return q * Vec2{e1 * (v.x + u * v.y), e2 * v.y};
}

void FactoredCocycle::apply_log(const Vec2& v, Vec2& dir_out, double& log_norm_out) const {
    // w = T * v componentwise in log scale
    double w1 = v.x + u * v.y;
    double w2 = v.y;
    double a = (w1 == 0.0) ? -1e308 : log_r1 + std::log(std::fabs(w1));
    double b = (w2 == 0.0) ? -1e308 : log_r2 + std::log(std::fabs(w2));
    double m = std::max(a, b);
    Vec2 w{(w1 < 0 ? -1.0 : 1.0) * std::exp(a - m), (w2 < 0 ? -1.0 : 1.0) * std::exp(b - m)};
    double n = w.norm();
    dir_out = (q * w) / n;
    log_norm_out = m + std::log(n);
}

double FactoredCocycle::log_sigma_max() const {
    // singular values of T = e^l1 * [[1, u], [0, eps]], eps = e^(l2 - l1)
    double eps = std::exp(log_r2 - log_r1);
    double tr = 1.0 + u * u + eps * eps;
    double dd = eps;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * dd * dd));
    double lmax = 0.5 * (tr + disc);
    return log_r1 + 0.5 * std::log(lmax);
}

double FactoredCocycle::log_sigma_min() const {
    // sigma_min = |det| / sigma_max, det T = e^(l1 + l2)
    return log_r1 + log_r2 - log_sigma_max();
}

Point iterate(const MapSystem& map, const Point& x, int n) {
    Point p = x;
    int steps = std::abs(n);
    for (int k = 0; k < steps; ++k) {
        p = (n > 0) ? map.forward(p) : map.inverse(p);
        if (!p.finite()) throw OrbitEscape(n > 0 ? k + 1 : -(k + 1));
    }
    return p;
}

std::vector<Point> orbit_segment(const MapSystem& map, const Point& x, int n) {
    std::vector<Point> out;
    out.reserve(n);
    Point p = x;
    for (int k = 0; k < n; ++k) {
        out.push_back(p);
        if (k + 1 < n) {
            p = map.forward(p);
            if (!p.finite()) throw OrbitEscape(k + 1);
        }
    }
    return out;
}

FactoredCocycle cocycle(const MapSystem& map, const Point& x, int n) {
    if (n < 1) throw PreconditionError("cocycle: n must be >= 1");
    FactoredCocycle acc;
    Point p = x;
    for (int k = 0; k < n; ++k) {
        Mat2 j = map.jacobian(p);
        double scale = j.norm_inf();
        if (!(scale > 0.0) || std::fabs(j.det()) < 1e-14 * scale * scale)
            throw DegenerateCocycle(k);
        auto [qk, rk] = qr_decompose(j * acc.q);
        // T_new = R_k * T_old in (l1, l2, u) coordinates
        acc.u = acc.u + (rk.b / rk.a) * std::exp(acc.log_r2 - acc.log_r1);
        acc.log_r1 += std::log(rk.a);
        acc.log_r2 += std::log(rk.d);
        acc.q = qk;
        acc.steps = k + 1;
        if (k + 1 < n) {
            p = map.forward(p);
            if (!p.finite()) throw OrbitEscape(k + 1);
        }
    }
    return acc;
}

MapSystem inverse_system(const MapSystem& map) {
    MapSystem inv;
    inv.name = map.name + "_inverse";
    inv.space = map.space;
    inv.forward = map.inverse;
    inv.inverse = map.forward;
    inv.affine_hint = map.affine_hint;
    inv.parameters = map.parameters;
    auto base = map;  // capture by value: jacobian of f^-1 at p is Df(f^-1 p)^-1
    inv.jacobian = [base](const Point& p) { return base.jacobian(base.inverse(p)).inverse(); };
    return inv;
}

FiniteTimeExponents finite_time_exponents(const MapSystem& map, const Point& x, int n) {
    FactoredCocycle c = cocycle(map, x, n);
    double lp = c.log_sigma_max() / n;
    double lm = c.log_sigma_min() / n;
    return {lp, lm};
}

SplittingEstimate oseledec_splitting_estimate(const MapSystem& map, const Point& x, int n_back,
                                              int n_fwd) {
    const Vec2 generic = Vec2{1.0, 1.0}.normalized();
    // unstable: push a generic vector forward from f^{-n_back}(x) up to x
    Point z = iterate(map, x, -n_back);
    FactoredCocycle fwd = cocycle(map, z, n_back);
    Vec2 e_u;
    double ln;
    fwd.apply_log(generic, e_u, ln);
    // stable: pull back from f^{n_fwd}(x) by the inverse cocycle
    Point y = iterate(map, x, n_fwd);
    FactoredCocycle bwd = cocycle(inverse_system(map), y, n_fwd);
    Vec2 e_s;
    bwd.apply_log(generic, e_s, ln);
    // canonical sign: make the dominant component positive
    auto canon = [](Vec2 v) {
        double lead = std::fabs(v.x) >= std::fabs(v.y) ? v.x : v.y;
        return lead < 0 ? v * -1.0 : v;
    };
    e_u = canon(e_u);
    e_s = canon(e_s);
    double angle = line_angle(e_s, e_u);
    if (angle < 1e-6) throw SplittingDegenerate(angle);
    return {e_s, e_u, angle};
}

double birkhoff_sum(const MapSystem& map, const Point& x, int n,
                    const std::function<double(const Point&)>& phi) {
    if (n < 1) throw PreconditionError("birkhoff_sum: n must be >= 1");
    double sum = 0.0;
    Point p = x;
    for (int k = 0; k < n; ++k) {
        sum += phi(p);
        if (k + 1 < n) {
            p = map.forward(p);
            if (!p.finite()) throw OrbitEscape(k + 1);
        }
    }
    return sum;
}

double birkhoff_sum(const MapSystem& map, const Point& x, int n, const TestFunction& phi) {
    return birkhoff_sum(map, x, n, phi.eval);
}

// --- catalog ----------------------------------------------------------------

MapSystem make_cat_map() {
    MapSystem m;
    m.name = "cat";
    m.space = Space::torus2;
    m.forward = [](const Point& p) {
        return Point::torus(2.0 * p.xy.x + p.xy.y, p.xy.x + p.xy.y);
    };
    m.inverse = [](const Point& p) {
        return Point::torus(p.xy.x - p.xy.y, -p.xy.x + 2.0 * p.xy.y);
    };
    m.jacobian = [](const Point&) { return Mat2{2, 1, 1, 1}; };
    return m;
}

MapSystem make_perturbed_cat_map(double kappa) {
    MapSystem m;
    m.name = "perturbed_cat";
    m.space = Space::torus2;
    m.parameters["kappa"] = kappa;
    m.forward = [kappa](const Point& p) {
        double s = std::sin(2.0 * kPi * p.xy.y);
        return Point::torus(2.0 * p.xy.x + p.xy.y + kappa * s, p.xy.x + p.xy.y);
    };
    // y1 = 2x + y + k sin(2 pi y), y2 = x + y  =>  x = y1 - y2 - k sin(2 pi (y2 - x))
    m.inverse = [kappa](const Point& p) {
        double x = p.xy.x - p.xy.y;
        for (int it = 0; it < 80; ++it) {
            double nx = p.xy.x - p.xy.y - kappa * std::sin(2.0 * kPi * (p.xy.y - x));
            if (std::fabs(nx - x) < 1e-16) {
                x = nx;
                break;
            }
            x = nx;
        }
        return Point::torus(x, p.xy.y - x);
    };
    m.jacobian = [kappa](const Point& p) {
        double c = 2.0 * kPi * kappa * std::cos(2.0 * kPi * p.xy.y);
        return Mat2{2, 1 + c, 1, 1};
    };
    return m;
}

MapSystem make_standard_map(double K) {
    MapSystem m;
    m.name = "standard";
    m.space = Space::torus2;
    m.parameters["K"] = K;
    m.forward = [K](const Point& p) {
        double pn = p.xy.y + (K / (2.0 * kPi)) * std::sin(2.0 * kPi * p.xy.x);
        return Point::torus(p.xy.x + pn, pn);
    };
    m.inverse = [K](const Point& p) {
        double x = p.xy.x - p.xy.y;
        double pr = p.xy.y - (K / (2.0 * kPi)) * std::sin(2.0 * kPi * x);
        return Point::torus(x, pr);
    };
    m.jacobian = [K](const Point& p) {
        double c = K * std::cos(2.0 * kPi * p.xy.x);
        return Mat2{1 + c, 1, c, 1};
    };
    return m;
}

MapSystem make_rigid_rotation(double a1, double a2) {
    MapSystem m;
    m.name = "rotation";
    m.space = Space::torus2;
    m.parameters["alpha1"] = a1;
    m.parameters["alpha2"] = a2;
    m.forward = [a1, a2](const Point& p) { return Point::torus(p.xy.x + a1, p.xy.y + a2); };
    m.inverse = [a1, a2](const Point& p) { return Point::torus(p.xy.x - a1, p.xy.y - a2); };
    m.jacobian = [](const Point&) { return Mat2::identity(); };
    return m;
}

MapSystem make_planar_rotation(double theta) {
    MapSystem m;
    m.name = "planar_rotation";
    m.space = Space::planar;
    m.parameters["theta"] = theta;
    Mat2 r = Mat2::rotation(theta);
    Mat2 ri = Mat2::rotation(-theta);
    m.forward = [r](const Point& p) { Vec2 q = r * p.xy; return Point::planar(q.x, q.y); };
    m.inverse = [ri](const Point& p) { Vec2 q = ri * p.xy; return Point::planar(q.x, q.y); };
    m.jacobian = [r](const Point&) { return r; };
    return m;
}

MapSystem make_affine_branch_map() {
    MapSystem m;
    m.name = "affine_branch";
    m.space = Space::planar;
    m.affine_hint = true;
    m.forward = [](const Point& p) { return Point::planar(0.25 * p.xy.x, 4.0 * p.xy.y); };
    m.inverse = [](const Point& p) { return Point::planar(4.0 * p.xy.x, 0.25 * p.xy.y); };
    m.jacobian = [](const Point&) { return Mat2::diag(0.25, 4.0); };
    return m;
}

TestFunctionFamily make_fourier_family(int k_max) {
    // canonical representatives of +-k pairs: k1 > 0, or k1 == 0 and k2 > 0
    std::vector<std::pair<int, int>> ks;
    for (int k1 = 0; k1 <= k_max; ++k1)
        for (int k2 = -k_max; k2 <= k_max; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            ks.emplace_back(k1, k2);
        }
    std::sort(ks.begin(), ks.end(), [](auto& a, auto& b) {
        int la = std::abs(a.first) + std::abs(a.second);
        int lb = std::abs(b.first) + std::abs(b.second);
        if (la != lb) return la < lb;
        return a < b;
    });
    TestFunctionFamily fam;
    for (auto [k1, k2] : ks) {
        TestFunction f;
        f.name = "cos2pi(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
        f.eval = [k1, k2](const Point& p) {
            return std::cos(2.0 * kPi * (k1 * p.xy.x + k2 * p.xy.y));
        };
        f.sup_norm = 1.0;
        f.lipschitz = 2.0 * kPi * std::hypot(static_cast<double>(k1), static_cast<double>(k2));
        fam.functions.push_back(std::move(f));
    }
    return fam;
}

ReferenceMeasure make_lebesgue_reference(const TestFunctionFamily& family) {
    ReferenceMeasure mu;
    mu.name = "lebesgue";
    mu.integrals.assign(family.functions.size(), 0.0);  // nonconstant Fourier modes
    mu.integral_error = 0.0;
    mu.provenance = Provenance::analytic;
    return mu;
}

ReferenceMeasure estimate_reference_long_orbit(const MapSystem& map,
                                               const TestFunctionFamily& family,
                                               std::int64_t length, std::uint64_t seed,
                                               double sigmas) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point p = Point::torus(unif(rng), unif(rng));
    // discard a transient so the estimate samples the attractor
    for (int k = 0; k < 1000; ++k) p = map.forward(p);

    const int s = family.count();
    const int n_batches = 64;
    std::int64_t batch = std::max<std::int64_t>(length / n_batches, 1);
    std::vector<double> total(s, 0.0);
    std::vector<std::vector<double>> batch_means(n_batches, std::vector<double>(s, 0.0));
    for (int bidx = 0; bidx < n_batches; ++bidx) {
        std::vector<double> acc(s, 0.0);
        for (std::int64_t k = 0; k < batch; ++k) {
            for (int i = 0; i < s; ++i) acc[i] += family.eval(i, p);
            p = map.forward(p);
            if (!p.finite()) throw OrbitEscape(static_cast<int>(k));
        }
        for (int i = 0; i < s; ++i) {
            batch_means[bidx][i] = acc[i] / static_cast<double>(batch);
            total[i] += acc[i];
        }
    }
    ReferenceMeasure mu;
    mu.name = map.name + "_long_orbit";
    mu.provenance = Provenance::long_orbit;
    mu.seed = seed;
    mu.orbit_length = batch * n_batches;
    mu.integrals.resize(s);
    double worst_se = 0.0;
    for (int i = 0; i < s; ++i) {
        mu.integrals[i] = total[i] / static_cast<double>(mu.orbit_length);
        double var = 0.0;
        for (int bidx = 0; bidx < n_batches; ++bidx) {
            double d = batch_means[bidx][i] - mu.integrals[i];
            var += d * d;
        }
        var /= (n_batches - 1);
        worst_se = std::max(worst_se, std::sqrt(var / n_batches));
    }
    mu.integral_error = sigmas * worst_se;
    return mu;
}

}  // namespace varhorse
