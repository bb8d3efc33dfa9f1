#include "varhorse/pullback.hpp"

#include <algorithm>
#include <cmath>

namespace varhorse {

namespace {
constexpr double kChartRange = 64.0;  // beyond this the image left the local zone
}

std::optional<Vec2> chart_image(const MapSystem& map, const Rectangle& rect, const Vec2& uv,
                                int m) {
    Point p = rect.from_chart(uv);
    for (int k = 0; k < m; ++k) {
        p = map.forward(p);
        if (!p.finite()) return std::nullopt;
    }
    Vec2 img = rect.to_chart(p);
    if (!img.finite() || img.norm_max() > kChartRange) return std::nullopt;
    return img;
}

std::optional<double> bisect_secant(const std::function<std::optional<double>(double)>& res,
                                    double t0, double r0, double t1, double r1, double tol_t,
                                    double tol_r, bool exact_secant) {
    if (!(r0 <= 0.0) == !(r1 <= 0.0)) return std::nullopt;  // not a bracket
    if (r0 == 0.0) return t0;
    if (r1 == 0.0) return t1;
    // on the exact-affine track one secant step lands on the root
    if (exact_secant) {
        double t = t0 + (0.0 - r0) * (t1 - t0) / (r1 - r0);
        auto r = res(t);
        if (r && std::fabs(*r) <= tol_r) return t;
        // fall through to the safeguarded loop
    }
    double lo = t0, rlo = r0, hi = t1, rhi = r1;
    double best = lo, best_r = std::fabs(rlo);
    for (int it = 0; it < 120; ++it) {
        double mid;
        // secant proposal, clipped into the bracket interior
        double sec = lo + (0.0 - rlo) * (hi - lo) / (rhi - rlo);
        double span = hi - lo;
        if (it % 2 == 0 && sec > lo + 0.01 * span && sec < hi - 0.01 * span)
            mid = sec;
        else
            mid = 0.5 * (lo + hi);
        auto rm = res(mid);
        if (!rm) {  // invalid probe inside bracket: fall back to pure bisection step
            mid = 0.5 * (lo + hi);
            rm = res(mid);
            if (!rm) return std::nullopt;
        }
        double r = *rm;
        if (std::fabs(r) < best_r) {
            best = mid;
            best_r = std::fabs(r);
        }
        if (std::fabs(r) <= tol_r) return mid;
        if ((r <= 0.0) == (rlo <= 0.0)) {
            lo = mid;
            rlo = r;
        } else {
            hi = mid;
            rhi = r;
        }
        if (hi - lo <= tol_t) return best_r <= std::fabs(r) ? best : mid;
    }
    return best;
}

std::optional<double> solve_fiber_scan(const MapSystem& map, const Rectangle& rect, double a,
                                       int m, double target, double hint, double slope_est) {
    const double h = rect.half_width;
    auto g = [&](double b) -> std::optional<double> {
        auto img = chart_image(map, rect, {a, b}, m);
        if (!img) return std::nullopt;
        return img->y;
    };
    auto g0 = g(hint);
    if (!g0) return std::nullopt;
    double b0 = hint, v0 = *g0;
    if (std::fabs(v0 - target) < 1e-15) return b0;

    // estimate the signed local slope with a probe scaled to the expansion
    double probe = std::max(1e-12 * h, std::min(1e-3 * h, 1e-3 * std::fabs(target - v0) / slope_est));
    double slope = 0.0;
    for (double sgn : {1.0, -1.0}) {
        auto gp = g(b0 + sgn * probe);
        if (gp) {
            slope = (*gp - v0) / (sgn * probe);
            break;
        }
    }
    if (slope == 0.0) return std::nullopt;

    const double tol_r = 1e-12 * std::max(1.0, h);
    const double tol_t = 1e-16 * h;
    for (int it = 0; it < 200; ++it) {
        double step = (target - v0) / slope;
        step = std::clamp(step, -h, h);
        double b1 = b0 + step;
        if (std::fabs(b1) > 1.5 * h) return std::nullopt;  // no root inside the rectangle
        auto g1 = g(b1);
        int halvings = 0;
        while (!g1 && halvings < 48) {
            b1 = 0.5 * (b0 + b1);
            g1 = g(b1);
            ++halvings;
        }
        if (!g1) return std::nullopt;
        double v1 = *g1;
        if ((v0 - target) * (v1 - target) <= 0.0)
            return bisect_secant(
                [&](double t) -> std::optional<double> {
                    auto gv = g(t);
                    if (!gv) return std::nullopt;
                    return *gv - target;
                },
                b0, v0 - target, b1, v1 - target, tol_t, tol_r, map.affine_hint);
        if (b1 != b0) slope = (v1 - v0) / (b1 - b0);
        b0 = b1;
        v0 = v1;
    }
    return std::nullopt;
}

std::optional<double> solve_fiber_on_graph(const MapSystem& map, const Rectangle& rect, double a,
                                           int m, double b_lo, double b_hi, const Graph1D& graph,
                                           double h) {
    auto residual = [&](double b) -> std::optional<double> {
        auto img = chart_image(map, rect, {a, b}, m);
        if (!img) return std::nullopt;
        return img->y - graph.value(img->x, h);
    };
    auto r0 = residual(b_lo);
    auto r1 = residual(b_hi);
    if (!r0 || !r1) return std::nullopt;
    const double tol_r = 1e-12;
    const double tol_t = 1e-18 * std::max(1.0, std::fabs(b_lo) + std::fabs(b_hi));
    if ((*r0 <= 0.0) == (*r1 <= 0.0)) return std::nullopt;
    return bisect_secant(residual, b_lo, *r0, b_hi, *r1, tol_t, tol_r, map.affine_hint);
}

std::optional<CurveLevelHit> solve_curve_to_level(const MapSystem& map, const Rectangle& rect,
                                                  const Graph1D& source_graph, int m, double b_lo,
                                                  double b_hi, double level, double h) {
    auto image = [&](double b) -> std::optional<Vec2> {
        double a = source_graph.value(b, h);
        return chart_image(map, rect, {a, b}, m);
    };
    auto residual = [&](double b) -> std::optional<double> {
        auto img = image(b);
        if (!img) return std::nullopt;
        return img->y - level;
    };
    auto r0 = residual(b_lo);
    auto r1 = residual(b_hi);
    if (!r0 || !r1) return std::nullopt;
    if ((*r0 <= 0.0) == (*r1 <= 0.0)) return std::nullopt;
    auto b = bisect_secant(residual, b_lo, *r0, b_hi, *r1, 1e-18, 1e-12, map.affine_hint);
    if (!b) return std::nullopt;
    auto img = image(*b);
    if (!img) return std::nullopt;
    return CurveLevelHit{*b, img->x};
}

namespace {

// fit an affine graph when the sampled nodes are collinear to rounding noise
bool try_affinize(Graph1D& g, double h) {
    const auto& s = g.samples;
    int k = static_cast<int>(s.size());
    if (k < 2) return false;
    double c1 = (s[k - 1] - s[0]) / (2.0 * h);
    double c0 = 0.5 * (s[k - 1] + s[0]);
    double span = std::max({std::fabs(s[0]), std::fabs(s[k - 1]), 1e-3});
    for (int i = 0; i < k; ++i) {
        double t = -h + 2.0 * h * i / (k - 1);
        if (std::fabs(c0 + c1 * t - s[i]) > 1e-12 * span) return false;
    }
    g.affine = true;
    g.c0 = c0;
    g.c1 = c1;
    g.samples.clear();
    return true;
}

}  // namespace

std::optional<Cylinder> build_source_cylinder(const MapSystem& map, const Rectangle& rect,
                                              const Point& z, int m,
                                              const CylinderBuildOptions& opt) {
    const double h = rect.half_width;
    const int k = opt.nodes;
    Vec2 zc = rect.to_chart(z);

    // expansion estimate from the cocycle at the base point
    double slope_est;
    try {
        FactoredCocycle c = cocycle(map, z, m);
        Mat2 f = Mat2::columns(rect.frame_s, rect.frame_u);
        double cond = f.sigma_max() * f.inverse().sigma_max();
        slope_est = std::exp(std::min(700.0, c.log_sigma_max())) * cond;
    } catch (const DynError&) {
        return std::nullopt;
    }

    Cylinder cyl;
    cyl.kind = CylKind::stable;
    cyl.h = h;
    cyl.lo.samples.assign(k, 0.0);
    cyl.hi.samples.assign(k, 0.0);

    // march from the node nearest the base point outward, reusing solutions as hints
    int j0 = static_cast<int>(std::lround((zc.x + h) / (2.0 * h) * (k - 1)));
    j0 = std::clamp(j0, 0, k - 1);
    auto node_a = [&](int j) { return -h + 2.0 * h * j / (k - 1); };

    struct Hint {
        double lo, hi;
    };
    Hint center_hint{zc.y, zc.y};
    auto solve_node = [&](int j, Hint hint) -> std::optional<Hint> {
        double a = node_a(j);
        auto b_minus = solve_fiber_scan(map, rect, a, m, -h, hint.lo, slope_est);
        auto b_plus = solve_fiber_scan(map, rect, a, m, +h, hint.hi, slope_est);
        if (!b_minus || !b_plus) return std::nullopt;
        double lo = std::min(*b_minus, *b_plus);
        double hi = std::max(*b_minus, *b_plus);
        cyl.lo.samples[j] = lo;
        cyl.hi.samples[j] = hi;
        // keep hints in solver order (orientation may swap lo/hi)
        return Hint{*b_minus, *b_plus};
    };

    auto h0 = solve_node(j0, center_hint);
    if (!h0) return std::nullopt;
    Hint hint = *h0;
    for (int j = j0 + 1; j < k; ++j) {
        auto hj = solve_node(j, hint);
        if (!hj) return std::nullopt;
        hint = *hj;
    }
    hint = *h0;
    for (int j = j0 - 1; j >= 0; --j) {
        auto hj = solve_node(j, hint);
        if (!hj) return std::nullopt;
        hint = *hj;
    }

    if (opt.affine_track) {
        try_affinize(cyl.lo, h);
        try_affinize(cyl.hi, h);
    }
    if (!cyl.admissible(opt.gamma)) return std::nullopt;
    if (!cyl.inside_rectangle()) return std::nullopt;
    return cyl;
}

std::optional<Cylinder> build_target_cylinder(const MapSystem& map, const Rectangle& rect,
                                              const Cylinder& source, int m,
                                              const CylinderBuildOptions& opt) {
    const double h = rect.half_width;
    const int k = opt.nodes;
    Cylinder out;
    out.kind = CylKind::unstable;
    out.h = h;

    // the two side edges a = -h, +h of the source map onto the pinching graphs
    std::array<std::vector<double>, 2> graphs;
    for (int side = 0; side < 2; ++side) {
        double a_edge = side == 0 ? -h : +h;
        Graph1D edge = Graph1D::make_affine(a_edge, 0.0);  // curve (a_edge, b), graph over b
        double blo = source.lo.value(a_edge, h);
        double bhi = source.hi.value(a_edge, h);
        // widen the bracket a hair so the residual has a clean sign change
        double pad = 1e-12 * std::max(1.0, std::fabs(bhi - blo));
        graphs[side].assign(k, 0.0);
        for (int j = 0; j < k; ++j) {
            double level = -h + 2.0 * h * j / (k - 1);
            auto hit =
                solve_curve_to_level(map, rect, edge, m, blo - pad, bhi + pad, level, h);
            if (!hit) return std::nullopt;
            graphs[side][j] = hit->a_img;
        }
    }
    double mean0 = 0.0, mean1 = 0.0;
    for (int j = 0; j < k; ++j) {
        mean0 += graphs[0][j];
        mean1 += graphs[1][j];
    }
    out.lo.samples = mean0 <= mean1 ? std::move(graphs[0]) : std::move(graphs[1]);
    out.hi.samples = mean0 <= mean1 ? std::move(graphs[1]) : std::move(graphs[0]);
    if (opt.affine_track) {
        try_affinize(out.lo, h);
        try_affinize(out.hi, h);
    }
    if (!out.admissible(opt.gamma)) return std::nullopt;
    if (!out.inside_rectangle()) return std::nullopt;
    return out;
}

std::vector<double> diameter_profile(const MapSystem& map, const Rectangle& rect,
                                     const Cylinder& source, int m) {
    const double h = source.h;
    const int k = source.lo.affine ? 17 : static_cast<int>(source.lo.samples.size());
    std::vector<Point> pts;
    for (int j = 0; j < k; ++j) {
        double a = -h + 2.0 * h * j / (k - 1);
        pts.push_back(rect.from_chart({a, source.lo.value(a, h)}));
        pts.push_back(rect.from_chart({a, source.hi.value(a, h)}));
    }
    for (double a : {-h, h})  // side edges
        for (int j = 1; j < 4; ++j) {
            double t = j / 4.0;
            double b = source.lo.value(a, h) + t * (source.hi.value(a, h) - source.lo.value(a, h));
            pts.push_back(rect.from_chart({a, b}));
        }
    std::vector<double> profile;
    profile.reserve(m);
    for (int step = 0; step < m; ++step) {
        double diam = 0.0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                diam = std::max(diam, distance(pts[i], pts[j]));
        profile.push_back(diam);
        if (step + 1 < m)
            for (auto& p : pts) {
                p = map.forward(p);
                if (!p.finite()) throw OrbitEscape(step + 1);
            }
    }
    return profile;
}

double cylinder_gap(const Cylinder& a, const Cylinder& b) {
    auto ea = a.pinched_extent();
    auto eb = b.pinched_extent();
    return std::max(eb[0] - ea[1], ea[0] - eb[1]);
}

}  // namespace varhorse
