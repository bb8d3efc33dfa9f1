#include "varhorse/fixture.hpp"

#include <cmath>
#include <limits>

namespace varhorse {

namespace {

constexpr double kSigma = 0.03125;  // 2^-5
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// one affine piece of the ambient map: dom -> dom * linear + shift
struct Piece {
    // half-open domain box [x0, x1) x [y0, y1); closed edge where marked
    double x0, x1, y0, y1;
    bool x1_closed, y1_closed;
    double lin_x, lin_y;    // diagonal linear part
    double off_x, off_y;    // translation

    bool contains(double x, double y) const {
        bool in_x = x >= x0 && (x1_closed ? x <= x1 : x < x1);
        bool in_y = y >= y0 && (y1_closed ? y <= y1 : y < y1);
        return in_x && in_y;
    }
    Vec2 apply(double x, double y) const { return {lin_x * x + off_x, lin_y * y + off_y}; }
    Vec2 unapply(double x, double y) const {
        return {(x - off_x) / lin_x, (y - off_y) / lin_y};
    }
};

std::vector<Piece> make_pieces() {
    const double s = kSigma;
    const double d1 = 10.0 * s, d2 = 20.0 * s, d3 = 30.0 * s;
    const double p1 = -9.0 * s / 32.0, p2 = 9.0 * s / 32.0;
    const double q1 = 9.0 * s / 8.0, q2 = -9.0 * s / 8.0;
    const double colw = 9.0 * s / 32.0;  // station column half-width
    std::vector<Piece> ps;
    // lower half of R: first leg of branch 1, full diag(1/4, 4) action
    ps.push_back({-s, s, -s, 0.0, true, false, 0.25, 4.0, d1, q1});
    // upper half of R: first leg of branch 2
    ps.push_back({-s, s, 0.0, s, true, true, 0.25, 4.0, d2, q2});
    // station columns: pure translations
    ps.push_back({d1 - colw, d1 + colw, -3 * s, 3 * s, false, true, 1.0, 1.0, p1 - d1, 0.0});
    ps.push_back({d2 - colw, d2 + colw, -3 * s, 3 * s, false, true, 1.0, 1.0, d3 - d2, 0.0});
    ps.push_back({d3 - colw, d3 + colw, -3 * s, 3 * s, false, true, 1.0, 1.0, p2 - d3, 0.0});
    return ps;
}

// piecewise-linear profile in x: constant on plateaus, linear between
struct Profile {
    std::array<double, 4> center;      // plateau centers
    double half;                       // plateau half-width
    std::array<double, 4> value;

    double operator()(double x) const {
        if (x <= center[0] + half) return value[0];
        for (int k = 0; k < 3; ++k) {
            double a = center[k] + half, b = center[k + 1] - half;
            if (x <= b) {
                if (x <= a) return value[k];
                double t = (x - a) / (b - a);
                return value[k] + t * (value[k + 1] - value[k]);
            }
            if (x <= center[k + 1] + half) return value[k + 1];
        }
        return value[3];
    }
};

}  // namespace

AffineFixture make_affine_fixture() {
    AffineFixture fx;
    const double s = kSigma;
    fx.sigma = s;

    auto pieces = make_pieces();
    MapSystem m;
    m.name = "affine_fixture";
    m.space = Space::planar;
    m.affine_hint = true;
    m.forward = [pieces](const Point& p) {
        for (const auto& pc : pieces)
            if (pc.contains(p.xy.x, p.xy.y)) {
                Vec2 q = pc.apply(p.xy.x, p.xy.y);
                return Point::planar(q.x, q.y);
            }
        return Point::planar(kNan, kNan);
    };
    m.inverse = [pieces](const Point& p) {
        for (const auto& pc : pieces) {
            Vec2 pre = pc.unapply(p.xy.x, p.xy.y);
            if (pc.contains(pre.x, pre.y)) return Point::planar(pre.x, pre.y);
        }
        return Point::planar(kNan, kNan);
    };
    m.jacobian = [pieces](const Point& p) {
        for (const auto& pc : pieces)
            if (pc.contains(p.xy.x, p.xy.y)) return Mat2::diag(pc.lin_x, pc.lin_y);
        return Mat2{kNan, kNan, kNan, kNan};
    };
    fx.map = m;

    // stable strips in chart units (physical / sigma): pullbacks of [-1, 1]
    // through the branch y-parts 4y +- 9/8
    fx.strip1 = {-17.0 / 32.0, -1.0 / 32.0};
    fx.strip2 = {1.0 / 32.0, 17.0 / 32.0};
    fx.return_times = {2, 3};

    fx.z1 = Point::planar(-3.0 * s / 8.0, -3.0 * s / 8.0);
    fx.z2 = Point::planar(3.0 * s / 8.0, 3.0 * s / 8.0);
    fx.p12 = Point::planar(9.0 * s / 40.0, -9.0 * s / 40.0);
    fx.p21 = Point::planar(-9.0 * s / 40.0, 9.0 * s / 40.0);
    fx.marked_seeds = {fx.z1, fx.z2, fx.p12, fx.p21};

    // family: four locally-constant profiles over the station line
    const double step = 0.109375;  // 7 * 2^-6 = 3.5 sigma
    fx.value_step = step;
    const std::array<std::array<double, 3>, 4> deltas = {{
        {+step, 0.0, -step},
        {-step, 0.0, +step},
        {+step, +step, +step},
        {0.0, -step, 0.0},
    }};
    const std::array<double, 4> base = {0.25, -0.25, 0.5, 0.0};
    const std::array<double, 4> centers = {0.0, 10.0 * s, 20.0 * s, 30.0 * s};

    for (int i = 0; i < 4; ++i) {
        Profile prof;
        prof.center = centers;
        prof.half = 1.25 * s;
        prof.value[0] = base[i];
        for (int k = 0; k < 3; ++k) prof.value[k + 1] = base[i] + deltas[i][k];
        fx.station_values[i] = prof.value;

        TestFunction f;
        f.name = "station_profile_" + std::to_string(i + 1);
        f.eval = [prof](const Point& p) { return prof(p.xy.x); };
        f.sup_norm = 1.0;
        f.lipschitz = 0.5;
        fx.family.functions.push_back(std::move(f));

        // branch 1 visits stations (R, T1); branch 2 visits (R, T2, T3)
        fx.block_avg_1[i] = (prof.value[0] + prof.value[1]) / 2.0;
        fx.block_avg_2[i] = (prof.value[0] + prof.value[2] + prof.value[3]) / 3.0;
        fx.avg_gap[i] = fx.block_avg_1[i] - fx.block_avg_2[i];
    }

    ReferenceMeasure mu;
    mu.name = "fixture_reference";
    mu.provenance = Provenance::analytic;
    mu.integral_error = 0.0;
    for (int i = 0; i < 4; ++i)
        mu.integrals.push_back(0.5 * (fx.block_avg_1[i] + fx.block_avg_2[i]));
    fx.reference = mu;
    return fx;
}

}  // namespace varhorse
