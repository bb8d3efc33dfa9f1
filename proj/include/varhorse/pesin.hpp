#ifndef VARHORSE_PESIN_HPP
#define VARHORSE_PESIN_HPP

#include <optional>
#include <vector>

#include "varhorse/dynsys.hpp"
#include "varhorse/parallel.hpp"

namespace varhorse {

/// Finite-time analogue of Pesin-set membership at (chi, ell) over horizon n.
struct PesinCertificate {
    Point base_point;
    int horizon = 0;
    double chi = 0.0;
    double ell = 1.0;  // minimal constant making the four rate bounds + angle bound hold
    Vec2 e_s, e_u;
    double angle = 0.0;
};

/// Minimal ell >= 1 (to resolution 1e-3). Throws NoFiniteCertificate past 1e6.
PesinCertificate pesin_certificate(const MapSystem& map, const Point& x, int n, double chi);

/// Chart-aligned box around a certified point: c(u,v) = center + scale*(u*e_s + v*e_u),
/// (u, v) in [-h, h]^2. The stable axis is the first chart coordinate.
struct Rectangle {
    Point center;
    double half_width = 1.0;  // h
    Vec2 frame_s{1, 0}, frame_u{0, 1};
    double scale = 1.0;
    double cert_ell = 1.0;  // from the generating certificate

    Vec2 to_chart(const Point& p) const {
        Vec2 d = displacement(center, p);
        Mat2 f = Mat2::columns(frame_s, frame_u);
        Vec2 uv = f.inverse() * d;
        return uv / scale;
    }
    Point from_chart(const Vec2& uv) const {
        Vec2 d = (frame_s * uv.x + frame_u * uv.y) * scale;
        if (center.space == Space::torus2)
            return Point::torus(center.xy.x + d.x, center.xy.y + d.y);
        return Point::planar(center.xy.x + d.x, center.xy.y + d.y);
    }
    // chart direction of a tangent vector (the chart is affine)
    Vec2 dir_to_chart(const Vec2& v) const { return Mat2::columns(frame_s, frame_u).inverse() * v; }
    Vec2 dir_from_chart(const Vec2& v) const { return frame_s * v.x + frame_u * v.y; }

    bool in_core(const Point& p, double fraction = 0.5) const {
        Vec2 uv = to_chart(p);
        double lim = half_width * fraction;
        return std::fabs(uv.x) <= lim && std::fabs(uv.y) <= lim;
    }
};

/// scale = min(rho_chart, 1/(4 |Gram^-1|)) * 1/2, rho_chart = 1/4; injectivity verified.
Rectangle build_rectangle(const MapSystem& map, const PesinCertificate& cert, double h);

struct ConeField {
    Rectangle rectangle;
    double gamma = 0.3;  // slope half-width, in (0, 1/2)
};

enum class CylKind { stable, unstable };

/// Boundary graph over the full chart coordinate of a cylinder.
struct Graph1D {
    bool affine = false;        // exact-affine track: value = c0 + c1 * t
    double c0 = 0.0, c1 = 0.0;
    std::vector<double> samples;  // else polyline on k uniform nodes over [-h, h]

    double value(double t, double h) const;
    double max_abs_slope(double h) const;
    double min_value(double h) const;
    double max_value(double h) const;
    static Graph1D constant(double v);
    static Graph1D make_affine(double c0, double c1);
};

/// Region between two admissible graphs; stable kind is full in the stable
/// coordinate and pinched in the unstable one (graphs over a, values in b).
struct Cylinder {
    CylKind kind = CylKind::stable;
    double h = 1.0;       // chart half-extent of the owning rectangle
    Graph1D lo, hi;       // lo <= hi pointwise

    double max_width() const;  // max over nodes of hi - lo (pinched direction)
    // extent of the cylinder in the pinched coordinate: [min lo, max hi]
    std::array<double, 2> pinched_extent() const {
        return {lo.min_value(h), hi.max_value(h)};
    }
    bool admissible(double gamma) const {
        return lo.max_abs_slope(h) <= gamma && hi.max_abs_slope(h) <= gamma;
    }
    bool inside_rectangle(double tol = 0.0) const {
        return lo.min_value(h) >= -h - tol && hi.max_value(h) <= h + tol;
    }
};

/// Cone invariance certificate from a sampled grid check.
struct ConeCheck {
    bool pass = false;
    double margin = 0.0;           // minimal angular slack over the grid
    double min_expansion_u = 0.0;  // least chart-norm growth of unstable cone vectors
    double min_expansion_s = 0.0;  // same for stable cone vectors under the inverse
    int samples = 0;
    double gamma = 0.0;
    Point witness;                 // on failure: first offending point/vector
    Vec2 witness_dir;
};

/// Checks Df^m maps the unstable cone strictly inside itself over a samples x
/// samples grid in the cylinder (and Df^-m the stable cone, from the image).
ConeCheck cone_preserved(const MapSystem& map, const Rectangle& rect, const Cylinder& domain,
                         int m, const ConeField& cones, int samples,
                         Exec exec = Exec::parallel);

}  // namespace varhorse

#endif
