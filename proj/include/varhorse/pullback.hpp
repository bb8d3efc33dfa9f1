#ifndef VARHORSE_PULLBACK_HPP
#define VARHORSE_PULLBACK_HPP

#include <functional>
#include <optional>

#include "varhorse/pesin.hpp"

namespace varhorse {

// Chart image of f^m; nullopt when the orbit escapes or leaves chart range.
std::optional<Vec2> chart_image(const MapSystem& map, const Rectangle& rect, const Vec2& uv,
                                int m);

// Safeguarded secant/bisection on a monotone-through-zero residual. The
// residual may be undefined (nullopt) off the valid zone; the bracket ends
// must be valid with opposite signs.
std::optional<double> bisect_secant(const std::function<std::optional<double>(double)>& res,
                                    double t0, double r0, double t1, double r1, double tol_t,
                                    double tol_r, bool exact_secant);

// Root of chart_b(f^m(a, b)) = target, searching from hint with expansion
// estimate slope_est (chart growth per unit b). Used to build source cylinders.
std::optional<double> solve_fiber_scan(const MapSystem& map, const Rectangle& rect, double a,
                                       int m, double target, double hint, double slope_est);

// Root of chart_b(f^m(a, b)) = graph(chart_a(f^m(a, b))) for b in a bracket
// whose image b-values straddle the graph. Used by stable refinement.
std::optional<double> solve_fiber_on_graph(const MapSystem& map, const Rectangle& rect, double a,
                                           int m, double b_lo, double b_hi, const Graph1D& graph,
                                           double h);

// On the source curve (g(b), b), find b with image chart_b equal to level;
// returns (b, image chart_a). Used by unstable refinement and target building.
struct CurveLevelHit {
    double b;
    double a_img;
};
std::optional<CurveLevelHit> solve_curve_to_level(const MapSystem& map, const Rectangle& rect,
                                                  const Graph1D& source_graph, int m, double b_lo,
                                                  double b_hi, double level, double h);

struct CylinderBuildOptions {
    int nodes = 65;          // polyline resolution k
    double gamma = 0.3;      // admissibility bound re-verified after construction
    bool affine_track = false;
    Exec exec = Exec::serial;
};

// Pull the rectangle's unstable extent back through f^m around base z:
// the stable source cylinder of the branch. Fails (nullopt) if any fiber has
// no solution inside the rectangle or admissibility fails.
std::optional<Cylinder> build_source_cylinder(const MapSystem& map, const Rectangle& rect,
                                              const Point& z, int m,
                                              const CylinderBuildOptions& opt);

// Image f^m(S) represented as an unstable cylinder (graphs over b).
std::optional<Cylinder> build_target_cylinder(const MapSystem& map, const Rectangle& rect,
                                              const Cylinder& source, int m,
                                              const CylinderBuildOptions& opt);

// diam(f^j(S)) for j = 0..m-1, from pushed boundary samples.
std::vector<double> diameter_profile(const MapSystem& map, const Rectangle& rect,
                                     const Cylinder& source, int m);

// positive gap between the pinched extents of two same-kind cylinders
double cylinder_gap(const Cylinder& a, const Cylinder& b);

}  // namespace varhorse

#endif
