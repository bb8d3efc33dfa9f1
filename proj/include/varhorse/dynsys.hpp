#ifndef VARHORSE_DYNSYS_HPP
#define VARHORSE_DYNSYS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "varhorse/errors.hpp"
#include "varhorse/geom.hpp"

namespace varhorse {

enum class Space { torus2, planar };

/// A phase-space point. Torus coordinates are kept canonical in [0,1)^2.
struct Point {
    Vec2 xy;
    Space space = Space::torus2;

    static Point torus(double x, double y) { return {{wrap_unit(x), wrap_unit(y)}, Space::torus2}; }
    static Point planar(double x, double y) { return {{x, y}, Space::planar}; }
    bool finite() const { return xy.finite(); }
};

// minimal displacement q - p (wrapped per coordinate on the torus)
inline Vec2 displacement(const Point& p, const Point& q) {
    if (p.space == Space::torus2)
        return {wrap_half(q.xy.x - p.xy.x), wrap_half(q.xy.y - p.xy.y)};
    return q.xy - p.xy;
}

inline double distance(const Point& p, const Point& q) { return displacement(p, q).norm(); }
inline double distance_max(const Point& p, const Point& q) { return displacement(p, q).norm_max(); }

/// An invertible smooth map of a flat 2D phase space with evaluable Jacobian.
struct MapSystem {
    std::string name;
    Space space = Space::torus2;
    std::function<Point(const Point&)> forward;
    std::function<Point(const Point&)> inverse;
    std::function<Mat2(const Point&)> jacobian;
    std::map<std::string, double> parameters;
    // set for piecewise-affine systems: fiber solves may use exact secant steps
    bool affine_hint = false;
};

struct TestFunction {
    std::string name;
    std::function<double(const Point&)> eval;
    double sup_norm = 1.0;
    double lipschitz = 0.0;
};

/// Ordered family of continuous observables with declared norms.
struct TestFunctionFamily {
    std::vector<TestFunction> functions;

    int count() const { return static_cast<int>(functions.size()); }
    double eval(int i, const Point& p) const { return functions[i].eval(p); }
    double max_lipschitz(int s) const {
        double m = 0.0;
        for (int i = 0; i < s; ++i) m = std::max(m, functions[i].lipschitz);
        return m;
    }
    double max_sup_norm(int s) const {
        double m = 0.0;
        for (int i = 0; i < s; ++i) m = std::max(m, functions[i].sup_norm);
        return m;
    }
};

enum class Provenance { analytic, long_orbit };

/// Reference integrals of the test family against the target measure.
struct ReferenceMeasure {
    std::string name;
    std::vector<double> integrals;   // one per family function
    double integral_error = 0.0;     // declared estimation uncertainty
    Provenance provenance = Provenance::analytic;
    std::uint64_t seed = 0;          // long-orbit provenance record
    std::int64_t orbit_length = 0;
};

/// Df^n(x) in norm-stabilized factored form: product = Q * T with
/// T = [[e^l1, e^l1*u], [0, e^l2]]. Overflow-free for n up to 1e4.
struct FactoredCocycle {
    Mat2 q = Mat2::identity();
    double log_r1 = 0.0;
    double log_r2 = 0.0;
    double u = 0.0;
    int steps = 0;

    // plain reconstruction; only safe while e^l1, e^l2 are representable
    Mat2 to_matrix() const;
    Vec2 apply(const Vec2& v) const;
    // stable action: unit direction of (product * v) and log of its norm
    void apply_log(const Vec2& v, Vec2& dir_out, double& log_norm_out) const;
    // log of the extreme singular values
    double log_sigma_max() const;
    double log_sigma_min() const;
};

// --- operations -----------------------------------------------------------

/// n-fold composition of forward (n > 0) or inverse (n < 0); identity at n = 0.
Point iterate(const MapSystem& map, const Point& x, int n);

/// Orbit segment x, f(x), ..., f^{n-1}(x) (n >= 1).
std::vector<Point> orbit_segment(const MapSystem& map, const Point& x, int n);

/// QR-accumulated derivative cocycle Df(f^{n-1}x) ... Df(x).
FactoredCocycle cocycle(const MapSystem& map, const Point& x, int n);

/// The same product for the inverse map started at x (realizes Df^{-n}).
MapSystem inverse_system(const MapSystem& map);

/// Finite-time Lyapunov exponents (chi_plus >= chi_minus) at horizon n.
struct FiniteTimeExponents {
    double chi_plus;
    double chi_minus;
};
FiniteTimeExponents finite_time_exponents(const MapSystem& map, const Point& x, int n);

/// Finite-time Oseledec splitting estimate with reported angle.
struct SplittingEstimate {
    Vec2 e_s;
    Vec2 e_u;
    double angle;  // between the two lines, in (0, pi/2]
};
SplittingEstimate oseledec_splitting_estimate(const MapSystem& map, const Point& x, int n_back,
                                              int n_fwd);

/// Unnormalized Birkhoff sum of phi along the forward orbit (n terms).
double birkhoff_sum(const MapSystem& map, const Point& x, int n, const TestFunction& phi);
double birkhoff_sum(const MapSystem& map, const Point& x, int n,
                    const std::function<double(const Point&)>& phi);

// --- built-in map catalog ---------------------------------------------------

MapSystem make_cat_map();
MapSystem make_perturbed_cat_map(double kappa);
MapSystem make_standard_map(double K);
MapSystem make_rigid_rotation(double alpha1, double alpha2);   // torus translation
MapSystem make_planar_rotation(double theta);                  // control case for cone tests
MapSystem make_affine_branch_map();  // planar (x, y) -> (x/4, 4y), constant diag(1/4, 4)

/// Fourier family cos(2 pi k.x), 0 < |k|_inf <= k_max, ordered by |k|_1 then lex.
TestFunctionFamily make_fourier_family(int k_max);

/// Lebesgue reference on the torus (analytic integrals for the Fourier family).
ReferenceMeasure make_lebesgue_reference(const TestFunctionFamily& family);

/// Long-orbit estimate of the reference integrals; error = sigmas * batch SE.
ReferenceMeasure estimate_reference_long_orbit(const MapSystem& map,
                                               const TestFunctionFamily& family,
                                               std::int64_t length, std::uint64_t seed,
                                               double sigmas = 3.0);

}  // namespace varhorse

#endif
