#ifndef VARHORSE_HORSESHOE_HPP
#define VARHORSE_HORSESHOE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "varhorse/branches.hpp"

namespace varhorse {

/// Finite word over the branch alphabet (letters are 0-based indices).
struct SymbolicWord {
    enum class Kind { forward, backward, periodic };
    std::vector<int> letters;
    Kind kind = Kind::forward;

    int size() const { return static_cast<int>(letters.size()); }
    void validate(int n_branches) const;
    SymbolicWord rotated(int r) const;  // cyclic rotation (periodic words)
};

/// N variable-time branches over a common rectangle with full crossing.
struct VariableTimeHorseshoe {
    MapSystem map;
    Rectangle rectangle;
    std::vector<HyperbolicBranch> branches;
    std::vector<std::vector<bool>> crossing_matrix;
    bool degenerate = false;  // N == 1

    int n_branches() const { return static_cast<int>(branches.size()); }
    int return_time(int i) const { return branches[i].return_time; }
    int max_return_time() const;
    int word_period(const SymbolicWord& w) const;  // sum of return times
    // width-decay bound per refinement depth, from the cone certificates
    double lambda_bar() const;
};

/// Verifies the branch-set invariants and assembles the horseshoe.
VariableTimeHorseshoe build_horseshoe(const MapSystem& map, const Rectangle& rect,
                                      const std::vector<HyperbolicBranch>& branches);

/// Depth-n families S^(n), U^(n), keyed by words (stable: prefix coding of the
/// future; unstable: suffix coding of the past).
struct CylinderRefinement {
    int depth = 0;
    std::map<std::vector<int>, Cylinder> stable_cylinders;
    std::map<std::vector<int>, Cylinder> unstable_cylinders;
    double max_diameter_stable = 0.0;    // stable-direction width of unstable cylinders
    double max_diameter_unstable = 0.0;  // unstable-direction width of stable cylinders
};

struct RefineOptions {
    std::int64_t cap = std::int64_t{1} << 20;  // N^n enumeration cap
    int nodes = 65;
    Exec exec = Exec::parallel;
};

CylinderRefinement refine(const VariableTimeHorseshoe& h, int n, const RefineOptions& opt = {});

/// Serial reference implementation (depth-first), kept for testing the
/// level-parallel path against; produces the identical refinement.
CylinderRefinement refine_serial_reference(const VariableTimeHorseshoe& h, int n,
                                           const RefineOptions& opt = {});

struct CodedPoint {
    Point point;
    double error_radius = 0.0;  // physical units
};

/// Chart point of the cylinder intersection selected by (past, future) words.
CodedPoint point_from_word(const VariableTimeHorseshoe& h, const SymbolicWord& past,
                           const SymbolicWord& future, int nodes = 5);

/// The f-orbit (not the F-orbit) of the point coded by a periodic itinerary.
/// Each return point is re-derived from the shifted coding, so long orbits do
/// not accumulate hyperbolic drift.
std::vector<Point> saturate_orbit(const VariableTimeHorseshoe& h, const SymbolicWord& itinerary,
                                  int length, double* error_radius_out = nullptr);

}  // namespace varhorse

#endif
