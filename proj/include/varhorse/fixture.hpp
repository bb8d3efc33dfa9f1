#ifndef VARHORSE_FIXTURE_HPP
#define VARHORSE_FIXTURE_HPP

#include <array>
#include <vector>

#include "varhorse/dynsys.hpp"

namespace varhorse {

/// Piecewise-affine variable-time horseshoe on the plane, exact in doubles.
///
/// Two designed branches over the square R = [-sigma, sigma]^2:
///   branch 1: m = 2, B1(x,y) = (x/4 + p1, 4y + q1), stable strip in the lower half,
///   branch 2: m = 3, B2(x,y) = (x/4 + p2, 4y + q2), stable strip in the upper half.
/// The ambient map routes orbits through way stations at x = 10, 20, 30 sigma;
/// the first leg of each branch carries the full diag(1/4, 4) action, the
/// remaining legs are translations. All coefficients are dyadic, so orbits of
/// designed points and all Birkhoff data over the stations are exact.
struct AffineFixture {
    MapSystem map;
    TestFunctionFamily family;   // four station-locally-constant piecewise-linear functions
    ReferenceMeasure reference;  // integrals at the midpoint of the two branch block-averages

    double sigma = 0.0;      // half-side of R
    double value_step = 0.0; // station value increment of the family

    // designed data, chart coordinates (physical / sigma)
    std::array<double, 2> strip1{};  // stable strip of branch 1 (b-interval)
    std::array<double, 2> strip2{};
    std::array<int, 2> return_times{2, 3};
    Point z1, z2;                  // branch fixed points (periodic, exact dyadic)
    Point p12, p21;                // the period-5 pair with itinerary (1 2) / (2 1)
    std::vector<Point> marked_seeds;

    // per-function station values: station 0 = R, 1..3 = T1..T3
    std::array<std::array<double, 4>, 4> station_values{};

    // exact branch block-averages and their gap
    std::array<double, 4> block_avg_1{};
    std::array<double, 4> block_avg_2{};
    std::array<double, 4> avg_gap{};  // block_avg_1 - block_avg_2

    // symbol composition weight: fraction of time spent in branch-1 blocks
    static double theta(int n1, int n2) {
        return (2.0 * n1) / (2.0 * n1 + 3.0 * n2);
    }
    // exact integral of function i for a periodic word with composition theta
    double word_integral(int i, double th) const {
        return th * block_avg_1[i] + (1.0 - th) * block_avg_2[i];
    }
};

AffineFixture make_affine_fixture();

}  // namespace varhorse

#endif
