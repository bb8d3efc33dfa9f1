#ifndef VARHORSE_BRANCHES_HPP
#define VARHORSE_BRANCHES_HPP

#include <optional>
#include <string>
#include <vector>

#include "varhorse/pullback.hpp"

namespace varhorse {

struct QuasiGenericityParams {
    double rho = 0.1;
    int s = 4;
    int n_min = 1;
};

/// delta(rho, s): distances below it force |phi_i(x) - phi_i(y)| < rho/2 for i <= s.
double delta_modulus(const TestFunctionFamily& family, double rho, int s);

struct QGCheck {
    bool pass = false;
    double max_residual = 0.0;
    int witness = -1;  // failing function index
};

/// Birkhoff-average proximity of x to the reference integrals at (rho, s, n).
/// Pass requires max residual <= rho - integral_error (conservative).
QGCheck quasi_generic_point(const MapSystem& map, const Point& x, int n,
                            const TestFunctionFamily& family, const ReferenceMeasure& mu,
                            double rho, int s);

/// Smallest m in [n_min, m_max] with f^m(z) back in the chart core, per seed.
/// Seeds with no admissible return are omitted; input order preserved.
std::vector<std::pair<Point, int>> detect_returns(const MapSystem& map, const Rectangle& rect,
                                                  const std::vector<Point>& seeds, int n_min,
                                                  int m_max, Exec exec = Exec::parallel);

struct QGCertificate {
    double rho = 0.0;
    int s = 0;
    double base_residual = 0.0;  // base point checked at rho/2
    double delta = 0.0;          // diameter bound used
    double max_diameter = 0.0;
};

/// A certified return f^m : S -> U with cone, crossing, diameter and
/// quasi-genericity certificates.
struct HyperbolicBranch {
    int return_time = 0;
    Cylinder source;  // stable kind
    Cylinder target;  // unstable kind
    Point base_point;
    ConeCheck cone_certificate;
    std::vector<double> diameter_profile;  // diam(f^j(S)), j = 0..m-1
    QGCertificate qg_certificate;
    double rep_residual = 0.0;  // worst chart residual of the S -> U representation
    std::vector<int> word;      // symbolic annotation when known (0-based letters)
};

enum class BranchFail { none, cross, cone, diam, qg };

struct BranchResult {
    std::optional<HyperbolicBranch> branch;
    BranchFail fail = BranchFail::none;
    int fail_index = -1;  // DiamFail: offending j; QGFail: witness function index
    std::string detail;
    bool ok() const { return branch.has_value(); }
};

struct BranchBuildOptions {
    int polyline = 65;
    int cone_samples = 33;
    Exec exec = Exec::parallel;
    double tau_branch = 1e-7;
};

/// Certification pipeline: (a) crossing, (b) cone preservation, (c) diameter
/// profile below delta(rho, s), (d) base point quasi-generic at rho/2.
BranchResult certify_branch(const MapSystem& map, const Rectangle& rect, const ConeField& cones,
                            const Point& z, int m, const TestFunctionFamily& family,
                            const ReferenceMeasure& mu, double rho, int s,
                            const BranchBuildOptions& opt = {});

struct BranchSearchBudget {
    long certify_attempts = 64;
    int repair_rounds = 2;
    int n_min = 1;
    int m_max = 16;
    double ell0 = 10.0;     // Pesin gate at the landing point
    double chi = 0.5;
    int pesin_horizon = 10;
};

struct BranchSetResult {
    std::vector<HyperbolicBranch> branches;
    long attempts = 0;
    std::string diagnostics;
};

/// Assembles N >= n_target certified branches with pairwise disjoint sources
/// and targets; on cylinder conflicts, narrows the newcomer by composing the
/// branch with itself (the disjointness repair), increasing its return time.
BranchSetResult build_branch_set(const MapSystem& map, const Rectangle& rect,
                                 const ConeField& cones, const TestFunctionFamily& family,
                                 const ReferenceMeasure& mu, double rho, int s, int n_target,
                                 const std::vector<Point>& seeds, const BranchSearchBudget& budget,
                                 const BranchBuildOptions& opt = {});

}  // namespace varhorse

#endif
