#ifndef VARHORSE_MEASURES_HPP
#define VARHORSE_MEASURES_HPP

#include "varhorse/horseshoe.hpp"

namespace varhorse {

/// Equidistribution on the full f-orbit of a periodic symbolic word.
struct PeriodicOrbitMeasure {
    SymbolicWord word;
    int period = 0;  // sum of return times along the word
    std::vector<Point> support_orbit;
    std::vector<double> integrals;   // one per family function evaluated
    std::vector<double> lipschitz;   // family Lipschitz data, for slack accounting
    double error_radius = 0.0;       // coding accuracy of the support
};

struct WeakStarNeighborhood {
    double rho_prime = 0.0;
    int s = 0;
    ReferenceMeasure reference;

    bool contains(const std::vector<double>& integrals) const {
        for (int i = 0; i < s; ++i)
            if (std::fabs(integrals[i] - reference.integrals[i]) >= rho_prime) return false;
        return true;
    }
};

/// T(rho, s) = ceil(max m_i * max |phi_i|_inf / rho).
int saturation_time(const std::vector<HyperbolicBranch>& branches,
                    const TestFunctionFamily& family, double rho, int s);
int saturation_time(const VariableTimeHorseshoe& h, const TestFunctionFamily& family, double rho,
                    int s);

struct OrbitBlock {
    int symbol;
    int start;
    int length;
};

/// L = L' + R with L' = sum C_k m_k, 0 <= R < max_k m_k.
struct OrbitDecomposition {
    int L = 0;
    std::vector<int> block_counts;  // C_k per branch
    long L_prime = 0;
    int remainder = 0;
    std::vector<OrbitBlock> blocks;  // chronological
};

/// Greedy block decomposition of the first L iterates along the itinerary.
/// Finite non-periodic itineraries that run out raise InsufficientItinerary.
OrbitDecomposition decompose(const VariableTimeHorseshoe& h, const SymbolicWord& itinerary,
                             int L);

PeriodicOrbitMeasure periodic_measure(const VariableTimeHorseshoe& h,
                                      const TestFunctionFamily& family, const SymbolicWord& word);

struct RhoCheck {
    bool pass = false;
    double value = 0.0;  // max residual (2rho) or integral distance (3rho)
    double slack = 0.0;  // coding radius * max Lipschitz + integral error
    double threshold = 0.0;
    int witness = -1;
};

/// Birkhoff residual of the coded orbit over L >= T(rho, s) steps vs 2rho.
RhoCheck check_two_rho(const VariableTimeHorseshoe& h, const SymbolicWord& word, int L,
                       const TestFunctionFamily& family, const ReferenceMeasure& mu, double rho,
                       int s);

/// max_i |integrals_i - reference_i| vs 3rho (+ slack).
RhoCheck check_three_rho(const VariableTimeHorseshoe& h, const PeriodicOrbitMeasure& cand,
                         const ReferenceMeasure& mu, double rho, int s);

/// Canonical periodic words: lexicographically-least rotations, powers of
/// shorter words removed (those repeat the same orbit).
std::vector<std::vector<int>> enumerate_cyclic_words(int n_branches, int max_len,
                                                     std::int64_t cap = std::int64_t{1} << 16);

// --- convergence experiment ---------------------------------------------------

struct StagePlan {
    double rho;
    int s;
};

struct ExperimentPlan {
    std::vector<StagePlan> schedule;
    Rectangle rectangle;
    ConeField cones;
    std::vector<Point> seeds;
    BranchSearchBudget search;
    BranchBuildOptions build;
    int n_target = 2;
    int max_word_len = 6;
    std::int64_t word_cap = std::int64_t{1} << 16;
    Exec exec = Exec::parallel;
};

struct MeasureRow {
    std::vector<int> word;
    int period = 0;
    double distance = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct StageReport {
    double rho = 0.0;
    int s = 0;
    bool built = false;
    std::vector<int> return_times;
    double d_n = 0.0;
    double slack = 0.0;
    bool pass = false;
    std::string error;  // budget exhaustion recorded here; experiment continues
    std::vector<MeasureRow> rows;
};

struct ExperimentReport {
    std::vector<StageReport> stages;
    bool all_pass = true;
};

/// Per stage: build a branch set and horseshoe at (rho_n, s_n), enumerate the
/// periodic measures up to the word cap, and record d_n vs 3 rho_n.
ExperimentReport convergence_experiment(const MapSystem& map, const ReferenceMeasure& mu,
                                        const TestFunctionFamily& family,
                                        const ExperimentPlan& plan);

/// Measure sweep over one already-built horseshoe (one experiment stage).
StageReport measure_sweep(const VariableTimeHorseshoe& h, const TestFunctionFamily& family,
                          const ReferenceMeasure& mu, double rho, int s, int max_word_len,
                          std::int64_t word_cap, Exec exec = Exec::parallel);

}  // namespace varhorse

#endif
