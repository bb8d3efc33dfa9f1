#ifndef VARHORSE_CONFIG_HPP
#define VARHORSE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "varhorse/fixture.hpp"
#include "varhorse/measures.hpp"

namespace varhorse {

/// Batch experiment configuration (JSON file; see README for the schema).
struct ExperimentConfig {
    // map selection
    std::string map_name = "affine_fixture";  // cat | perturbed_cat | standard | affine_fixture
    double kappa = 0.05;                      // perturbed_cat
    double K = 6.0;                           // standard

    // test family
    std::string family_kind = "fixture";  // fixture | fourier
    int k_max = 1;

    // reference measure
    std::string reference_kind = "fixture";  // fixture | lebesgue | long_orbit
    std::int64_t reference_length = 10'000'000;

    std::vector<StagePlan> schedule;

    // rectangle / cones
    double h = 1.0;
    double gamma = 0.3;
    double chi = 0.5;
    int pesin_horizon = 10;
    double ell0 = 10.0;
    std::vector<double> rect_center{0.0, 0.0};

    // seeds for the branch search
    std::string seeds_kind = "marked";  // marked (fixture) | grid
    int seed_count = 4096;

    // budgets and caps
    long certify_attempts = 128;
    int repair_rounds = 2;
    int n_min = 2;
    int m_max = 12;
    int polyline = 65;
    int cone_samples = 33;
    int n_target = 2;
    int refine_depth = 6;
    int max_word_len = 6;
    std::int64_t cylinder_cap = std::int64_t{1} << 20;
    std::int64_t word_cap = std::int64_t{1} << 16;

    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";
    int threads = 0;  // 0 = library default

    void validate() const;  // throws ConfigError naming the field
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& c);

/// Everything a pipeline stage needs, materialized from a validated config.
struct RunContext {
    MapSystem map;
    TestFunctionFamily family;
    ReferenceMeasure reference;
    Rectangle rectangle;
    ConeField cones;
    std::vector<Point> seeds;
    ExperimentConfig cfg;
};

RunContext materialize(const ExperimentConfig& cfg);

}  // namespace varhorse

#endif
