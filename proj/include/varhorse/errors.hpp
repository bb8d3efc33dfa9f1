#ifndef VARHORSE_ERRORS_HPP
#define VARHORSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace varhorse {

struct DynError : std::runtime_error {
    explicit DynError(const std::string& what) : std::runtime_error(what) {}
};

// orbit left the defined domain or produced a nonfinite coordinate
struct OrbitEscape : DynError {
    int step;
    explicit OrbitEscape(int step_)
        : DynError("orbit escape at step " + std::to_string(step_)), step(step_) {}
};

struct DegenerateCocycle : DynError {
    int step;
    explicit DegenerateCocycle(int step_)
        : DynError("singular jacobian at step " + std::to_string(step_)), step(step_) {}
};

struct SplittingDegenerate : DynError {
    double angle;
    explicit SplittingDegenerate(double angle_)
        : DynError("stable/unstable splitting angle below threshold"), angle(angle_) {}
};

struct NoFiniteCertificate : DynError {
    double required_ell;
    explicit NoFiniteCertificate(double ell)
        : DynError("required Pesin constant exceeds cap"), required_ell(ell) {}
};

struct ChartDegenerate : DynError {
    ChartDegenerate() : DynError("rectangle chart not injective (frame angle too small)") {}
};

struct CapExceeded : DynError {
    explicit CapExceeded(const std::string& what) : DynError(what) {}
};

struct CrossingIncomplete : DynError {
    int i, j;
    CrossingIncomplete(int i_, int j_)
        : DynError("crossing incomplete for pair (" + std::to_string(i_) + ", " +
                   std::to_string(j_) + ")"),
          i(i_),
          j(j_) {}
};

struct InsufficientItinerary : DynError {
    InsufficientItinerary() : DynError("itinerary exhausted before covering requested length") {}
};

struct BudgetExhausted : DynError {
    int accepted;
    std::string diagnostics;
    BudgetExhausted(int accepted_, std::string diag)
        : DynError("branch search budget exhausted: " + diag),
          accepted(accepted_),
          diagnostics(std::move(diag)) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& what)
        : std::runtime_error("config field '" + field_ + "': " + what), field(std::move(field_)) {}
};

}  // namespace varhorse

#endif
