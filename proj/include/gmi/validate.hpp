#pragma once

// Randomized cross-validation of the engine against the slow reference:
// untruncated forward equivalence, truncation error at 3*sigma, analytic
// vs finite-difference gradients, and worker-count determinism.

#include <cstdint>
#include <string>
#include <vector>

#include "gmi/core.hpp"
#include "gmi/rng.hpp"

namespace gmi {

struct RandomInstance {
    PointSet points;
    double sigma = 1.0;
    CoordinateFrame frame;
    std::uint64_t seed = 0;  // replays the instance through random_instance
};

// Frame up to grid_max per side, 1..points_max points with positions in
// [-1, w] x [-1, h], colors uniform in [0,1], 1 or 3 channels, sigma
// uniform in [sigma_lo, sigma_hi].
RandomInstance random_instance(std::uint64_t seed, int grid_max,
                               int points_max, double sigma_lo = 0.5,
                               double sigma_hi = 4.0);

// Entries uniform in [-1, 1].
ImageBuffer random_upstream(Rng& rng, const CoordinateFrame& frame,
                            int channels);

// A radius guaranteed to exceed the instance diameter (positions plus
// pixel centers), making truncation a no-op.
double untruncated_radius(const RandomInstance& instance);

// Max over entries of |a-b| relative to max(|a|,|b|), ignoring entries
// where both magnitudes are at or below abs_floor.
double max_relative_error(const std::vector<double>& a,
                          const std::vector<double>& b,
                          double abs_floor = 0.0);

struct GradientCheck {
    bool passed = true;
    double worst_rel = 0.0;  // worst relative error above the floor
};

// Entry passes when |a-b| <= abs_floor + rel_tol * max(|a|,|b|).
GradientCheck compare_gradients(const GradientSet& got,
                                const GradientSet& want, double rel_tol,
                                double abs_floor);

struct CheckResult {
    std::string name;
    bool hard = true;  // hard checks gate the exit code
    bool passed = true;
    double worst = 0.0;
    double tolerance = 0.0;
    std::vector<std::uint64_t> failed_seeds;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    int cases = 100;
    int grid_max = 8;
    int points_max = 20;
    bool inject_fault = false;  // test hook: corrupts one gradient entry
};

struct ValidationSummary {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

ValidationSummary run_validation(const ValidationOptions& options);

}  // namespace gmi
