#pragma once

// Downsample-then-upsample reconstruction benchmark comparing the six
// classical resamplers against the Gaussian-mixture method, reported as
// CSV rows plus per-(factor, method) aggregate means.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmi/core.hpp"

namespace gmi {

struct BenchmarkRow {
    std::string image_id;
    int factor = 0;
    std::string method;
    std::optional<double> sigma_used;  // set for the gmm method
    double l1 = 0.0;
    double wall_time_ms = 0.0;
};

struct AggregateRow {
    int factor = 0;
    std::string method;
    double mean_l1 = 0.0;
};

enum class DownsampleMode { BoxAverage, Bicubic };

struct BenchmarkOptions {
    std::vector<int> factors{2, 4, 8, 16};
    std::vector<std::string> methods;   // empty = all_benchmark_methods()
    std::optional<double> sigma;        // nullopt = auto sweep per factor
    DownsampleMode downsample = DownsampleMode::BoxAverage;
    int num_workers = 1;
};

// Six classical filter names plus "gmm".
std::vector<std::string> all_benchmark_methods();

// Sigma candidates for auto mode: {0.4, 0.5, 0.6} times the known-point
// spacing (the downsample factor).
std::vector<double> auto_sigma_candidates(int factor);

std::vector<BenchmarkRow> run_benchmark(
    const std::vector<std::pair<std::string, ImageBuffer>>& images,
    const BenchmarkOptions& options);

// Means over images per (factor, method), in first-seen row order.
std::vector<AggregateRow> aggregate_benchmark(
    const std::vector<BenchmarkRow>& rows);

// Row table, a blank line, then the aggregate table.
void write_benchmark_report(const std::vector<BenchmarkRow>& rows,
                            const std::string& path);

}  // namespace gmi
