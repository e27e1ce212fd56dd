#include "gmi/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "gmi/engine.hpp"
#include "gmi/imaging.hpp"
#include "gmi/resample.hpp"

namespace gmi {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

// Known points live at the nominal block centers of the factor grid;
// colors come from the given low-resolution raster.
PointSet point_set_from_lowres(const ImageBuffer& lowres, int factor) {
    PointSet ps;
    ps.channels = lowres.channels;
    const double half = (factor - 1) / 2.0;
    ps.positions.reserve(static_cast<std::size_t>(lowres.height) *
                         lowres.width);
    for (int br = 0; br < lowres.height; ++br) {
        for (int bc = 0; bc < lowres.width; ++bc) {
            ps.positions.push_back(
                {bc * static_cast<double>(factor) + half,
                 br * static_cast<double>(factor) + half});
        }
    }
    ps.colors = lowres.data;
    return ps;
}

}  // namespace

std::vector<std::string> all_benchmark_methods() {
    return {"nearest", "box",     "bilinear", "bicubic",
            "hamming", "lanczos", "gmm"};
}

std::vector<double> auto_sigma_candidates(int factor) {
    return {0.4 * factor, 0.5 * factor, 0.6 * factor};
}

std::vector<BenchmarkRow> run_benchmark(
    const std::vector<std::pair<std::string, ImageBuffer>>& images,
    const BenchmarkOptions& options) {
    const std::vector<std::string> methods =
        options.methods.empty() ? all_benchmark_methods() : options.methods;
    for (const std::string& m : methods) {
        if (m != "gmm" && !filter_from_name(m)) {
            throw Error(ErrorCode::ConfigInvalid, "unknown method: " + m);
        }
    }
    for (int f : options.factors) {
        if (f < 1) {
            throw Error(ErrorCode::InvalidFactor,
                        "factors must be positive integers");
        }
    }

    std::vector<BenchmarkRow> rows;
    for (const auto& [image_id, img] : images) {
        const CoordinateFrame full = img.frame();
        for (int factor : options.factors) {
            ImageBuffer lowres;
            if (options.downsample == DownsampleMode::BoxAverage) {
                lowres = block_mean_downsample(img, factor);
            } else {
                const int lw = (img.width + factor - 1) / factor;
                const int lh = (img.height + factor - 1) / factor;
                lowres = resample(img, {lw, lh}, Filter::Bicubic);
            }

            for (const std::string& method : methods) {
                BenchmarkRow row;
                row.image_id = image_id;
                row.factor = factor;
                row.method = method;

                if (method == "gmm") {
                    const PointSet ps = point_set_from_lowres(lowres, factor);
                    const std::vector<double> sigmas =
                        options.sigma ? std::vector<double>{*options.sigma}
                                      : auto_sigma_candidates(factor);
                    bool first = true;
                    for (double sigma : sigmas) {
                        const auto t0 = Clock::now();
                        const ForwardResult fwd =
                            forward(ps, make_config(sigma, full), full,
                                    options.num_workers);
                        const double ms = ms_since(t0);
                        const double l1 = l1_metric(fwd.image, img);
                        if (first || l1 < row.l1) {
                            row.l1 = l1;
                            row.sigma_used = sigma;
                            row.wall_time_ms = ms;
                            first = false;
                        }
                    }
                } else {
                    const Filter filter = *filter_from_name(method);
                    const auto t0 = Clock::now();
                    const ImageBuffer up = resample(lowres, full, filter);
                    row.wall_time_ms = ms_since(t0);
                    row.l1 = l1_metric(up, img);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<AggregateRow> aggregate_benchmark(
    const std::vector<BenchmarkRow>& rows) {
    std::vector<AggregateRow> aggregates;
    std::vector<int> counts;
    for (const BenchmarkRow& row : rows) {
        std::size_t k = 0;
        for (; k < aggregates.size(); ++k) {
            if (aggregates[k].factor == row.factor &&
                aggregates[k].method == row.method) {
                break;
            }
        }
        if (k == aggregates.size()) {
            aggregates.push_back({row.factor, row.method, 0.0});
            counts.push_back(0);
        }
        aggregates[k].mean_l1 += row.l1;
        ++counts[k];
    }
    for (std::size_t k = 0; k < aggregates.size(); ++k) {
        aggregates[k].mean_l1 /= counts[k];
    }
    return aggregates;
}

void write_benchmark_report(const std::vector<BenchmarkRow>& rows,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    out << "image_id,factor,method,sigma_used,l1,wall_time_ms\n";
    for (const BenchmarkRow& row : rows) {
        out << row.image_id << "," << row.factor << "," << row.method << ",";
        if (row.sigma_used) {
            out << format_double(*row.sigma_used);
        }
        out << "," << format_double(row.l1) << ","
            << format_double(row.wall_time_ms) << "\n";
    }
    out << "\n";
    out << "factor,method,mean_l1\n";
    for (const AggregateRow& agg : aggregate_benchmark(rows)) {
        out << agg.factor << "," << agg.method << ","
            << format_double(agg.mean_l1) << "\n";
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "short write: " + path);
    }
}

}  // namespace gmi
