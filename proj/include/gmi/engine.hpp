#pragma once

// Forward interpolation over an output raster and the analytic backward
// pass. Both are data-parallel over output rows and produce results that
// are independent of the worker count, bit for bit.

#include <cstdint>
#include <utility>
#include <vector>

#include "gmi/bin_grid.hpp"
#include "gmi/core.hpp"

namespace gmi {

// Per-pixel contribution lists captured by forward() and replayed by
// backward(). Pixel p = r*width + c owns contributions
// [pixel_start[p], pixel_start[p+1]); weights are the unnormalized
// Gaussian weights and normalizer[p] is their sum (0 on fallback pixels).
struct ForwardCache {
    int width = 0;
    int height = 0;
    int channels = 0;
    int num_points = 0;
    double sigma = 0.0;
    double cutoff_radius = 0.0;
    Fallback fallback = Fallback::NearestPoint;

    std::vector<std::int64_t> pixel_start;
    std::vector<int> contrib_point;
    std::vector<double> contrib_weight;
    std::vector<double> normalizer;
    std::vector<std::uint8_t> fallback_flag;
    std::vector<int> nearest_index;  // per fallback pixel, else -1
    std::vector<double> output;      // copy of the forward image data

    std::int64_t num_pixels() const {
        return static_cast<std::int64_t>(width) * height;
    }
    int fallback_count() const;
};

struct ForwardResult {
    ImageBuffer image;
    ForwardCache cache;
};

// Renders the point set onto out_frame: each pixel center q gathers the
// points within cutoff_radius and blends their colors by normalized
// Gaussian weight; empty neighborhoods follow cfg.fallback. Weights are
// geometric only and shared across channels.
ForwardResult forward(const PointSet& ps, const InterpConfig& cfg,
                      const CoordinateFrame& out_frame, int num_workers = 1);
ForwardResult forward(const PointSet& ps, const InterpConfig& cfg,
                      int num_workers = 1);

// Gradients of sum(upstream * forward_output) w.r.t. colors and positions:
//   d c(q)/d c_i   = w_i / W
//   d c(q)/d mu_i  = (w_i / W) * ((q - mu_i)/sigma^2) * (c_i - c(q))
// Fallback pixels under NearestPoint route their upstream gradient to the
// nearest point's color and contribute nothing to positions.
GradientSet backward(const PointSet& ps, const InterpConfig& cfg,
                     const ForwardCache& cache, const ImageBuffer& upstream,
                     int num_workers = 1);

namespace detail {

// Contiguous row partition used by the parallel passes: num_workers ranges
// (possibly empty) that are disjoint and cover [0, height).
std::vector<std::pair<int, int>> row_ranges(int height, int num_workers);

}  // namespace detail

}  // namespace gmi
