#pragma once

// Deliberately slow, obviously correct reference implementations used to
// validate the engine: a full-sum forward pass with no truncation, no
// spatial index and no parallelism, plus finite-difference gradients.

#include "gmi/core.hpp"

namespace gmi {

// Exact mixture evaluation over all N points for every pixel, accumulated
// in ascending point order.
ImageBuffer oracle_forward(const PointSet& ps, double sigma,
                           const CoordinateFrame& out_frame);

// Central finite differences of sum(upstream * oracle_forward) w.r.t.
// every color and position coordinate. O(N * (C+2) * H * W * N); intended
// for tiny instances only.
GradientSet oracle_gradients_fd(const PointSet& ps, double sigma,
                                const CoordinateFrame& out_frame,
                                const ImageBuffer& upstream,
                                double step = 1e-5);

struct BufferDiff {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int argmax_row = 0;
    int argmax_col = 0;
    int argmax_channel = 0;
};

// Elementwise statistics of |a - b|; shapes must match.
BufferDiff compare_buffers(const ImageBuffer& a, const ImageBuffer& b);

namespace detail {

// Mixture evaluation without input validation; finite differences perturb
// colors past the [0,1] bound and must still evaluate the formula.
ImageBuffer oracle_eval(const PointSet& ps, double sigma,
                        const CoordinateFrame& out_frame);

}  // namespace detail

}  // namespace gmi
