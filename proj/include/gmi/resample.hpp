#pragma once

// Separable uniform-grid resamplers: nearest, box, bilinear, bicubic
// (Keys, a = -1/2), Hamming-windowed sinc and Lanczos-3. Coordinates are
// center-aligned: x_src = (j + 0.5) * in/out - 0.5; minification widens
// the kernel by the scale factor; per-pixel weights renormalize to 1.

#include <optional>
#include <string_view>

#include "gmi/core.hpp"

namespace gmi {

enum class Filter { Nearest, Box, Bilinear, Bicubic, Hamming, Lanczos };

struct FilterSpec {
    Filter filter = Filter::Bilinear;
    double support = 1.0;  // kernel vanishes outside [-support, support]
};

FilterSpec filter_spec(Filter f);

// The pinned kernel value at t. Nearest is point sampling and shares the
// box pulse here for completeness.
double kernel_eval(Filter f, double t);

const char* filter_name(Filter f);
std::optional<Filter> filter_from_name(std::string_view name);

// Horizontal pass then vertical pass, edge-clamped, final output clamped
// to [0,1].
ImageBuffer resample(const ImageBuffer& img, const CoordinateFrame& out_frame,
                     Filter f);

// Single-axis pass without the final clamp (axis 0 resizes width, axis 1
// height). resample() is the composition of the two.
ImageBuffer resample_axis(const ImageBuffer& img, int axis, int out_size,
                          Filter f);

}  // namespace gmi
