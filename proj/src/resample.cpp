#include "gmi/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gmi {

namespace {

double sinc(double t) {  // sin(pi t) / (pi t), 1 at t = 0
    if (t == 0.0) {
        return 1.0;
    }
    const double x = std::numbers::pi * t;
    return std::sin(x) / x;
}

}  // namespace

FilterSpec filter_spec(Filter f) {
    switch (f) {
        case Filter::Nearest: return {f, 0.5};
        case Filter::Box: return {f, 0.5};
        case Filter::Bilinear: return {f, 1.0};
        case Filter::Bicubic: return {f, 2.0};
        case Filter::Hamming: return {f, 1.0};
        case Filter::Lanczos: return {f, 3.0};
    }
    return {f, 1.0};
}

double kernel_eval(Filter f, double t) {
    switch (f) {
        case Filter::Nearest:
        case Filter::Box:
            // pulse with the 0.5 boundary included on the negative side
            return (t >= -0.5 && t < 0.5) ? 1.0 : 0.0;
        case Filter::Bilinear: {
            const double a = std::abs(t);
            return a <= 1.0 ? 1.0 - a : 0.0;
        }
        case Filter::Hamming: {
            if (std::abs(t) > 1.0) {
                return 0.0;
            }
            return (0.54 + 0.46 * std::cos(std::numbers::pi * t)) * sinc(t);
        }
        case Filter::Bicubic: {
            // Keys kernel with a = -1/2
            const double a = std::abs(t);
            if (a < 1.0) {
                return ((1.5 * a - 2.5) * a) * a + 1.0;
            }
            if (a < 2.0) {
                return ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0;
            }
            return 0.0;
        }
        case Filter::Lanczos: {
            if (std::abs(t) >= 3.0) {
                return 0.0;
            }
            return sinc(t) * sinc(t / 3.0);
        }
    }
    return 0.0;
}

const char* filter_name(Filter f) {
    switch (f) {
        case Filter::Nearest: return "nearest";
        case Filter::Box: return "box";
        case Filter::Bilinear: return "bilinear";
        case Filter::Bicubic: return "bicubic";
        case Filter::Hamming: return "hamming";
        case Filter::Lanczos: return "lanczos";
    }
    return "unknown";
}

std::optional<Filter> filter_from_name(std::string_view name) {
    for (Filter f : {Filter::Nearest, Filter::Box, Filter::Bilinear,
                     Filter::Bicubic, Filter::Hamming, Filter::Lanczos}) {
        if (name == filter_name(f)) {
            return f;
        }
    }
    return std::nullopt;
}

namespace {

// Weights of one output coordinate against the source axis.
struct Taps {
    int first = 0;               // first source index (unclamped)
    std::vector<double> weight;  // renormalized to sum 1
};

std::vector<Taps> make_taps(int in_size, int out_size, Filter f) {
    const FilterSpec spec = filter_spec(f);
    const double scale =
        static_cast<double>(in_size) / static_cast<double>(out_size);
    // widen when minifying so the kernel spans the source footprint
    const double filter_scale = std::max(1.0, scale);
    const double span = spec.support * filter_scale;

    std::vector<Taps> taps(out_size);
    for (int j = 0; j < out_size; ++j) {
        const double center = (j + 0.5) * scale - 0.5;
        Taps& t = taps[j];
        if (f == Filter::Nearest) {
            t.first =
                static_cast<int>(std::floor(center + 0.5));
            t.weight.assign(1, 1.0);
            continue;
        }
        const int i0 = static_cast<int>(std::ceil(center - span));
        const int i1 = static_cast<int>(std::floor(center + span));
        t.first = i0;
        t.weight.resize(i1 - i0 + 1);
        double sum = 0.0;
        for (int i = i0; i <= i1; ++i) {
            const double w = kernel_eval(f, (i - center) / filter_scale);
            t.weight[i - i0] = w;
            sum += w;
        }
        for (double& w : t.weight) {
            w /= sum;
        }
    }
    return taps;
}

}  // namespace

ImageBuffer resample_axis(const ImageBuffer& img, int axis, int out_size,
                          Filter f) {
    if (img.height < 1 || img.width < 1 || img.channels < 1 || out_size < 1) {
        throw Error(ErrorCode::InvalidDimensions,
                    "resample sizes must be at least 1");
    }
    const int in_size = axis == 0 ? img.width : img.height;
    const auto taps = make_taps(in_size, out_size, f);

    ImageBuffer out =
        axis == 0 ? ImageBuffer::zeros(img.height, out_size, img.channels)
                  : ImageBuffer::zeros(out_size, img.width, img.channels);

    const int lines = axis == 0 ? img.height : img.width;
    for (int line = 0; line < lines; ++line) {
        for (int j = 0; j < out_size; ++j) {
            const Taps& t = taps[j];
            for (int ch = 0; ch < img.channels; ++ch) {
                double acc = 0.0;
                for (std::size_t k = 0; k < t.weight.size(); ++k) {
                    const int i = std::clamp(t.first + static_cast<int>(k), 0,
                                             in_size - 1);
                    const double v = axis == 0 ? img.at(line, i, ch)
                                               : img.at(i, line, ch);
                    acc += t.weight[k] * v;
                }
                if (axis == 0) {
                    out.at(line, j, ch) = acc;
                } else {
                    out.at(j, line, ch) = acc;
                }
            }
        }
    }
    return out;
}

ImageBuffer resample(const ImageBuffer& img, const CoordinateFrame& out_frame,
                     Filter f) {
    require_frame(out_frame);
    ImageBuffer tmp = resample_axis(img, 0, out_frame.width, f);
    ImageBuffer out = resample_axis(tmp, 1, out_frame.height, f);
    for (double& v : out.data) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

}  // namespace gmi
