#include "gmi/oracle.hpp"

#include <cmath>

namespace gmi {

namespace detail {

ImageBuffer oracle_eval(const PointSet& ps, double sigma,
                        const CoordinateFrame& out_frame) {
    ImageBuffer out =
        ImageBuffer::zeros(out_frame.height, out_frame.width, ps.channels);
    const int n = ps.size();
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            const Vec2 q{static_cast<double>(c), static_cast<double>(r)};
            double wsum = 0.0;
            double num[3] = {0.0, 0.0, 0.0};
            for (int i = 0; i < n; ++i) {
                const double w = gaussian_weight(q, ps.positions[i], sigma);
                wsum += w;
                for (int ch = 0; ch < ps.channels; ++ch) {
                    num[ch] += ps.color(i, ch) * w;
                }
            }
            for (int ch = 0; ch < ps.channels; ++ch) {
                out.at(r, c, ch) = num[ch] / wsum;
            }
        }
    }
    return out;
}

}  // namespace detail

ImageBuffer oracle_forward(const PointSet& ps, double sigma,
                           const CoordinateFrame& out_frame) {
    require_valid(ps);
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        throw Error(ErrorCode::ConfigInvalid,
                    "sigma must be positive and finite");
    }
    require_frame(out_frame);
    return detail::oracle_eval(ps, sigma, out_frame);
}

namespace {

double weighted_sum(const ImageBuffer& weights, const ImageBuffer& values) {
    double s = 0.0;
    for (std::size_t k = 0; k < values.data.size(); ++k) {
        s += weights.data[k] * values.data[k];
    }
    return s;
}

}  // namespace

GradientSet oracle_gradients_fd(const PointSet& ps, double sigma,
                                const CoordinateFrame& out_frame,
                                const ImageBuffer& upstream, double step) {
    require_valid(ps);
    if (!std::isfinite(step) || step <= 0.0) {
        throw Error(ErrorCode::ConfigInvalid, "fd step must be positive");
    }
    if (upstream.height != out_frame.height ||
        upstream.width != out_frame.width ||
        upstream.channels != ps.channels) {
        throw Error(ErrorCode::ShapeMismatch,
                    "upstream shape does not match the output frame");
    }

    GradientSet grad = GradientSet::zeros(ps.size(), ps.channels);
    PointSet work = ps;

    const auto loss_at = [&] {
        return weighted_sum(upstream,
                            detail::oracle_eval(work, sigma, out_frame));
    };

    for (int i = 0; i < ps.size(); ++i) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord =
                axis == 0 ? work.positions[i].x : work.positions[i].y;
            const double base = coord;
            coord = base + step;
            const double plus = loss_at();
            coord = base - step;
            const double minus = loss_at();
            coord = base;
            const double d = (plus - minus) / (2.0 * step);
            if (axis == 0) {
                grad.d_positions[i].x = d;
            } else {
                grad.d_positions[i].y = d;
            }
        }
        for (int ch = 0; ch < ps.channels; ++ch) {
            double& coord = work.color(i, ch);
            const double base = coord;
            coord = base + step;
            const double plus = loss_at();
            coord = base - step;
            const double minus = loss_at();
            coord = base;
            grad.d_colors[static_cast<std::size_t>(i) * ps.channels + ch] =
                (plus - minus) / (2.0 * step);
        }
    }
    return grad;
}

BufferDiff compare_buffers(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::ShapeMismatch,
                    "buffers have different shapes");
    }
    BufferDiff diff;
    double total = 0.0;
    for (int r = 0; r < a.height; ++r) {
        for (int c = 0; c < a.width; ++c) {
            for (int ch = 0; ch < a.channels; ++ch) {
                const double d = std::abs(a.at(r, c, ch) - b.at(r, c, ch));
                total += d;
                if (d > diff.max_abs) {
                    diff.max_abs = d;
                    diff.argmax_row = r;
                    diff.argmax_col = c;
                    diff.argmax_channel = ch;
                }
            }
        }
    }
    diff.mean_abs = total / static_cast<double>(a.data.size());
    return diff;
}

}  // namespace gmi
