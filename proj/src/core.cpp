#include "gmi/core.hpp"

#include <cmath>

namespace gmi {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::ColorOutOfRange: return "ColorOutOfRange";
        case ErrorCode::EmptyPointSet: return "EmptyPointSet";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::InvalidCellSize: return "InvalidCellSize";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::CacheMismatch: return "CacheMismatch";
        case ErrorCode::InvalidDimensions: return "InvalidDimensions";
        case ErrorCode::InvalidFactor: return "InvalidFactor";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::EmptyLog: return "EmptyLog";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

ImageBuffer ImageBuffer::zeros(int height, int width, int channels) {
    if (height < 1 || width < 1 || channels < 1) {
        throw Error(ErrorCode::InvalidDimensions,
                    "image dimensions must be positive");
    }
    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.data.assign(
        static_cast<std::size_t>(height) * width * channels, 0.0);
    return img;
}

GradientSet GradientSet::zeros(int num_points, int channels) {
    GradientSet g;
    g.channels = channels;
    g.d_colors.assign(static_cast<std::size_t>(num_points) * channels, 0.0);
    g.d_positions.assign(static_cast<std::size_t>(num_points), Vec2{});
    return g;
}

double gaussian_weight(const Vec2& q, const Vec2& mu, double sigma) {
    const double dx = q.x - mu.x;
    const double dy = q.y - mu.y;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

std::optional<ValidationIssue> validate_point_set(const PointSet& ps) {
    if (ps.positions.empty()) {
        return ValidationIssue{ErrorCode::EmptyPointSet, -1,
                               "point set is empty"};
    }
    if (ps.channels != 1 && ps.channels != 3) {
        return ValidationIssue{
            ErrorCode::ShapeMismatch, -1,
            "channels must be 1 or 3, got " + std::to_string(ps.channels)};
    }
    const std::size_t expected =
        ps.positions.size() * static_cast<std::size_t>(ps.channels);
    if (ps.colors.size() != expected) {
        return ValidationIssue{
            ErrorCode::ShapeMismatch, -1,
            "colors holds " + std::to_string(ps.colors.size()) +
                " values, expected " + std::to_string(expected)};
    }
    for (int i = 0; i < ps.size(); ++i) {
        const Vec2 p = ps.positions[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            return ValidationIssue{
                ErrorCode::NonFiniteValue, i,
                "non-finite position at index " + std::to_string(i)};
        }
        for (int ch = 0; ch < ps.channels; ++ch) {
            const double c = ps.color(i, ch);
            if (!std::isfinite(c)) {
                return ValidationIssue{
                    ErrorCode::NonFiniteValue, i,
                    "non-finite color at index " + std::to_string(i)};
            }
            if (c < 0.0 || c > 1.0) {
                return ValidationIssue{
                    ErrorCode::ColorOutOfRange, i,
                    "color " + std::to_string(c) + " out of [0,1] at index " +
                        std::to_string(i)};
            }
        }
    }
    return std::nullopt;
}

void require_valid(const PointSet& ps) {
    if (auto issue = validate_point_set(ps)) {
        throw Error(issue->code, issue->message);
    }
}

void require_valid(const InterpConfig& cfg) {
    if (!std::isfinite(cfg.sigma) || cfg.sigma <= 0.0) {
        throw Error(ErrorCode::ConfigInvalid,
                    "sigma must be positive and finite");
    }
    if (!std::isfinite(cfg.cutoff_radius) || cfg.cutoff_radius <= 0.0) {
        throw Error(ErrorCode::ConfigInvalid,
                    "cutoff_radius must be positive and finite");
    }
}

void require_frame(const CoordinateFrame& frame) {
    if (frame.width < 1 || frame.height < 1) {
        throw Error(ErrorCode::InvalidDimensions,
                    "frame dimensions must be at least 1x1");
    }
}

}  // namespace gmi
