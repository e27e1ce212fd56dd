#pragma once

// Domain types and shared numeric conventions for the Gaussian-mixture
// scattered-point interpolation engine. All arithmetic is double precision.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmi {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double squared_norm(Vec2 v) { return v.x * v.x + v.y * v.y; }

// Output raster frame. Pixel (row r, col c) has its center at continuous
// coordinates (x = c, y = r); on-grid points span [0, width-1] x [0, height-1].
struct CoordinateFrame {
    int width = 0;
    int height = 0;
};

// Policy for output pixels whose truncation neighborhood is empty.
enum class Fallback { NearestPoint, Zero };

enum class ErrorCode {
    NonFiniteValue,
    ColorOutOfRange,
    EmptyPointSet,
    ShapeMismatch,
    InvalidCellSize,
    ConfigInvalid,
    CacheMismatch,
    InvalidDimensions,
    InvalidFactor,
    InvalidCount,
    UnsupportedFormat,
    CorruptFile,
    EmptyLog,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// N scattered known points: positions in pixel units plus per-channel colors
// in [0,1], stored point-major (colors[i*channels + ch]). Positions may lie
// outside the output raster; nothing clamps them.
struct PointSet {
    std::vector<Vec2> positions;
    std::vector<double> colors;
    int channels = 1;

    int size() const { return static_cast<int>(positions.size()); }
    double color(int i, int ch) const {
        return colors[static_cast<std::size_t>(i) * channels + ch];
    }
    double& color(int i, int ch) {
        return colors[static_cast<std::size_t>(i) * channels + ch];
    }
};

// Interpolation parameters. cutoff_radius is in absolute pixels; callers
// typically set it to a small multiple of sigma.
struct InterpConfig {
    double sigma = 1.0;
    double cutoff_radius = 3.0;
    Fallback fallback = Fallback::NearestPoint;
    CoordinateFrame frame;
};

// Config with the default cutoff of 3*sigma.
inline InterpConfig make_config(double sigma, CoordinateFrame frame,
                                Fallback fallback = Fallback::NearestPoint) {
    return InterpConfig{sigma, 3.0 * sigma, fallback, frame};
}

// Row-major H x W x C raster of finite channel values, nominally in [0,1].
// index(r, c, ch) = (r*W + c)*C + ch, fixed so golden files reproduce.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    static ImageBuffer zeros(int height, int width, int channels);

    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width + c) * channels + ch;
    }
    double at(int r, int c, int ch) const { return data[index(r, c, ch)]; }
    double& at(int r, int c, int ch) { return data[index(r, c, ch)]; }

    CoordinateFrame frame() const { return {width, height}; }
    bool same_shape(const ImageBuffer& other) const {
        return height == other.height && width == other.width &&
               channels == other.channels;
    }
};

// Gradients of a scalar loss w.r.t. a PointSet's colors and positions;
// shapes match the point set they were computed for.
struct GradientSet {
    std::vector<double> d_colors;   // N * channels, point-major
    std::vector<Vec2> d_positions;  // N
    int channels = 1;

    static GradientSet zeros(int num_points, int channels);

    double d_color(int i, int ch) const {
        return d_colors[static_cast<std::size_t>(i) * channels + ch];
    }
};

// Unnormalized Gaussian weight exp(-|q - mu|^2 / (2 sigma^2)) in (0, 1].
// The mixture's normalization constant cancels in the weight ratio, so it
// is dropped; the squared-distance form keeps q/mu symmetry exact.
double gaussian_weight(const Vec2& q, const Vec2& mu, double sigma);

struct ValidationIssue {
    ErrorCode code;
    long index;  // offending point index, -1 when not tied to one
    std::string message;
};

// Checks the PointSet invariants; reports the first violated one.
std::optional<ValidationIssue> validate_point_set(const PointSet& ps);

void require_valid(const PointSet& ps);   // throws Error on violation
void require_valid(const InterpConfig& cfg);
void require_frame(const CoordinateFrame& frame);

}  // namespace gmi
