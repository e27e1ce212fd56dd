#pragma once

// Shared helpers for the test suites.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "gmi/core.hpp"
#include "gmi/rng.hpp"

namespace gmi_test {

inline bool bits_equal(const std::vector<double>& a,
                       const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

inline bool bits_equal(const std::vector<gmi::Vec2>& a,
                       const std::vector<gmi::Vec2>& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(gmi::Vec2)) ==
                0);
}

inline gmi::PointSet single_point(double x, double y, double color) {
    gmi::PointSet ps;
    ps.positions = {{x, y}};
    ps.colors = {color};
    ps.channels = 1;
    return ps;
}

inline gmi::ImageBuffer constant_image(int h, int w, int c, double value) {
    gmi::ImageBuffer img = gmi::ImageBuffer::zeros(h, w, c);
    for (double& v : img.data) {
        v = value;
    }
    return img;
}

// f(r, c) = c / (W-1), constant down columns.
inline gmi::ImageBuffer ramp_image(int h, int w) {
    gmi::ImageBuffer img = gmi::ImageBuffer::zeros(h, w, 1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            img.at(r, c, 0) = w > 1 ? static_cast<double>(c) / (w - 1) : 0.0;
        }
    }
    return img;
}

inline gmi::PointSet random_points(gmi::Rng& rng, int n, int channels,
                                   double extent) {
    gmi::PointSet ps;
    ps.channels = channels;
    for (int i = 0; i < n; ++i) {
        ps.positions.push_back(
            {rng.uniform(-1.0, extent), rng.uniform(-1.0, extent)});
        for (int ch = 0; ch < channels; ++ch) {
            ps.colors.push_back(rng.next_double());
        }
    }
    return ps;
}

// Scratch directory unique to this test process.
inline std::filesystem::path temp_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("gmi_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

}  // namespace gmi_test
