#pragma once

// Image and point-table I/O, point-set extraction, metrics, and synthetic
// test images. File formats are text/PNM/PNG only; all paths UTF-8.

#include <cstdint>
#include <string>
#include <vector>

#include "gmi/core.hpp"
#include "gmi/rng.hpp"

namespace gmi {

// PPM/PGM (P6/P5, maxval <= 255) and 8-bit PNG. Loading maps v/255 for
// maxval 255; saving writes round(v*255) clamped to [0,255].
ImageBuffer load_image(const std::string& path);
void save_image(const ImageBuffer& img, const std::string& path);

// One point per factor x factor block: color box-averaged over the block's
// true extent (partial edge blocks included), position at the nominal
// block center (bc*f + (f-1)/2, br*f + (f-1)/2). This is also the bridge
// between the resamplers' half-pixel convention and the integer-centered
// point frame: lowres pixel j sits at j*f + (f-1)/2 in source coordinates.
PointSet grid_subsample(const ImageBuffer& img, int factor);

// The matching low-resolution raster of block means, ceil(H/f) x ceil(W/f).
ImageBuffer block_mean_downsample(const ImageBuffer& img, int factor);

// n positions drawn i.i.d. uniform over [-0.5, W-0.5) x [-0.5, H-0.5);
// colors come from the nearest source pixel. Same seed, same point set.
PointSet random_subsample(const ImageBuffer& img, int n, std::uint64_t seed);

// Mean absolute difference over all pixels and channels, in [0,1].
double l1_metric(const ImageBuffer& a, const ImageBuffer& b);

// Text point table, header "x,y,r,g,b" (3 channels) or "x,y,v" (1);
// values round-trip to 17 significant digits, row order preserved.
void save_point_set(const PointSet& ps, const std::string& path);
PointSet load_point_set(const std::string& path);

struct TrajectoryEntry {
    int step = 0;
    int point_index = 0;
    double x = 0.0;
    double y = 0.0;
    double loss = 0.0;
};

// Rows of (step, point_index, x, y, loss); steps nondecreasing, one row
// per (step, point) for logged steps.
struct TrajectoryLog {
    std::vector<TrajectoryEntry> entries;
};

void save_trajectory(const TrajectoryLog& log, const std::string& path);
TrajectoryLog load_trajectory(const std::string& path);

// Smooth synthetic image: a handful of random Gaussian bumps around a
// mid-gray base, clamped to [0,1].
ImageBuffer make_blob_image(int width, int height, int channels, Rng& rng);

// "%.17g" formatting shared by the text tables, enough digits for exact
// double round-trips.
std::string format_double(double v);

}  // namespace gmi
