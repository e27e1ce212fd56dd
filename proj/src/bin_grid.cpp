#include "gmi/bin_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmi {

namespace {

// Axis cap keeps degenerate inputs (huge spans, tiny cells) from blowing
// up memory. Out-of-range positions clamp into edge cells, so queries
// stay exact regardless.
constexpr int kMaxCellsPerAxis = 2048;

int clamp_int(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

int axis_cells(double span, double cell_size) {
    const double ideal = std::ceil(span / cell_size) + 2.0;
    if (!(ideal < static_cast<double>(kMaxCellsPerAxis))) {
        return kMaxCellsPerAxis;
    }
    return std::max(1, static_cast<int>(ideal));
}

}  // namespace

int BinGrid::cell_of_x(double x) const {
    const int c = static_cast<int>(std::floor((x - origin.x) / cell_size));
    return clamp_int(c, 0, n_cols - 1);
}

int BinGrid::cell_of_y(double y) const {
    const int r = static_cast<int>(std::floor((y - origin.y) / cell_size));
    return clamp_int(r, 0, n_rows - 1);
}

BinGrid build_bin_grid(const PointSet& ps, double cell_size) {
    require_valid(ps);
    if (!std::isfinite(cell_size) || cell_size <= 0.0) {
        throw Error(ErrorCode::InvalidCellSize,
                    "cell_size must be positive and finite");
    }

    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : ps.positions) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }

    BinGrid grid;
    grid.cell_size = cell_size;
    grid.origin = {min_x - cell_size, min_y - cell_size};
    grid.n_cols = axis_cells(max_x - min_x, cell_size);
    grid.n_rows = axis_cells(max_y - min_y, cell_size);

    const int n_bins = grid.num_cells();
    std::vector<int> cell_of(ps.size());
    std::vector<int> count(n_bins, 0);
    for (int i = 0; i < ps.size(); ++i) {
        const Vec2 p = ps.positions[i];
        const int bin = grid.cell_of_y(p.y) * grid.n_cols + grid.cell_of_x(p.x);
        cell_of[i] = bin;
        ++count[bin];
    }

    grid.bin_start.assign(n_bins + 1, 0);
    for (int b = 0; b < n_bins; ++b) {
        grid.bin_start[b + 1] = grid.bin_start[b] + count[b];
    }
    grid.point_index.resize(ps.size());
    std::vector<int> cursor(grid.bin_start.begin(), grid.bin_start.end() - 1);
    for (int i = 0; i < ps.size(); ++i) {  // ascending fill keeps bins sorted
        grid.point_index[cursor[cell_of[i]]++] = i;
    }
    return grid;
}

void query_radius(const BinGrid& grid, const PointSet& ps, Vec2 q,
                  double radius, std::vector<int>& out) {
    out.clear();
    const double r2 = radius * radius;
    const int cx0 = grid.cell_of_x(q.x - radius);
    const int cx1 = grid.cell_of_x(q.x + radius);
    const int cy0 = grid.cell_of_y(q.y - radius);
    const int cy1 = grid.cell_of_y(q.y + radius);
    for (int gy = cy0; gy <= cy1; ++gy) {
        for (int gx = cx0; gx <= cx1; ++gx) {
            const int bin = gy * grid.n_cols + gx;
            for (int k = grid.bin_start[bin]; k < grid.bin_start[bin + 1];
                 ++k) {
                const int i = grid.point_index[k];
                if (squared_norm(q - ps.positions[i]) <= r2) {
                    out.push_back(i);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
}

std::vector<int> query_radius(const BinGrid& grid, const PointSet& ps, Vec2 q,
                              double radius) {
    std::vector<int> out;
    query_radius(grid, ps, q, radius, out);
    return out;
}

int nearest_point(const BinGrid& grid, const PointSet& ps, Vec2 q) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();

    const auto scan_cell = [&](int gx, int gy) {
        if (gx < 0 || gx >= grid.n_cols || gy < 0 || gy >= grid.n_rows) {
            return;
        }
        const int bin = gy * grid.n_cols + gx;
        for (int k = grid.bin_start[bin]; k < grid.bin_start[bin + 1]; ++k) {
            const int i = grid.point_index[k];
            const double d2 = squared_norm(q - ps.positions[i]);
            if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                best = i;
                best_d2 = d2;
            }
        }
    };

    // True (unclamped) cell of q; rings are Chebyshev shells around it.
    const int qx = static_cast<int>(std::floor((q.x - grid.origin.x) / grid.cell_size));
    const int qy = static_cast<int>(std::floor((q.y - grid.origin.y) / grid.cell_size));

    // Farthest cell from q's cell, in Chebyshev cell distance.
    const int cap_x = std::max(std::abs(qx), std::abs(qx - (grid.n_cols - 1)));
    const int cap_y = std::max(std::abs(qy), std::abs(qy - (grid.n_rows - 1)));
    const int ring_cap = std::max(cap_x, cap_y);

    for (int ring = 0; ring <= ring_cap; ++ring) {
        if (best >= 0 && ring >= 1) {
            // Cells at ring R are at least (R-1) whole cells away from q.
            const double lb = (ring - 1) * grid.cell_size;
            if (lb * lb > best_d2) {
                break;
            }
        }
        if (ring == 0) {
            scan_cell(qx, qy);
            continue;
        }
        for (int gx = qx - ring; gx <= qx + ring; ++gx) {
            scan_cell(gx, qy - ring);
            scan_cell(gx, qy + ring);
        }
        for (int gy = qy - ring + 1; gy <= qy + ring - 1; ++gy) {
            scan_cell(qx - ring, gy);
            scan_cell(qx + ring, gy);
        }
    }
    return best;
}

}  // namespace gmi
