#pragma once

// Uniform bin grid over point positions. Radius queries touch only the
// cells overlapping the query disk instead of scanning all points; the
// grid never changes query results, only their cost.

#include <vector>

#include "gmi/core.hpp"

namespace gmi {

// CSR layout: cell (gx, gy) owns point_index[bin_start[gy*n_cols + gx] ..
// bin_start[gy*n_cols + gx + 1]), ascending point index within each cell.
// Every point lives in exactly one cell; positions outside the covered
// rectangle clamp into the edge cells, so membership is still total.
struct BinGrid {
    double cell_size = 1.0;
    Vec2 origin;  // lower corner of cell (0, 0)
    int n_cols = 1;
    int n_rows = 1;
    std::vector<int> bin_start;
    std::vector<int> point_index;

    int cell_of_x(double x) const;  // clamped to [0, n_cols)
    int cell_of_y(double y) const;  // clamped to [0, n_rows)
    int num_cells() const { return n_cols * n_rows; }
};

// Grid covering the positions' bounding box expanded by one cell per side.
BinGrid build_bin_grid(const PointSet& ps, double cell_size);

// All indices i with |q - position[i]| <= radius (closed ball), ascending.
std::vector<int> query_radius(const BinGrid& grid, const PointSet& ps, Vec2 q,
                              double radius);
void query_radius(const BinGrid& grid, const PointSet& ps, Vec2 q,
                  double radius, std::vector<int>& out);

// Argmin of distance to q over all points; ties break to the smallest
// index. Expanding ring search over cells, pruned by ring distance.
int nearest_point(const BinGrid& grid, const PointSet& ps, Vec2 q);

}  // namespace gmi
