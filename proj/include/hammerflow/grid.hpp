#pragma once

#include <cstddef>
#include <vector>

namespace hammerflow {

/// Uniform spatial grid over [0, L] with N cells and N+1 nodes.
struct SpatialGrid {
    int N = 0;
    double dl = 0.0;
    std::vector<double> nodes;

    static SpatialGrid make(double L, int N);
};

/// Dense (node x sample) array stored column-major so each s-slice is
/// contiguous.
struct GridSeries {
    int rows = 0;  ///< N+1 spatial nodes
    int cols = 0;  ///< time samples
    std::vector<double> data;

    GridSeries() = default;
    GridSeries(int rows_, int cols_) : rows(rows_), cols(cols_), data(static_cast<std::size_t>(rows_) * cols_, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(j) * rows + i]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(j) * rows + i]; }

    double* col(int j) { return data.data() + static_cast<std::size_t>(j) * rows; }
    const double* col(int j) const { return data.data() + static_cast<std::size_t>(j) * rows; }
};

} // namespace hammerflow
