#include "wavehf/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavehf {

Grid Grid::build(int dimension, int points_per_axis, double half_extent) {
    if (dimension < 1 || dimension > 3) {
        throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dimension));
    }
    if (points_per_axis < 8) {
        throw std::invalid_argument("grid needs at least 8 points per axis, got " +
                                    std::to_string(points_per_axis));
    }
    if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
        throw std::invalid_argument("grid half extent must be positive and finite");
    }
    return Grid(dimension, points_per_axis, half_extent);
}

Grid::Grid(int dimension, int points_per_axis, double half_extent)
    : dimension_(dimension),
      points_per_axis_(points_per_axis),
      half_extent_(half_extent),
      spacing_(2.0 * half_extent / points_per_axis),
      cell_volume_(std::pow(spacing_, dimension)),
      size_(1) {
    for (int k = 0; k < dimension; ++k) {
        size_ *= points_per_axis;
    }
}

std::array<int, 3> Grid::multi_index(Eigen::Index flat) const noexcept {
    std::array<int, 3> idx{0, 0, 0};
    for (int axis = dimension_ - 1; axis >= 0; --axis) {
        idx[axis] = static_cast<int>(flat % points_per_axis_);
        flat /= points_per_axis_;
    }
    return idx;
}

Eigen::Index Grid::flat_index(const std::array<int, 3>& multi) const noexcept {
    Eigen::Index flat = 0;
    for (int axis = 0; axis < dimension_; ++axis) {
        flat = flat * points_per_axis_ + multi[axis];
    }
    return flat;
}

std::array<double, 3> Grid::point(Eigen::Index flat) const noexcept {
    const auto idx = multi_index(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int axis = 0; axis < dimension_; ++axis) {
        x[axis] = axis_coordinate(idx[axis]);
    }
    return x;
}

}  // namespace wavehf
