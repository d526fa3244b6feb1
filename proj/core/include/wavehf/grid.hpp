#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace wavehf {

/// Uniform cell-centred grid on the box [-L, L]^d.
///
/// Points are flattened with axis 0 slowest: flat = (i0 * n + i1) * n + i2.
/// Every quadrature weight equals cell_volume() = h^d.
class Grid {
public:
    /// Throws std::invalid_argument unless d in {1,2,3}, n >= 8 and L > 0.
    static Grid build(int dimension, int points_per_axis, double half_extent);

    int dimension() const noexcept { return dimension_; }
    int points_per_axis() const noexcept { return points_per_axis_; }
    double half_extent() const noexcept { return half_extent_; }
    double spacing() const noexcept { return spacing_; }
    double cell_volume() const noexcept { return cell_volume_; }

    /// Ng = n^d.
    Eigen::Index size() const noexcept { return size_; }

    /// Cell-centre coordinate of index k along any axis.
    double axis_coordinate(int k) const noexcept { return -half_extent_ + (k + 0.5) * spacing_; }

    /// Per-axis indices of a flat point (unused axes are zero).
    std::array<int, 3> multi_index(Eigen::Index flat) const noexcept;
    Eigen::Index flat_index(const std::array<int, 3>& multi) const noexcept;

    /// Coordinates of a flat point (unused axes are zero).
    std::array<double, 3> point(Eigen::Index flat) const noexcept;

    bool operator==(const Grid& other) const noexcept {
        return dimension_ == other.dimension_ && points_per_axis_ == other.points_per_axis_ &&
               half_extent_ == other.half_extent_;
    }

private:
    Grid(int dimension, int points_per_axis, double half_extent);

    int dimension_;
    int points_per_axis_;
    double half_extent_;
    double spacing_;
    double cell_volume_;
    Eigen::Index size_;
};

}  // namespace wavehf
