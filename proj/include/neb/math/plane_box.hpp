#pragma once

// Closed-form area and volume of an axis-aligned box cut by a plane.
//
// The volume below the plane <n, y> = h inside the box B is a signed sum of
// corner simplices,
//
//     V(B, h) = 1 / (d! prod n_i) * sum_i eps_i * max(0, h - <n, b_i>)^d,
//
// where eps_i = (-1)^(number of max-coordinates of corner b_i). The cut area
// is dV/dh. Normals with vanishing components degenerate to the lower
// dimensional version of the same formula times the box extent along the
// dropped axes.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace neb {

// Normal classification thresholds of the reference octree implementation.
inline constexpr double kAxisAlignedTolerance = 1e-3;
inline constexpr double kZeroComponentTolerance = 1e-4;

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> box_corner(const Eigen::AlignedBox<Scalar, 3>& box, int mask) {
  return {(mask & 1) ? box.max().x() : box.min().x(),
          (mask & 2) ? box.max().y() : box.min().y(),
          (mask & 4) ? box.max().z() : box.min().z()};
}

inline constexpr int corner_parity(int mask) {
  return (std::popcount(static_cast<unsigned>(mask)) & 1) ? -1 : 1;
}

}  // namespace detail

/// Area of the intersection between `box` and the plane through `point` with
/// unit normal `normal`. Returns 0 if the plane misses the box.
template <typename Scalar>
Scalar plane_box_area(const Eigen::AlignedBox<Scalar, 3>& box,
                      const Eigen::Matrix<Scalar, 3, 1>& point,
                      const Eigen::Matrix<Scalar, 3, 1>& normal) {
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  const Vec size = box.sizes();
  const Vec abs_n = normal.cwiseAbs();
  const Scalar zero(0);

  // One non-zero component: the slice is a face-parallel rectangle.
  for (int d = 0; d < 3; ++d) {
    if (std::abs(abs_n[d] - Scalar(1)) < Scalar(kAxisAlignedTolerance)) {
      if (point[d] < box.min()[d] || point[d] > box.max()[d]) return zero;
      return size[(d + 1) % 3] * size[(d + 2) % 3];
    }
  }

  // One vanishing component: 2D polygon area times the extent along it.
  for (int d = 0; d < 3; ++d) {
    if (abs_n[d] < Scalar(kZeroComponentTolerance)) {
      const int x = (d + 1) % 3;
      const int y = (d + 2) % 3;
      const Scalar t = normal[x] * point[x] + normal[y] * point[y];
      const auto offset = [&](Scalar bx, Scalar by) {
        return std::max(zero, t - (normal[x] * bx + normal[y] * by));
      };
      Scalar sum = offset(box.min()[x], box.min()[y]);
      sum -= offset(box.min()[x], box.max()[y]);
      sum -= offset(box.max()[x], box.min()[y]);
      sum += offset(box.max()[x], box.max()[y]);
      return size[d] * std::abs(sum / (normal[x] * normal[y]));
    }
  }

  const Scalar t = normal.dot(point);
  Scalar sum = zero;
  for (int mask = 0; mask < 8; ++mask) {
    const Scalar h = std::max(zero, t - normal.dot(detail::box_corner(box, mask)));
    sum += Scalar(detail::corner_parity(mask)) * h * h;
  }
  return std::abs(sum / (Scalar(2) * normal[0] * normal[1] * normal[2]));
}

/// Volume of the part of `box` below the plane <normal, y> = plane_offset.
/// Only the generic case is supported: every normal component must be
/// non-zero.
template <typename Scalar>
Scalar plane_box_volume(const Eigen::AlignedBox<Scalar, 3>& box, Scalar plane_offset,
                        const Eigen::Matrix<Scalar, 3, 1>& normal) {
  if ((normal.array() == Scalar(0)).any()) {
    throw std::invalid_argument("plane_box_volume: normal must have no zero component");
  }
  const Scalar zero(0);
  Scalar sum = zero;
  for (int mask = 0; mask < 8; ++mask) {
    const Scalar h = std::max(zero, plane_offset - normal.dot(detail::box_corner(box, mask)));
    sum += Scalar(detail::corner_parity(mask)) * h * h * h;
  }
  return sum / (Scalar(6) * normal.prod());
}

/// Normalized constant kernel over a disc of radius `r`.
template <typename Scalar>
Scalar uniform_kernel(Scalar r) {
  return Scalar(1) / (std::numbers::pi_v<Scalar> * r * r);
}

}  // namespace neb
