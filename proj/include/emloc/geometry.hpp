// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_GEOMETRY_HPP
#define EMLOC_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "emloc/vec3.hpp"

namespace emloc
{

// Raised when two geometric objects overlap where they must be separated
// (measurement surface vs. source grid, evaluation point vs. source voxel).
class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Homogeneous non-attenuating background. Defaults are normalized units
// (epsilon0 = mu0 = c0 = 1).
class Medium
{
public:
  Medium() = default;
  Medium(double epsilon0, double mu0);

  double epsilon0() const { return eps0_; }
  double mu0() const { return mu0_; }
  double c0() const { return c0_; }
  double kappa(double omega) const { return omega / c0_; }
  double omega(double kappa) const { return kappa * c0_; }
  double wavelength(double omega) const;

private:
  double eps0_ = 1.0;
  double mu0_ = 1.0;
  double c0_ = 1.0;
};

// Ordered set of strictly positive angular frequencies.
class FrequencySet
{
public:
  explicit FrequencySet(std::vector<double> omegas);

  // N frequencies whose wave numbers are evenly spaced on [kappa_min, kappa_max].
  static FrequencySet band(const Medium &medium, double kappa_min, double kappa_max, std::size_t count);

  std::size_t size() const { return omegas_.size(); }
  double operator[](std::size_t n) const { return omegas_[n]; }
  const std::vector<double> &omegas() const { return omegas_; }

  // Constant spacing within a relative tolerance (enables phase recurrences).
  bool uniformly_spaced(double rel_tol = 1e-12) const;

private:
  std::vector<double> omegas_;
};

using Index3 = std::array<std::size_t, 3>;

// Uniform voxelization of a box. `origin` is the lower corner of the box;
// voxel (i, j, k) has center origin + spacing * (i + 1/2, j + 1/2, k + 1/2).
// Linear index is i + nx * (j + ny * k): x fastest, z slowest.
class VoxelGrid
{
public:
  VoxelGrid(RVec3 origin, double spacing, Index3 dims);

  const RVec3 &origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const Index3 &dims() const { return dims_; }
  std::size_t size() const { return dims_[0] * dims_[1] * dims_[2]; }
  double voxel_volume() const { return spacing_ * spacing_ * spacing_; }

  std::size_t linear(std::size_t i, std::size_t j, std::size_t k) const
  {
    return i + dims_[0] * (j + dims_[1] * k);
  }
  Index3 unravel(std::size_t idx) const
  {
    return {idx % dims_[0], (idx / dims_[0]) % dims_[1], idx / (dims_[0] * dims_[1])};
  }
  RVec3 center(std::size_t i, std::size_t j, std::size_t k) const
  {
    return {origin_[0] + spacing_ * (static_cast<double>(i) + 0.5),
            origin_[1] + spacing_ * (static_cast<double>(j) + 0.5),
            origin_[2] + spacing_ * (static_cast<double>(k) + 0.5)};
  }
  RVec3 center(std::size_t idx) const
  {
    const auto [i, j, k] = unravel(idx);
    return center(i, j, k);
  }

  RVec3 box_min() const { return origin_; }
  RVec3 box_max() const;
  RVec3 box_center() const;
  // Radius of the smallest ball around box_center() containing the box.
  double circumradius() const;
  bool box_contains(const RVec3 &p) const;

  // Same box, spacing divided by `factor`.
  VoxelGrid refined(std::size_t factor) const;

  friend bool operator==(const VoxelGrid &, const VoxelGrid &) = default;

private:
  RVec3 origin_;
  double spacing_;
  Index3 dims_;
};

// One 3-vector per voxel of a grid.
template <typename T>
class VectorField
{
public:
  using value_type = Vec3<T>;

  explicit VectorField(VoxelGrid grid) : grid_(std::move(grid)), values_(grid_.size()) {}
  VectorField(VoxelGrid grid, std::vector<value_type> values);

  const VoxelGrid &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  value_type &operator[](std::size_t i) { return values_[i]; }
  const value_type &operator[](std::size_t i) const { return values_[i]; }
  std::vector<value_type> &values() { return values_; }
  const std::vector<value_type> &values() const { return values_; }

  VectorField &operator+=(const VectorField &o);
  VectorField &operator-=(const VectorField &o);
  VectorField &operator*=(T a);

  friend VectorField operator+(VectorField a, const VectorField &b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField &b) { return a -= b; }
  friend VectorField operator*(VectorField a, T s) { return a *= s; }
  friend VectorField operator*(T s, VectorField a) { return a *= s; }

private:
  void require_same_grid(const VectorField &o) const;

  VoxelGrid grid_;
  std::vector<value_type> values_;
};

using RealField = VectorField<double>;
using ComplexField = VectorField<Complex>;

// Voxel-volume weighted inner product and norm (grid integrals).
double inner(const RealField &a, const RealField &b);
double l2_norm(const RealField &a);
double l2_norm(const ComplexField &a);
// Grid integral of the field.
RVec3 integral(const RealField &a);
// Number of voxels with a nonzero vector.
std::size_t count_nonzero_voxels(const RealField &a);
// Number of nonzero scalar components.
std::size_t count_nonzero_components(const RealField &a);
RealField real_part(const ComplexField &a);
RealField imag_part(const ComplexField &a);
std::vector<double> magnitude(const ComplexField &a);
std::vector<double> magnitude(const RealField &a);

struct Sphere
{
  RVec3 center;
  double radius;
};

// Quadrature discretization of a closed measurement surface.
class SurfaceMesh
{
public:
  SurfaceMesh(std::vector<RVec3> points, std::vector<double> weights, std::vector<RVec3> normals,
              std::optional<Sphere> sphere = std::nullopt);

  std::size_t size() const { return points_.size(); }
  const std::vector<RVec3> &points() const { return points_; }
  const std::vector<double> &weights() const { return weights_; }
  const std::vector<RVec3> &normals() const { return normals_; }
  // Set when the mesh discretizes a sphere.
  const std::optional<Sphere> &sphere() const { return sphere_; }
  double total_weight() const;

private:
  std::vector<RVec3> points_;
  std::vector<double> weights_;
  std::vector<RVec3> normals_;
  std::optional<Sphere> sphere_;
};

// Equal-weight Fibonacci spiral quadrature on a sphere. For even n the lower
// hemisphere is the point reflection of the upper one, so odd moments vanish
// to rounding.
SurfaceMesh make_sphere_mesh(const RVec3 &center, double radius, std::size_t n_points);

// Constant `moment` on voxels whose center lies inside the ball.
RealField make_ball_source(const VoxelGrid &grid, const RVec3 &center, double radius, const RVec3 &moment);

enum class BlobPattern
{
  uniform, // moment * bump(|x - c| / r)
  swirl    // (axis x (x - c)) / r * bump(|x - c| / r); divergence free
};

// Smooth compactly supported source with a cos^2 radial profile.
RealField make_blob_source(const VoxelGrid &grid, const RVec3 &center, double radius, const RVec3 &moment,
                           BlobPattern pattern);

// Point dipole rasterized to the voxel containing `position` (value moment / h^3).
RealField make_point_source(const VoxelGrid &grid, const RVec3 &position, const RVec3 &moment);

} // namespace emloc

#endif // EMLOC_GEOMETRY_HPP
