// SPDX-License-Identifier: Apache-2.0

#include "emloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace emloc
{

Medium::Medium(double epsilon0, double mu0) : eps0_(epsilon0), mu0_(mu0)
{
  if (!(epsilon0 > 0.0) || !(mu0 > 0.0) || !std::isfinite(epsilon0) || !std::isfinite(mu0))
    throw std::invalid_argument("Medium: epsilon0 and mu0 must be positive and finite");
  c0_ = 1.0 / std::sqrt(eps0_ * mu0_);
}

double Medium::wavelength(double omega) const
{
  return 2.0 * std::numbers::pi / std::abs(kappa(omega));
}

FrequencySet::FrequencySet(std::vector<double> omegas) : omegas_(std::move(omegas))
{
  if (omegas_.empty())
    throw std::invalid_argument("FrequencySet: at least one frequency is required");
  for (std::size_t n = 0; n < omegas_.size(); ++n)
  {
    if (!(omegas_[n] > 0.0) || !std::isfinite(omegas_[n]))
      throw std::invalid_argument("FrequencySet: frequencies must be strictly positive and finite");
    if (n > 0 && omegas_[n] < omegas_[n - 1])
      throw std::invalid_argument("FrequencySet: frequencies must be non-decreasing");
  }
}

FrequencySet FrequencySet::band(const Medium &medium, double kappa_min, double kappa_max, std::size_t count)
{
  if (count == 0)
    throw std::invalid_argument("FrequencySet::band: count must be >= 1");
  if (!(kappa_min > 0.0) || kappa_max < kappa_min)
    throw std::invalid_argument("FrequencySet::band: need 0 < kappa_min <= kappa_max");
  std::vector<double> omegas(count);
  for (std::size_t n = 0; n < count; ++n)
  {
    const double t = count == 1 ? 0.0 : static_cast<double>(n) / static_cast<double>(count - 1);
    omegas[n] = medium.omega(kappa_min + t * (kappa_max - kappa_min));
  }
  return FrequencySet(std::move(omegas));
}

bool FrequencySet::uniformly_spaced(double rel_tol) const
{
  if (omegas_.size() < 3)
    return omegas_.size() == 2 ? omegas_[1] > omegas_[0] : false;
  const double step = (omegas_.back() - omegas_.front()) / static_cast<double>(omegas_.size() - 1);
  if (!(step > 0.0))
    return false;
  for (std::size_t n = 1; n < omegas_.size(); ++n)
    if (std::abs(omegas_[n] - omegas_[n - 1] - step) > rel_tol * omegas_.back())
      return false;
  return true;
}

VoxelGrid::VoxelGrid(RVec3 origin, double spacing, Index3 dims) : origin_(origin), spacing_(spacing), dims_(dims)
{
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("VoxelGrid: spacing must be positive");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw std::invalid_argument("VoxelGrid: all dimensions must be >= 1");
}

RVec3 VoxelGrid::box_max() const
{
  return {origin_[0] + spacing_ * static_cast<double>(dims_[0]),
          origin_[1] + spacing_ * static_cast<double>(dims_[1]),
          origin_[2] + spacing_ * static_cast<double>(dims_[2])};
}

RVec3 VoxelGrid::box_center() const { return (box_min() + box_max()) * 0.5; }

double VoxelGrid::circumradius() const { return 0.5 * norm(box_max() - box_min()); }

bool VoxelGrid::box_contains(const RVec3 &p) const
{
  const RVec3 hi = box_max();
  for (int a = 0; a < 3; ++a)
    if (p[a] < origin_[a] || p[a] > hi[a])
      return false;
  return true;
}

VoxelGrid VoxelGrid::refined(std::size_t factor) const
{
  if (factor < 1)
    throw std::invalid_argument("VoxelGrid::refined: factor must be >= 1");
  return VoxelGrid(origin_, spacing_ / static_cast<double>(factor),
                   {dims_[0] * factor, dims_[1] * factor, dims_[2] * factor});
}

template <typename T>
VectorField<T>::VectorField(VoxelGrid grid, std::vector<value_type> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
  if (values_.size() != grid_.size())
    throw std::invalid_argument("VectorField: value count does not match grid size");
}

template <typename T>
void VectorField<T>::require_same_grid(const VectorField &o) const
{
  if (!(grid_ == o.grid_))
    throw std::invalid_argument("VectorField: grid mismatch");
}

template <typename T>
VectorField<T> &VectorField<T>::operator+=(const VectorField &o)
{
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += o.values_[i];
  return *this;
}

template <typename T>
VectorField<T> &VectorField<T>::operator-=(const VectorField &o)
{
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] -= o.values_[i];
  return *this;
}

template <typename T>
VectorField<T> &VectorField<T>::operator*=(T a)
{
  for (auto &v : values_)
    v *= a;
  return *this;
}

template class VectorField<double>;
template class VectorField<Complex>;

double inner(const RealField &a, const RealField &b)
{
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("inner: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += dot(a[i], b[i]);
  return s * a.grid().voxel_volume();
}

double l2_norm(const RealField &a) { return std::sqrt(inner(a, a)); }

double l2_norm(const ComplexField &a)
{
  double s = 0.0;
  for (const auto &v : a.values())
    s += norm2(v);
  return std::sqrt(s * a.grid().voxel_volume());
}

RVec3 integral(const RealField &a)
{
  RVec3 s{};
  for (const auto &v : a.values())
    s += v;
  return s * a.grid().voxel_volume();
}

std::size_t count_nonzero_voxels(const RealField &a)
{
  return static_cast<std::size_t>(std::count_if(a.values().begin(), a.values().end(), [](const RVec3 &v) {
    return v[0] != 0.0 || v[1] != 0.0 || v[2] != 0.0;
  }));
}

std::size_t count_nonzero_components(const RealField &a)
{
  std::size_t n = 0;
  for (const auto &v : a.values())
    n += (v[0] != 0.0) + (v[1] != 0.0) + (v[2] != 0.0);
  return n;
}

RealField real_part(const ComplexField &a)
{
  RealField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = real(a[i]);
  return out;
}

RealField imag_part(const ComplexField &a)
{
  RealField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = imag(a[i]);
  return out;
}

std::vector<double> magnitude(const ComplexField &a)
{
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    m[i] = norm(a[i]);
  return m;
}

std::vector<double> magnitude(const RealField &a)
{
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    m[i] = norm(a[i]);
  return m;
}

SurfaceMesh::SurfaceMesh(std::vector<RVec3> points, std::vector<double> weights, std::vector<RVec3> normals,
                         std::optional<Sphere> sphere)
    : points_(std::move(points)), weights_(std::move(weights)), normals_(std::move(normals)), sphere_(sphere)
{
  if (points_.empty())
    throw std::invalid_argument("SurfaceMesh: no points");
  if (weights_.size() != points_.size() || normals_.size() != points_.size())
    throw std::invalid_argument("SurfaceMesh: points, weights and normals must have equal length");
  for (std::size_t i = 0; i < points_.size(); ++i)
  {
    if (!(weights_[i] > 0.0))
      throw std::invalid_argument("SurfaceMesh: weights must be positive");
    if (std::abs(norm(normals_[i]) - 1.0) > 1e-12)
      throw std::invalid_argument("SurfaceMesh: normals must have unit length");
  }
}

double SurfaceMesh::total_weight() const
{
  // Neumaier compensated sum.
  double s = 0.0, c = 0.0;
  for (double w : weights_)
  {
    const double t = s + w;
    c += std::abs(s) >= std::abs(w) ? (s - t) + w : (w - t) + s;
    s = t;
  }
  return s + c;
}

SurfaceMesh make_sphere_mesh(const RVec3 &center, double radius, std::size_t n_points)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("make_sphere_mesh: radius must be positive");
  if (n_points < 4)
    throw std::invalid_argument("make_sphere_mesh: need at least 4 points");

  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double n = static_cast<double>(n_points);
  const bool antipodal = n_points % 2 == 0;
  const std::size_t n_spiral = antipodal ? n_points / 2 : n_points;

  std::vector<RVec3> dirs;
  dirs.reserve(n_points);
  for (std::size_t i = 0; i < n_spiral; ++i)
  {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    RVec3 u{rho * std::cos(phi), rho * std::sin(phi), z};
    u *= 1.0 / norm(u);
    dirs.push_back(u);
  }
  if (antipodal)
    for (std::size_t i = 0; i < n_spiral; ++i)
      dirs.push_back(-dirs[i]);

  const double w = 4.0 * std::numbers::pi * radius * radius / n;
  std::vector<RVec3> points(n_points);
  std::vector<double> weights(n_points, w);
  for (std::size_t i = 0; i < n_points; ++i)
    points[i] = center + dirs[i] * radius;
  return SurfaceMesh(std::move(points), std::move(weights), std::move(dirs), Sphere{center, radius});
}

namespace
{

void require_ball_inside(const VoxelGrid &grid, const RVec3 &center, double radius, const char *who)
{
  if (!(radius > 0.0))
    throw std::invalid_argument(std::string(who) + ": radius must be positive");
  const RVec3 lo = grid.box_min();
  const RVec3 hi = grid.box_max();
  for (int a = 0; a < 3; ++a)
    if (center[a] - radius < lo[a] || center[a] + radius > hi[a])
      throw GeometryError(std::string(who) + ": ball is not inside the grid bounding box");
}

void require_nonempty(const RealField &f, const char *who)
{
  if (count_nonzero_voxels(f) == 0)
  {
    std::ostringstream msg;
    msg << who << ": no voxel center falls inside the support; increase the radius (grid spacing "
        << f.grid().spacing() << ")";
    throw std::invalid_argument(msg.str());
  }
}

} // namespace

RealField make_ball_source(const VoxelGrid &grid, const RVec3 &center, double radius, const RVec3 &moment)
{
  require_ball_inside(grid, center, radius, "make_ball_source");
  RealField f(grid);
  const double r2 = radius * radius;
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    if (norm2(grid.center(idx) - center) < r2)
      f[idx] = moment;
  require_nonempty(f, "make_ball_source");
  return f;
}

RealField make_blob_source(const VoxelGrid &grid, const RVec3 &center, double radius, const RVec3 &moment,
                           BlobPattern pattern)
{
  require_ball_inside(grid, center, radius, "make_blob_source");
  RealField f(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
  {
    const RVec3 d = grid.center(idx) - center;
    const double t = norm(d) / radius;
    if (t >= 1.0)
      continue;
    const double c = std::cos(0.5 * std::numbers::pi * t);
    const double bump = c * c;
    if (pattern == BlobPattern::uniform)
    {
      f[idx] = moment * bump;
    }
    else
    {
      const RVec3 swirl{moment[1] * d[2] - moment[2] * d[1], moment[2] * d[0] - moment[0] * d[2],
                        moment[0] * d[1] - moment[1] * d[0]};
      f[idx] = swirl * (bump / radius);
    }
  }
  require_nonempty(f, "make_blob_source");
  return f;
}

RealField make_point_source(const VoxelGrid &grid, const RVec3 &position, const RVec3 &moment)
{
  if (!grid.box_contains(position))
    throw GeometryError("make_point_source: position outside the grid bounding box");
  Index3 ijk{};
  for (int a = 0; a < 3; ++a)
  {
    const double t = (position[a] - grid.origin()[a]) / grid.spacing();
    ijk[a] = std::min(grid.dims()[a] - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t))));
  }
  RealField f(grid);
  f[grid.linear(ijk[0], ijk[1], ijk[2])] = moment * (1.0 / grid.voxel_volume());
  return f;
}

} // namespace emloc
