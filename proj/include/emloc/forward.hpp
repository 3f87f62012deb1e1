// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_FORWARD_HPP
#define EMLOC_FORWARD_HPP

#include <cstdint>
#include <vector>

#include "emloc/geometry.hpp"

namespace emloc
{

// Complex electric field samples on a measurement surface, one 3-vector per
// (mesh point, frequency). Storage is point-major: value(i, n) lives at
// i * N + n.
class BoundaryData
{
public:
  BoundaryData(SurfaceMesh mesh, FrequencySet freqs);
  BoundaryData(SurfaceMesh mesh, FrequencySet freqs, std::vector<CVec3> values);

  const SurfaceMesh &mesh() const { return mesh_; }
  const FrequencySet &freqs() const { return freqs_; }
  std::size_t n_points() const { return mesh_.size(); }
  std::size_t n_freqs() const { return freqs_.size(); }

  CVec3 &operator()(std::size_t point, std::size_t freq) { return values_[point * freqs_.size() + freq]; }
  const CVec3 &operator()(std::size_t point, std::size_t freq) const
  {
    return values_[point * freqs_.size() + freq];
  }
  std::vector<CVec3> &values() { return values_; }
  const std::vector<CVec3> &values() const { return values_; }

  // Root mean square of |component| over all complex scalar entries.
  double rms() const;

private:
  SurfaceMesh mesh_;
  FrequencySet freqs_;
  std::vector<CVec3> values_;
};

// E(point) = sum_v G(point - z_v, omega) J(z_v) h^3 (voxel-center rule).
// Throws GeometryError when point coincides with a nonzero source voxel.
CVec3 radiate(const RealField &source, const RVec3 &point, double omega, const Medium &medium);

// radiate() at every mesh point and frequency. Mesh points must lie outside
// the grid bounding box. Entries do not depend on `threads`.
BoundaryData simulate_boundary_data(const RealField &source, const SurfaceMesh &mesh, const FrequencySet &freqs,
                                    const Medium &medium, unsigned threads = 1);

// Adds circular complex Gaussian noise to every complex scalar entry with
// standard deviation relative_level * rms(). Level 0 returns an exact copy.
BoundaryData add_noise(const BoundaryData &data, double relative_level, std::uint64_t seed);

} // namespace emloc

#endif // EMLOC_FORWARD_HPP
