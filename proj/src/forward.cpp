// SPDX-License-Identifier: Apache-2.0

#include "emloc/forward.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "emloc/greens.hpp"
#include "emloc/parallel.hpp"
#include "kernel_sum.hpp"

namespace emloc
{

BoundaryData::BoundaryData(SurfaceMesh mesh, FrequencySet freqs)
    : mesh_(std::move(mesh)), freqs_(std::move(freqs)), values_(mesh_.size() * freqs_.size())
{
}

BoundaryData::BoundaryData(SurfaceMesh mesh, FrequencySet freqs, std::vector<CVec3> values)
    : mesh_(std::move(mesh)), freqs_(std::move(freqs)), values_(std::move(values))
{
  if (values_.size() != mesh_.size() * freqs_.size())
    throw std::invalid_argument("BoundaryData: value count must equal n_points * n_freqs");
  for (const auto &v : values_)
    for (int a = 0; a < 3; ++a)
      if (!std::isfinite(v[a].real()) || !std::isfinite(v[a].imag()))
        throw std::invalid_argument("BoundaryData: non-finite entry");
}

double BoundaryData::rms() const
{
  if (values_.empty())
    return 0.0;
  double s = 0.0;
  for (const auto &v : values_)
    s += norm2(v);
  return std::sqrt(s / (3.0 * static_cast<double>(values_.size())));
}

namespace
{

struct SourcePoint
{
  RVec3 position;
  CVec3 weighted_moment; // J(z) h^3
};

std::vector<SourcePoint> collect_support(const RealField &source)
{
  const VoxelGrid &grid = source.grid();
  const double vol = grid.voxel_volume();
  std::vector<SourcePoint> pts;
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
  {
    const RVec3 &j = source[idx];
    if (j[0] != 0.0 || j[1] != 0.0 || j[2] != 0.0)
      pts.push_back({grid.center(idx), to_complex(j * vol)});
  }
  return pts;
}

void require_separated(const RVec3 &point, const RVec3 &z, double spacing)
{
  if (norm(point - z) <= 1e-12 * spacing)
    throw GeometryError("radiate: evaluation point coincides with a source voxel center");
}

} // namespace

CVec3 radiate(const RealField &source, const RVec3 &point, double omega, const Medium &medium)
{
  const auto support = collect_support(source);
  CVec3 e{};
  if (support.empty())
    return e;
  const FrequencySet single({std::abs(omega)});
  const detail::FrequencyTable table(single, medium);
  for (const auto &sp : support)
  {
    require_separated(point, sp.position, source.grid().spacing());
    table.accumulate(point - sp.position, [&](std::size_t) { return sp.weighted_moment; }, &e);
  }
  return omega < 0.0 ? conj(e) : e;
}

BoundaryData simulate_boundary_data(const RealField &source, const SurfaceMesh &mesh, const FrequencySet &freqs,
                                    const Medium &medium, unsigned threads)
{
  const VoxelGrid &grid = source.grid();
  for (const auto &p : mesh.points())
    if (grid.box_contains(p))
      throw GeometryError("simulate_boundary_data: measurement surface intersects the source grid box");

  const auto support = collect_support(source);
  const detail::FrequencyTable table(freqs, medium);
  BoundaryData data(mesh, freqs);

  parallel_for(mesh.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
    {
      CVec3 *out = &data(i, 0);
      const RVec3 &p = mesh.points()[i];
      for (const auto &sp : support)
        table.accumulate(p - sp.position, [&](std::size_t) { return sp.weighted_moment; }, out);
    }
  });
  return data;
}

BoundaryData add_noise(const BoundaryData &data, double relative_level, std::uint64_t seed)
{
  if (!(relative_level >= 0.0))
    throw std::invalid_argument("add_noise: relative_level must be >= 0");
  BoundaryData out = data;
  if (relative_level == 0.0)
    return out;
  const double sigma = relative_level * data.rms();
  // Real and imaginary parts each carry half the variance.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
  for (auto &v : out.values())
    for (int a = 0; a < 3; ++a)
    {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v[a] += Complex(re, im);
    }
  return out;
}

} // namespace emloc
