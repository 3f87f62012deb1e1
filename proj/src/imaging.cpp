// SPDX-License-Identifier: Apache-2.0

#include "emloc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "emloc/parallel.hpp"
#include "kernel_sum.hpp"

namespace emloc
{

namespace
{

void require_inside_surface(const VoxelGrid &grid, const SurfaceMesh &mesh)
{
  if (mesh.sphere())
  {
    const Sphere &s = *mesh.sphere();
    if (!(norm(grid.box_center() - s.center) + grid.circumradius() < s.radius))
      throw GeometryError("imaging: grid is not strictly inside the measurement sphere");
    return;
  }
  for (const auto &p : mesh.points())
    if (grid.box_contains(p))
      throw GeometryError("imaging: measurement surface intersects the imaging grid box");
}

void require_off_surface(const SurfaceMesh &mesh, const RVec3 &x)
{
  for (const auto &p : mesh.points())
    if (norm(p - x) < 1e-9)
      throw GeometryError("adjoint_field: evaluation point lies on a mesh point");
}

} // namespace

std::vector<double> ImageStack::magnitude_sum() const
{
  std::vector<double> sum(grid.size(), 0.0);
  for (const auto &img : per_freq)
    for (std::size_t i = 0; i < img.size(); ++i)
      sum[i] += norm(img[i]);
  return sum;
}

std::vector<std::size_t> find_peaks(const VoxelGrid &grid, const std::vector<double> &values, std::size_t max_peaks)
{
  if (values.size() != grid.size())
    throw std::invalid_argument("find_peaks: value count does not match the grid");
  const Index3 &d = grid.dims();
  std::vector<std::size_t> peaks;
  for (std::size_t idx = 0; idx < values.size(); ++idx)
  {
    const double v = values[idx];
    if (!(v > 0.0))
      continue;
    const auto [i, j, k] = grid.unravel(idx);
    bool is_max = true;
    for (long dk = -1; dk <= 1 && is_max; ++dk)
      for (long dj = -1; dj <= 1 && is_max; ++dj)
        for (long di = -1; di <= 1 && is_max; ++di)
        {
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj, kk = static_cast<long>(k) + dk;
          if ((di == 0 && dj == 0 && dk == 0) || ii < 0 || jj < 0 || kk < 0 || ii >= static_cast<long>(d[0]) ||
              jj >= static_cast<long>(d[1]) || kk >= static_cast<long>(d[2]))
            continue;
          if (values[grid.linear(ii, jj, kk)] > v)
            is_max = false;
        }
    if (is_max)
      peaks.push_back(idx);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (peaks.size() > max_peaks)
    peaks.resize(max_peaks);
  return peaks;
}

double image_scale(const Medium &medium)
{
  return medium.epsilon0() / (2.0 * std::numbers::pi * medium.c0() * medium.mu0());
}

CVec3 adjoint_field(const BoundaryData &data, std::size_t n, const RVec3 &x, const Medium &medium)
{
  if (n >= data.n_freqs())
    throw std::out_of_range("adjoint_field: frequency index out of range");
  const SurfaceMesh &mesh = data.mesh();
  require_off_surface(mesh, x);
  const FrequencySet single({data.freqs()[n]});
  const detail::FrequencyTable table(single, medium);
  CVec3 e{};
  for (std::size_t i = 0; i < mesh.size(); ++i)
  {
    const double w = mesh.weights()[i];
    table.accumulate(mesh.points()[i] - x, [&](std::size_t) { return conj(data(i, n)) * Complex(w); }, &e);
  }
  return e;
}

ComplexField phase_conj_single(const BoundaryData &data, std::size_t n, const VoxelGrid &grid, const Medium &medium,
                               unsigned threads)
{
  if (n >= data.n_freqs())
    throw std::out_of_range("phase_conj_single: frequency index out of range");
  require_inside_surface(grid, data.mesh());
  ComplexField img(grid);
  const Complex scale = image_scale(medium);
  parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v)
      img[v] = adjoint_field(data, n, grid.center(v), medium) * scale;
  });
  return img;
}

ImageStack phase_conj_stack(const BoundaryData &data, const VoxelGrid &grid, const Medium &medium, unsigned threads)
{
  require_inside_surface(grid, data.mesh());
  const SurfaceMesh &mesh = data.mesh();
  const std::size_t nf = data.n_freqs();
  const detail::FrequencyTable table(data.freqs(), medium);

  // Conjugated, weighted data, point-major like BoundaryData.
  std::vector<CVec3> moments(data.values().size());
  for (std::size_t i = 0; i < mesh.size(); ++i)
    for (std::size_t n = 0; n < nf; ++n)
      moments[i * nf + n] = conj(data(i, n)) * Complex(mesh.weights()[i]);

  ImageStack stack(grid, data.freqs());
  stack.per_freq.assign(nf, ComplexField(grid));
  const Complex scale = image_scale(medium);

  parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<CVec3> acc(nf);
    for (std::size_t v = begin; v < end; ++v)
    {
      std::fill(acc.begin(), acc.end(), CVec3{});
      const RVec3 x = grid.center(v);
      for (std::size_t i = 0; i < mesh.size(); ++i)
      {
        const CVec3 *m = &moments[i * nf];
        table.accumulate(mesh.points()[i] - x, [m](std::size_t n) { return m[n]; }, acc.data());
      }
      for (std::size_t n = 0; n < nf; ++n)
        stack.per_freq[n][v] = acc[n] * scale;
    }
  });
  return stack;
}

RealField broadband_image(const ImageStack &stack)
{
  const std::size_t nf = stack.freqs.size();
  if (nf < 2 || stack.per_freq.size() != nf)
    throw std::invalid_argument("broadband_image: need images at two or more frequencies");
  RealField out(stack.grid);
  for (std::size_t n = 0; n < nf; ++n)
  {
    double w = 0.0;
    if (n > 0)
      w += 0.5 * (stack.freqs[n] - stack.freqs[n - 1]);
    if (n + 1 < nf)
      w += 0.5 * (stack.freqs[n + 1] - stack.freqs[n]);
    const ComplexField &img = stack.per_freq[n];
    for (std::size_t v = 0; v < out.size(); ++v)
      out[v] += real(img[v]) * (2.0 * w);
  }
  return out;
}

RealField phase_conj_full(const BoundaryData &data, const VoxelGrid &grid, const Medium &medium, unsigned threads)
{
  if (data.n_freqs() < 2)
    throw std::invalid_argument("phase_conj_full: need at least two frequencies for the band quadrature");
  return broadband_image(phase_conj_stack(data, grid, medium, threads));
}

RMat3 delta_identity_residual(const RVec3 &x, const RVec3 &y, const Medium &medium, double band_max,
                              std::size_t samples)
{
  if (!(band_max > 0.0))
    throw std::invalid_argument("delta_identity_residual: band_max must be positive");
  if (samples < 8)
    throw std::invalid_argument("delta_identity_residual: need at least 8 intervals");
  const double h = band_max / static_cast<double>(samples);
  RMat3 sum;
  for (std::size_t m = 1; m <= samples; ++m)
  {
    const double w = (m == samples ? 0.5 : 1.0) * h;
    sum += re_green_ee(x - y, h * static_cast<double>(m), medium) * w;
  }
  return sum * (2.0 * medium.epsilon0() / (2.0 * std::numbers::pi));
}

} // namespace emloc
