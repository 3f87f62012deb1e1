// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_IMAGING_HPP
#define EMLOC_IMAGING_HPP

#include <optional>
#include <vector>

#include "emloc/forward.hpp"
#include "emloc/greens.hpp"

namespace emloc
{

// Per-frequency phase-conjugation images on one grid, plus the optional
// broadband image.
struct ImageStack
{
  VoxelGrid grid;
  FrequencySet freqs;
  std::vector<ComplexField> per_freq;
  std::optional<RealField> broadband;

  ImageStack(VoxelGrid g, FrequencySet f) : grid(std::move(g)), freqs(std::move(f)) {}

  // Voxelwise sum over frequencies of |I_n|.
  std::vector<double> magnitude_sum() const;
};

// Voxels with a positive value not exceeded by any of their (up to 26)
// neighbours, strongest first, at most max_peaks of them.
std::vector<std::size_t> find_peaks(const VoxelGrid &grid, const std::vector<double> &values, std::size_t max_peaks);

// Back-propagated field at x for frequency index n:
//   E*_n(x) = sum_xi w(xi) G(xi - x, omega_n) conj(d(xi, omega_n)).
CVec3 adjoint_field(const BoundaryData &data, std::size_t n, const RVec3 &x, const Medium &medium);

// Scale eps0 / (2 pi c0 mu0) applied to adjoint fields.
double image_scale(const Medium &medium);

// I_n on every voxel of grid. The grid must lie strictly inside the surface.
ComplexField phase_conj_single(const BoundaryData &data, std::size_t n, const VoxelGrid &grid, const Medium &medium,
                               unsigned threads = 1);

// All I_n in one sweep over (voxel, mesh point) pairs.
ImageStack phase_conj_stack(const BoundaryData &data, const VoxelGrid &grid, const Medium &medium,
                            unsigned threads = 1);

// Broadband image: trapezoid rule over the sampled positive band of
// 2 Re I(omega); the negative half of the real line enters through
// conjugation symmetry. Requires at least two frequencies.
RealField broadband_image(const ImageStack &stack);
RealField phase_conj_full(const BoundaryData &data, const VoxelGrid &grid, const Medium &medium,
                          unsigned threads = 1);

// (eps0 / 2 pi) int_{-W}^{W} Re G(x - y, omega) d omega, evaluated as twice a
// trapezoid rule with M intervals on [0, W]. The omega = 0 node uses the
// kernel's limit value, which is zero.
RMat3 delta_identity_residual(const RVec3 &x, const RVec3 &y, const Medium &medium, double band_max,
                              std::size_t samples);

} // namespace emloc

#endif // EMLOC_IMAGING_HPP
