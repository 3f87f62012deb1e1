// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_FIDELITY_HPP
#define EMLOC_FIDELITY_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "emloc/geometry.hpp"
#include "emloc/imaging.hpp"

namespace emloc
{

enum class KernelPath
{
  direct, // explicit double sum over voxel pairs
  fft     // zero-padded convolution theorem
};

// Least-squares misfit between per-frequency target images and the model
//   (A_n J)(x) = (eps0 / 2 pi) sum_y Re G(x - y, omega_n) J(y) h^3,
//   M(J) = 1/(2N) sum_n || A_n J - target_n ||^2,
// with grid-integrated (voxel-volume weighted) norms. Each A_n is
// self-adjoint in that inner product, so grad M = 1/N sum_n A_n (A_n J - t_n).
class FidelityProblem
{
public:
  FidelityProblem(VoxelGrid grid, FrequencySet freqs, Medium medium, std::vector<RealField> targets,
                  KernelPath path = KernelPath::direct);
  ~FidelityProblem();
  FidelityProblem(FidelityProblem &&) noexcept;
  FidelityProblem &operator=(FidelityProblem &&) noexcept;

  const VoxelGrid &grid() const { return grid_; }
  const FrequencySet &freqs() const { return freqs_; }
  const Medium &medium() const { return medium_; }
  std::size_t size() const { return freqs_.size(); }
  const RealField &target(std::size_t n) const { return targets_[n]; }
  const std::vector<RealField> &targets() const { return targets_; }
  KernelPath path() const { return path_; }

  RealField apply(std::size_t n, const RealField &field) const;
  double fidelity(const RealField &field) const;
  RealField gradient(const RealField &field) const;
  // Both at once; shares the forward applications.
  double fidelity_and_gradient(const RealField &field, RealField &grad) const;

  // Largest eigenvalue of 1/N sum_n A_n^2 (Lipschitz constant of grad M),
  // by power iteration from a seeded random start.
  double lipschitz_estimate(std::size_t iterations = 100, std::uint64_t seed = 7) const;

private:
  void require_grid(const RealField &field, const char *who) const;
  RealField apply_direct(std::size_t n, const RealField &field) const;

  class FftEngine;

  VoxelGrid grid_;
  FrequencySet freqs_;
  Medium medium_;
  std::vector<RealField> targets_;
  KernelPath path_;
  // Per frequency: 6 symmetric kernel entries (xx, xy, xz, yy, yz, zz) on
  // the offset lattice [-(n_a - 1), n_a - 1] per axis.
  std::vector<std::vector<std::array<double, 6>>> tables_;
  std::unique_ptr<FftEngine> fft_;
};

// Signed real parts of the per-frequency images, s * Re I_n, where s is the
// coincidence sign: the phase-conjugation image approximates s A_n J.
std::vector<RealField> fidelity_targets(const ImageStack &stack);

enum class InitialGuess
{
  zero,
  mean_image // mean over n of the fidelity targets
};

RealField initial_guess(const FidelityProblem &problem, InitialGuess kind);

} // namespace emloc

#endif // EMLOC_FIDELITY_HPP
