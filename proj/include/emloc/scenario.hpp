// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_SCENARIO_HPP
#define EMLOC_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emloc/fidelity.hpp"
#include "emloc/fista.hpp"
#include "emloc/geometry.hpp"

namespace emloc
{

struct SourceSpec
{
  enum class Kind
  {
    ball,
    blob,
    dipole
  };
  Kind kind = Kind::ball;
  RVec3 center{};
  double radius = 0.0; // unused for dipoles
  RVec3 moment{};
  BlobPattern pattern = BlobPattern::uniform;
};

struct GridSpec
{
  RVec3 origin{};
  double spacing = 1.0;
  Index3 dims{1, 1, 1};
};

struct SurfaceSpec
{
  RVec3 center{};
  double radius = 1.0;
  std::size_t n_points = 4;
};

struct FrequencySpec
{
  std::vector<double> omegas; // explicit list, or empty when a band is given
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  std::size_t count = 0;
};

struct NoiseSpec
{
  double level = 0.0;
  std::uint64_t seed = 0;
};

struct InversionSpec
{
  FistaConfig fista;
  InitialGuess initial_guess = InitialGuess::zero;
  KernelPath kernel = KernelPath::direct;
};

struct ImagingSpec
{
  bool broadband = false;
  int slice_axis = 2;  // 0 = x, 1 = y, 2 = z
  long slice_index = -1; // -1 = middle
};

// Everything needed to run forward -> image -> invert -> validate.
struct Scenario
{
  double epsilon0 = 1.0;
  double mu0 = 1.0;
  GridSpec grid;
  std::size_t forward_refinement = 1; // data are simulated on grid.refined(k)
  SurfaceSpec surface;
  std::vector<SourceSpec> sources;
  FrequencySpec frequencies;
  NoiseSpec noise;
  InversionSpec inversion;
  ImagingSpec imaging;
  std::string output_dir = "out";

  Medium medium() const { return Medium(epsilon0, mu0); }
  VoxelGrid voxel_grid() const { return VoxelGrid(grid.origin, grid.spacing, grid.dims); }
  VoxelGrid forward_grid() const { return voxel_grid().refined(forward_refinement); }
  SurfaceMesh mesh() const { return make_sphere_mesh(surface.center, surface.radius, surface.n_points); }
  FrequencySet freqs() const;
  // Sum of all sources rasterized on `grid`.
  RealField source_on(const VoxelGrid &grid) const;

  // Checks source inside grid, grid inside the surface, N >= 1.
  void validate() const;
};

// Sub-seeds derived from the scenario seed by fixed offsets.
inline std::uint64_t noise_seed(const Scenario &s) { return s.noise.seed; }
inline std::uint64_t lipschitz_seed(const Scenario &s) { return s.noise.seed + 1; }

Scenario scenario_from_json(const nlohmann::json &j);
nlohmann::json scenario_to_json(const Scenario &s);
// Parses and validates.
Scenario load_scenario(const std::filesystem::path &path);

} // namespace emloc

#endif // EMLOC_SCENARIO_HPP
