// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_VALIDATION_HPP
#define EMLOC_VALIDATION_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "emloc/fidelity.hpp"
#include "emloc/fista.hpp"
#include "emloc/greens.hpp"
#include "emloc/scenario.hpp"

namespace emloc
{

// One tolerance-table row.
struct Check
{
  enum class Relation
  {
    less,       // value < limit
    less_equal, // value <= limit
    within,     // limit <= value <= limit_hi
    holds       // boolean property, value 1 or 0
  };
  std::string id;
  std::string description;
  double value = 0.0;
  Relation relation = Relation::less;
  double limit = 0.0;
  double limit_hi = 0.0;
  bool pass = false;

  static Check less(std::string id, std::string description, double value, double limit);
  static Check less_equal(std::string id, std::string description, double value, double limit);
  static Check within(std::string id, std::string description, double value, double lo, double hi);
  // Boolean property; value is 1 when it holds.
  static Check holds(std::string id, std::string description, bool ok);
};

struct ValidationReport
{
  int sign = 0;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();

  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Finite-difference oracles --------------------------------------------------

// |(Lap_h + kappa^2) g| / |kappa^2 g| with the 7-point Laplacian at r_vec.
double helmholtz_fd_residual(const RVec3 &r_vec, double kappa, double h);

// Relative Frobenius residual of curl curl G - kappa^2 G at r_vec, with all
// second derivatives taken by central differences of step h.
double curl_curl_fd_residual(const RVec3 &r_vec, double omega, const Medium &medium, double h);

// Largest entrywise |G(d) - G(-d)| and |G - G^T| relative to max |G|.
double reciprocity_error(const RVec3 &d, double omega, const Medium &medium);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

// Truncated band integral of the delta identity with the Gaussian window
// exp(-(3 omega / W)^2 / 2). Diagnostic companion of delta_identity_residual.
RMat3 tapered_delta_integral(const RVec3 &x, const RVec3 &y, const Medium &medium, double band_max,
                             std::size_t samples);

// Inverse-problem oracles -------------------------------------------------

RealField random_field(const VoxelGrid &grid, std::mt19937_64 &rng);

// |<A_n u, v> - <u, A_n v>| / (|A_n u| |v|).
double self_adjoint_error(const FidelityProblem &problem, std::size_t n, const RealField &u, const RealField &v);

// Central difference of M along dir against <grad M(x), dir>, relative to
// max(|<grad M, dir>|, 1e-3 |grad M| |dir|).
double gradient_fd_error(const FidelityProblem &problem, const RealField &x, const RealField &dir, double step);

// Largest relative l2 gap between FFT and direct applications on random fields.
double fft_direct_gap(const FidelityProblem &direct, const FidelityProblem &fft, std::size_t trials,
                      std::uint64_t seed);

// lambda_max = |grad M(0)|_inf: the smallest lambda for which J = 0 is a
// minimizer.
double lambda_max(const FidelityProblem &problem);

// Convergence-rate measurement on a fixed problem.
struct RateMeasurement
{
  double l_star = 0.0;            // best objective over the reference run
  double fista_slope = 0.0;       // log(L_k - L*) vs log k over [k_lo, k_hi]
  double fista_paper_slope = 0.0; // printed momentum variant
  double ista_slope = 0.0;
  double fista_at_100 = 0.0;
  double ista_at_100 = 0.0;
  bool ista_monotone = false;
  bool backtracking_holds = false; // L(x_k) <= P(x_k, y_k) on every record of every run
  bool gamma_nondecreasing = false;
  FistaTrace fista;
  FistaTrace fista_paper;
  FistaTrace ista;
};
RateMeasurement measure_rates(const FidelityProblem &problem, const FistaConfig &base, std::size_t reference_iters,
                              std::size_t k_lo, std::size_t k_hi);

// Fixed small inversion used for rate measurements: an off-centre ball on an
// 8^3 grid, data from a 2x finer grid, four frequencies, no noise.
struct RateScenario
{
  FidelityProblem problem;
  FistaConfig config;
};
RateScenario make_rate_scenario(unsigned threads = 1);

// Full self-check battery for a scenario's medium and frequency band.
struct ValidationOptions
{
  bool include_rates = true;
  unsigned threads = 1;
};
ValidationReport run_validation(const Scenario &scenario, const ValidationOptions &options);

} // namespace emloc

#endif // EMLOC_VALIDATION_HPP
