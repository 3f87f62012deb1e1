// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_FISTA_HPP
#define EMLOC_FISTA_HPP

#include <stdexcept>
#include <vector>

#include "emloc/fidelity.hpp"

namespace emloc
{

enum class Momentum
{
  beck_teboulle, // y_{k+1} = x_k + ((s_k - 1) / s_{k+1}) (x_k - x_{k-1})
  paper          // y_{k+1} = x_k + (s_{k-1} / s_{k+1}) (x_k - x_{k-1}), s_0 := 1
};

enum class Sparsity
{
  componentwise, // lambda * sum over all scalar components |J_c| h^3
  group          // lambda * sum over voxels |J(x)|_2 h^3
};

struct FistaConfig
{
  double lambda = 0.0;
  double gamma0 = 1.0;
  double eta = 2.0;
  std::size_t max_iters = 500;
  double rel_tol = 1e-6;
  Momentum momentum = Momentum::beck_teboulle;
  Sparsity sparsity = Sparsity::componentwise;

  void validate() const;
};

struct FistaRecord
{
  std::size_t k = 0;
  double objective = 0.0;   // L(x_k) = M + R
  double fidelity = 0.0;    // M(x_k)
  double regularizer = 0.0; // R(x_k)
  double gamma = 0.0;       // accepted majorizer constant gamma_k
  double s = 1.0;           // momentum scalar s_k
  std::size_t backtracks = 0;
  double rel_change = 0.0; // |x_k - x_{k-1}| / |x_k|
  double majorizer = 0.0;  // P_{gamma_k}(x_k, y_k)
};

struct FistaTrace
{
  std::vector<FistaRecord> records;
};

struct FistaResult
{
  RealField solution;
  FistaTrace trace;
  bool converged = false; // stopped on rel_tol rather than max_iters
};

class DivergenceError : public std::runtime_error
{
public:
  DivergenceError(const std::string &what, FistaTrace trace) : std::runtime_error(what), trace_(std::move(trace)) {}
  const FistaTrace &trace() const { return trace_; }

private:
  FistaTrace trace_;
};

// Soft thresholding. Componentwise: sign(v) max(|v| - t, 0) on every scalar.
// Group: each voxel vector scaled by max(1 - t / |v|, 0).
RealField prox_l1(const RealField &field, double threshold, Sparsity sparsity = Sparsity::componentwise);

double regularizer(const RealField &field, double lambda, Sparsity sparsity = Sparsity::componentwise);
double objective(const FidelityProblem &problem, const RealField &field, double lambda,
                 Sparsity sparsity = Sparsity::componentwise);

// P_gamma(x, y) = M(y) + <x - y, grad M(y)> + gamma/2 |x - y|^2 + R(x).
double majorizer(const FidelityProblem &problem, double lambda, double gamma, const RealField &x,
                 const RealField &y, Sparsity sparsity = Sparsity::componentwise);

// argmin_x P_gamma(x, y) = prox_l1(y - grad M(y) / gamma, lambda / gamma).
RealField prox_step(const FidelityProblem &problem, double lambda, double gamma, const RealField &y,
                    Sparsity sparsity = Sparsity::componentwise);

// Accelerated proximal gradient with backtracking on the majorizer constant.
FistaResult fista_backtracking(const FidelityProblem &problem, const FistaConfig &config, const RealField &x0);

// Same proximal step and backtracking without momentum.
FistaResult ista_baseline(const FidelityProblem &problem, const FistaConfig &config, const RealField &x0);

} // namespace emloc

#endif // EMLOC_FISTA_HPP
