// SPDX-License-Identifier: Apache-2.0

#include "emloc/fista.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace emloc
{

void FistaConfig::validate() const
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("FistaConfig: lambda must be >= 0");
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
    throw std::invalid_argument("FistaConfig: gamma0 must be > 0");
  if (!(eta > 1.0) || !std::isfinite(eta))
    throw std::invalid_argument("FistaConfig: eta must be > 1");
  if (max_iters < 1)
    throw std::invalid_argument("FistaConfig: max_iters must be >= 1");
  if (!(rel_tol >= 0.0))
    throw std::invalid_argument("FistaConfig: rel_tol must be >= 0");
}

RealField prox_l1(const RealField &field, double threshold, Sparsity sparsity)
{
  if (!(threshold >= 0.0))
    throw std::invalid_argument("prox_l1: threshold must be >= 0");
  RealField out(field.grid());
  for (std::size_t i = 0; i < field.size(); ++i)
  {
    const RVec3 &v = field[i];
    if (sparsity == Sparsity::componentwise)
    {
      for (int c = 0; c < 3; ++c)
      {
        const double a = std::abs(v[c]) - threshold;
        out[i][c] = a > 0.0 ? std::copysign(a, v[c]) : 0.0;
      }
    }
    else
    {
      const double n = norm(v);
      out[i] = n > threshold ? v * (1.0 - threshold / n) : RVec3{};
    }
  }
  return out;
}

double regularizer(const RealField &field, double lambda, Sparsity sparsity)
{
  double s = 0.0;
  for (const auto &v : field.values())
    s += sparsity == Sparsity::componentwise ? std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]) : norm(v);
  return lambda * s * field.grid().voxel_volume();
}

double objective(const FidelityProblem &problem, const RealField &field, double lambda, Sparsity sparsity)
{
  return problem.fidelity(field) + regularizer(field, lambda, sparsity);
}

namespace
{

double quadratic_model(double m_y, const RealField &grad_y, double gamma, const RealField &x, const RealField &y)
{
  const RealField d = x - y;
  return m_y + inner(d, grad_y) + 0.5 * gamma * inner(d, d);
}

} // namespace

double majorizer(const FidelityProblem &problem, double lambda, double gamma, const RealField &x, const RealField &y,
                 Sparsity sparsity)
{
  if (!(gamma > 0.0))
    throw std::invalid_argument("majorizer: gamma must be > 0");
  RealField grad(problem.grid());
  const double m_y = problem.fidelity_and_gradient(y, grad);
  return quadratic_model(m_y, grad, gamma, x, y) + regularizer(x, lambda, sparsity);
}

RealField prox_step(const FidelityProblem &problem, double lambda, double gamma, const RealField &y, Sparsity sparsity)
{
  if (!(gamma > 0.0))
    throw std::invalid_argument("prox_step: gamma must be > 0");
  const RealField grad = problem.gradient(y);
  return prox_l1(y - grad * (1.0 / gamma), lambda / gamma, sparsity);
}

namespace
{

constexpr std::size_t max_backtracks = 200;

FistaResult proximal_gradient(const FidelityProblem &problem, const FistaConfig &config, const RealField &x0,
                              bool accelerated)
{
  config.validate();
  if (!(x0.grid() == problem.grid()))
    throw std::invalid_argument("fista: initial guess grid does not match the problem grid");

  const double lambda = config.lambda;
  const Sparsity sparsity = config.sparsity;
  FistaResult result{x0, {}, false};
  RealField x_prev = x0;
  RealField y = x0;
  RealField grad(problem.grid());
  double gamma = config.gamma0;
  double s = 1.0;
  double s_prev = 1.0;

  for (std::size_t k = 1; k <= config.max_iters; ++k)
  {
    const double m_y = problem.fidelity_and_gradient(y, grad);
    if (!std::isfinite(m_y))
      throw DivergenceError("fista: non-finite fidelity at the extrapolated point", result.trace);

    // Smallest i >= 0 with L(T_beta(y)) <= P_beta(T_beta(y), y), beta = eta^i gamma_{k-1}.
    double beta = gamma;
    std::size_t i = 0;
    RealField x(problem.grid());
    double m_x = 0.0, r_x = 0.0, p_x = 0.0;
    for (;; ++i)
    {
      x = prox_l1(y - grad * (1.0 / beta), lambda / beta, sparsity);
      m_x = problem.fidelity(x);
      r_x = regularizer(x, lambda, sparsity);
      const double q = quadratic_model(m_y, grad, beta, x, y);
      p_x = q + r_x;
      if (!std::isfinite(m_x) || !std::isfinite(p_x))
        throw DivergenceError("fista: non-finite objective during backtracking", result.trace);
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(m_y) + std::abs(q) + r_x);
      if (m_x + r_x <= p_x + slack)
        break;
      if (i + 1 >= max_backtracks)
      {
        std::ostringstream msg;
        msg << "fista: backtracking did not terminate at iteration " << k;
        throw DivergenceError(msg.str(), result.trace);
      }
      beta *= config.eta;
    }
    gamma = beta;

    const double dx = l2_norm(x - x_prev);
    const double nx = l2_norm(x);
    const double rel = nx > 0.0 ? dx / nx : (dx > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

    FistaRecord rec;
    rec.k = k;
    rec.fidelity = m_x;
    rec.regularizer = r_x;
    rec.objective = m_x + r_x;
    rec.gamma = gamma;
    rec.s = s;
    rec.backtracks = i;
    rec.rel_change = rel;
    rec.majorizer = p_x;
    result.trace.records.push_back(rec);

    if (accelerated)
    {
      const double s_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s * s));
      const double coef = config.momentum == Momentum::beck_teboulle ? (s - 1.0) / s_next : s_prev / s_next;
      y = x + (x - x_prev) * coef;
      s_prev = s;
      s = s_next;
    }
    else
    {
      y = x;
    }
    x_prev = std::move(x);

    if (rel < config.rel_tol)
    {
      result.converged = true;
      break;
    }
  }
  result.solution = std::move(x_prev);
  return result;
}

} // namespace

FistaResult fista_backtracking(const FidelityProblem &problem, const FistaConfig &config, const RealField &x0)
{
  return proximal_gradient(problem, config, x0, true);
}

FistaResult ista_baseline(const FidelityProblem &problem, const FistaConfig &config, const RealField &x0)
{
  return proximal_gradient(problem, config, x0, false);
}

} // namespace emloc
