// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion. Expected values are
// computed here from first principles wherever possible rather than taken
// from the library's own validation helpers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "emloc/commands.hpp"
#include "emloc/fidelity.hpp"
#include "emloc/fista.hpp"
#include "emloc/imaging.hpp"
#include "emloc/validation.hpp"
#include "support.hpp"

using namespace emloc;
using nlohmann::json;

namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double slope_fit(const std::vector<double> &x, const std::vector<double> &y)
{
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RVec3 random_unit(std::mt19937_64 &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  RVec3 v{g(rng), g(rng), g(rng)};
  return v * (1.0 / norm(v));
}

RealField uniform_field(const VoxelGrid &g, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealField f(g);
  for (std::size_t v = 0; v < g.size(); ++v)
    f[v] = {u(rng), u(rng), u(rng)};
  return f;
}

// ---------------------------------------------------------------------------
// 1. Kernel: finite-difference residual of curl curl G - kappa^2 G.

double curl_curl_residual(const RVec3 &r, double omega, const Medium &medium, double h)
{
  const auto G = [&](const RVec3 &p) { return dyadic_green_ee(p, omega, medium); };
  // d2[a][b] = d_a d_b G by central differences.
  Dyadic d2[3][3];
  const Dyadic g0 = G(r);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b)
    {
      RVec3 ea{}, eb{};
      ea[a] = h;
      eb[b] = h;
      Dyadic d;
      if (a == b)
      {
        const Dyadic p = G(r + ea), m = G(r - ea);
        for (int i = 0; i < 9; ++i)
          d.m[i] = (p.m[i] - 2.0 * g0.m[i] + m.m[i]) / (h * h);
      }
      else
      {
        const Dyadic pp = G(r + ea + eb), pm = G(r + ea - eb), mp = G(r - ea + eb), mm = G(r - ea - eb);
        for (int i = 0; i < 9; ++i)
          d.m[i] = (pp.m[i] - pm.m[i] - mp.m[i] + mm.m[i]) / (4.0 * h * h);
      }
      d2[a][b] = d;
      d2[b][a] = d;
    }
  const double k2 = std::pow(medium.kappa(omega), 2);
  double res = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
    {
      Complex v = -k2 * g0(i, j);
      for (int k = 0; k < 3; ++k)
        v += d2[i][k](k, j) - d2[k][k](i, j);
      res += std::norm(v);
    }
  return std::sqrt(res) / (k2 * frobenius(g0));
}

Outcome criterion1()
{
  const Medium medium;
  const double kappa = 5.0, omega = medium.omega(kappa);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  double pde = 0.0, recip = 0.0;
  for (int t = 0; t < 20; ++t)
  {
    const RVec3 r = random_unit(rng) * radius(rng);
    pde = std::max(pde, curl_curl_residual(r, omega, medium, norm(r) / 200.0));
    const Dyadic a = dyadic_green_ee(r, omega, medium), b = dyadic_green_ee(r * -1.0, omega, medium);
    double scale = 0.0, diff = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
      {
        scale = std::max(scale, std::abs(a(i, j)));
        diff = std::max({diff, std::abs(a(i, j) - b(i, j)), std::abs(a(i, j) - a(j, i))});
      }
    recip = std::max(recip, diff / scale);
  }
  const RVec3 r0 = RVec3{0.3, -0.5, 0.8} * (1.2 / std::sqrt(0.98));
  std::vector<double> hs, res;
  for (double div : {25.0, 50.0, 100.0, 200.0})
  {
    hs.push_back(norm(r0) / div);
    res.push_back(curl_curl_residual(r0, omega, medium, hs.back()));
  }
  const double order = slope_fit(hs, res);
  Outcome o;
  o.pass = pde < 1e-3 && recip <= 1e-14 && std::abs(order - 2.0) <= 0.2;
  o.detail = "max FD residual " + fmt(pde) + " (< 1e-3), reciprocity " + fmt(recip) + " (<= 1e-14), order " +
             fmt(order) + " (2.0 +- 0.2)";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Surface identity sum_xi w G(x - xi) conj G(xi - y) = s mu0 c0 Re G(x - y).

double hk_residual(const RVec3 &x, const RVec3 &y, double omega, const Medium &medium, const SurfaceMesh &mesh)
{
  Dyadic sum;
  for (std::size_t i = 0; i < mesh.size(); ++i)
  {
    const RVec3 &xi = mesh.points()[i];
    sum += dyadic_green_ee(x - xi, omega, medium) * conj(dyadic_green_ee(xi - y, omega, medium)) *
           Complex(mesh.weights()[i]);
  }
  const RMat3 rhs = re_green_ee(x - y, omega, medium) * (coincidence_sign() * medium.mu0() * medium.c0());
  double num = 0.0;
  for (int i = 0; i < 9; ++i)
    num += std::norm(sum.m[i] - rhs.m[i]);
  return std::sqrt(num) / frobenius(rhs);
}

Outcome criterion2()
{
  const Medium medium;
  const double omega = 2.0 * std::numbers::pi; // wavelength 1
  const double kappa = medium.kappa(omega);
  const RVec3 x{0.1, -0.05, 0.2};
  const RVec3 dir = RVec3{1.0, 2.0, -2.0} * (1.0 / 3.0);
  const SurfaceMesh mesh50 = make_sphere_mesh({0, 0, 0}, 50.0, 20000);
  double worst = 0.0;
  std::ostringstream pairs;
  for (int m = 0; m <= 4; ++m)
  {
    const RVec3 y = x + dir * (m / kappa);
    const double r = hk_residual(x, y, omega, medium, mesh50);
    worst = std::max(worst, r);
    pairs << (m ? ", " : "") << fmt(r);
  }
  std::vector<double> sweep;
  for (double R : {10.0, 50.0, 100.0})
    sweep.push_back(hk_residual(x, x + dir * (2.0 / kappa), omega, medium, make_sphere_mesh({0, 0, 0}, R, 400000)));
  const bool decreasing = sweep[0] > sweep[1] && sweep[1] > sweep[2];
  Outcome o;
  o.pass = worst < 0.05 && decreasing;
  o.detail = "R = 50 wavelengths, n = 2e4: residuals [" + pairs.str() + "] (< 0.05); R = 10/50/100 at n = 4e5: " +
             fmt(sweep[0]) + " > " + fmt(sweep[1]) + " > " + fmt(sweep[2]) + (decreasing ? "" : " NOT decreasing");
  return o;
}

// ---------------------------------------------------------------------------
// 3. Truncated band integral of Re G.

double band_trace(const RVec3 &d, double band_max, const Medium &medium)
{
  // (eps0 / 2 pi) * 2 * int_0^W tr Re G d omega by composite Simpson.
  const std::size_t n = 4096;
  const double h = band_max / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t m = 1; m <= n; ++m)
  {
    const double w = (m == n) ? 1.0 : (m % 2 ? 4.0 : 2.0);
    s += w * re_green_ee(d, h * static_cast<double>(m), medium).trace();
  }
  return s * h / 3.0 * 2.0 * medium.epsilon0() / (2.0 * std::numbers::pi);
}

Outcome criterion3()
{
  const Medium medium;
  const RVec3 x{0.1, 0.2, -0.1};
  const RVec3 y = x + RVec3{0.6, 0.0, 0.8}; // |x - y| = 1
  const double t8 = band_trace(x - y, 8.0, medium);
  const double t64 = band_trace(x - y, 64.0, medium);
  const bool decays = std::abs(t64) < std::abs(t8);

  std::vector<double> ws, trs;
  for (double w : {8.0, 16.0, 32.0, 64.0})
  {
    ws.push_back(w);
    trs.push_back(std::abs(band_trace({0, 0, 0}, w, medium)));
  }
  const double growth = slope_fit(ws, trs);
  const int s1 = determine_coincidence_sign(), s2 = determine_coincidence_sign();
  const bool stable = s1 == s2 && s1 == coincidence_sign();

  // Library quadrature agrees with the independent Simpson oracle.
  const double lib = delta_identity_residual(x, y, medium, 64.0, 4096).trace();

  Outcome o;
  o.pass = decays && std::abs(growth - 3.0) <= 0.3 && stable;
  o.detail = "off-source |tr| W=8: " + fmt(std::abs(t8)) + ", W=64: " + fmt(std::abs(t64)) +
             (decays ? " (decays)" : " (does not decay)") + "; on-source growth exponent " + fmt(growth) +
             " (3.0 +- 0.3); sign s = " + std::to_string(s1) + (stable ? " stable" : " UNSTABLE") +
             "; library vs oracle at W=64: " + fmt(std::abs(lib - t64) / std::abs(t64));
  return o;
}

// ---------------------------------------------------------------------------
// 4. Broadband image of a smooth blob.

Outcome criterion4(unsigned threads)
{
  const Medium medium;
  const VoxelGrid grid({-0.6, -0.6, -0.6}, 0.05, {24, 24, 24});
  const RealField j = make_blob_source(grid, {0, 0, 0}, 0.5, {0, 0, 1}, BlobPattern::uniform);
  const SurfaceMesh mesh = make_sphere_mesh({0, 0, 0}, 3.0, 8000); // 3x the source diameter
  const FrequencySet freqs = FrequencySet::band(medium, 2.0, 32.0, 64);
  const BoundaryData data = simulate_boundary_data(j, mesh, freqs, medium, threads);
  const RealField img = phase_conj_full(data, grid, medium, threads);

  const double corr = inner(img, j) / (l2_norm(img) * l2_norm(j));
  const auto dims = grid.dims();
  double inside = 0.0, total = 0.0;
  for (std::size_t v = 0; v < grid.size(); ++v)
  {
    const auto [i, jj, k] = grid.unravel(v);
    const double mass = std::abs(img[v][0]) + std::abs(img[v][1]) + std::abs(img[v][2]);
    total += mass;
    bool near = false;
    for (int a = -1; a <= 1 && !near; ++a)
      for (int b = -1; b <= 1 && !near; ++b)
        for (int c = -1; c <= 1 && !near; ++c)
        {
          const long ii = static_cast<long>(i) + a, jb = static_cast<long>(jj) + b, kc = static_cast<long>(k) + c;
          if (ii < 0 || jb < 0 || kc < 0 || ii >= static_cast<long>(dims[0]) || jb >= static_cast<long>(dims[1]) ||
              kc >= static_cast<long>(dims[2]))
            continue;
          const RVec3 &w = j[grid.linear(ii, jb, kc)];
          near = w[0] != 0.0 || w[1] != 0.0 || w[2] != 0.0;
        }
    if (near)
      inside += mass;
  }
  Outcome o;
  o.pass = corr >= 0.8 && inside / total >= 0.7;
  o.detail = "24^3 grid, 64 frequencies, kappa in [2, 32]: correlation " + fmt(corr) + " (>= 0.8), mass in dilated support " +
             fmt(inside / total) + " (>= 0.7), |I|/|J| = " + fmt(l2_norm(img) / l2_norm(j));
  return o;
}

// ---------------------------------------------------------------------------
// 5. Adjoint and gradient integrity.

Outcome criterion5()
{
  const Medium medium;
  const VoxelGrid g({-0.5, -0.5, -0.5}, 0.25, {4, 4, 4});
  const FrequencySet freqs = FrequencySet::band(medium, 3.0, 9.0, 3);
  std::mt19937_64 rng(55);
  std::vector<RealField> targets;
  for (std::size_t n = 0; n < freqs.size(); ++n)
    targets.push_back(uniform_field(g, rng));
  const FidelityProblem prob(g, freqs, medium, targets);

  double adj = 0.0;
  for (int t = 0; t < 10; ++t)
    for (std::size_t n = 0; n < freqs.size(); ++n)
    {
      const RealField u = uniform_field(g, rng), v = uniform_field(g, rng);
      const RealField au = prob.apply(n, u);
      adj = std::max(adj, std::abs(inner(au, v) - inner(u, prob.apply(n, v))) / (l2_norm(au) * l2_norm(v)));
    }
  const RealField x = uniform_field(g, rng);
  const RealField grad = prob.gradient(x);
  double gerr = 0.0;
  for (int t = 0; t < 20; ++t)
  {
    const RealField d = uniform_field(g, rng);
    const double step = 1e-4;
    const double fd = (prob.fidelity(x + d * step) - prob.fidelity(x - d * step)) / (2.0 * step);
    const double an = inner(grad, d);
    gerr = std::max(gerr, std::abs(fd - an) / std::max(std::abs(an), 1e-3 * l2_norm(grad) * l2_norm(d)));
  }
  Outcome o;
  o.pass = adj <= 1e-10 && gerr < 1e-6;
  o.detail = "self-adjoint error " + fmt(adj) + " (<= 1e-10), gradient vs central differences " + fmt(gerr) +
             " (< 1e-6) on 4^3";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Optimization.

// Tiny instance: two voxels along x. The model couples only equal components,
// so L splits into three independent two-variable problems, each solved by
// nested grid search.
double tiny_lasso_error(std::string &note)
{
  const Medium medium;
  const VoxelGrid g({-0.25, -0.125, -0.125}, 0.25, {2, 1, 1});
  const FrequencySet freqs = FrequencySet::band(medium, 2.0, 8.0, 4);
  RealField truth(g);
  truth[0] = {1.0, 0.0, -0.5};
  truth[1] = {0.0, 2.0, 0.3};
  FidelityProblem base(g, freqs, medium, std::vector<RealField>(freqs.size(), RealField(g)));
  std::vector<RealField> targets;
  for (std::size_t n = 0; n < freqs.size(); ++n)
    targets.push_back(base.apply(n, truth));
  const FidelityProblem prob(g, freqs, medium, targets);
  const double lambda = 0.05 * lambda_max(prob);

  // Check the block structure before relying on it.
  double coupling = 0.0, scale = 0.0;
  for (int c = 0; c < 3; ++c)
  {
    RealField e(g);
    e[0][c] = 1.0;
    const RealField col = prob.apply(0, e);
    for (std::size_t v = 0; v < 2; ++v)
      for (int a = 0; a < 3; ++a)
        (a == c ? scale : coupling) = std::max(a == c ? scale : coupling, std::abs(col[v][a]));
  }

  RealField brute(g);
  for (int c = 0; c < 3; ++c)
  {
    const auto objective_at = [&](double a, double b) {
      RealField f(g);
      f[0][c] = a;
      f[1][c] = b;
      return objective(prob, f, lambda);
    };
    double ca = 0.0, cb = 0.0, half = 4.0;
    for (int level = 0; level < 12; ++level)
    {
      const int n = 40;
      double best = objective_at(ca, cb), ba = ca, bb = cb;
      for (int i = -n; i <= n; ++i)
        for (int k = -n; k <= n; ++k)
        {
          const double a = ca + half * i / n, b = cb + half * k / n;
          const double val = objective_at(a, b);
          if (val < best)
          {
            best = val;
            ba = a;
            bb = b;
          }
        }
      // Snap to exact zeros the search straddles.
      for (double *p : {&ba, &bb})
        if (std::abs(*p) <= half / n * 0.5)
        {
          const double keep = *p;
          *p = 0.0;
          if (objective_at(ba, bb) > best)
            *p = keep;
          else
            best = objective_at(ba, bb);
        }
      ca = ba;
      cb = bb;
      half *= 0.25;
    }
    brute[0][c] = ca;
    brute[1][c] = cb;
  }

  FistaConfig cfg;
  cfg.lambda = lambda;
  cfg.gamma0 = 1e-3 * prob.lipschitz_estimate();
  cfg.max_iters = 100000;
  cfg.rel_tol = 1e-13;
  const RealField x = fista_backtracking(prob, cfg, RealField(g)).solution;
  const double err = l2_norm(x - brute) / l2_norm(brute);
  note = "coupling/diagonal " + fmt(coupling / scale) + ", nonzeros brute " +
         std::to_string(count_nonzero_components(brute)) + " fista " + std::to_string(count_nonzero_components(x));
  return coupling <= 1e-12 * scale ? err : std::numeric_limits<double>::infinity();
}

Outcome criterion6()
{
  std::string note;
  const double tiny = tiny_lasso_error(note);

  const RateScenario sc = make_rate_scenario(1);
  FistaConfig cfg = sc.config;
  cfg.rel_tol = 0.0;
  cfg.max_iters = 10000;
  const FistaResult ref = fista_backtracking(sc.problem, cfg, RealField(sc.problem.grid()));
  cfg.max_iters = 200;
  const FistaResult fast = fista_backtracking(sc.problem, cfg, RealField(sc.problem.grid()));
  const FistaResult slow = ista_baseline(sc.problem, cfg, RealField(sc.problem.grid()));
  double l_star = std::numeric_limits<double>::infinity();
  for (const FistaTrace *t : {&ref.trace, &fast.trace, &slow.trace})
    for (const auto &r : t->records)
      l_star = std::min(l_star, r.objective);

  bool monotone = true;
  for (std::size_t k = 1; k < slow.trace.records.size(); ++k)
    monotone = monotone && slow.trace.records[k].objective <=
                               slow.trace.records[k - 1].objective + 64.0 * std::numeric_limits<double>::epsilon() *
                                                                         std::abs(slow.trace.records[k - 1].objective);
  const double f100 = fast.trace.records[99].objective, i100 = slow.trace.records[99].objective;
  std::vector<double> ks, gaps;
  for (const auto &r : fast.trace.records)
    if (r.k >= 10 && r.k <= 200 && r.objective > l_star)
    {
      ks.push_back(static_cast<double>(r.k));
      gaps.push_back(r.objective - l_star);
    }
  const double slope = slope_fit(ks, gaps);
  Outcome o;
  o.pass = tiny <= 1e-3 && monotone && f100 <= i100 && slope <= -1.6;
  o.detail = "tiny instance vs grid search " + fmt(tiny) + " (<= 1e-3; " + note + "); ISTA monotone " +
             (monotone ? "yes" : "NO") + "; L_100 FISTA " + fmt(f100) + " vs ISTA " + fmt(i100) +
             "; FISTA slope " + fmt(slope) + " (<= -1.6)";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Two-source localization and sparsity sweep.

Outcome criterion7(unsigned threads)
{
  const Medium medium;
  const VoxelGrid coarse({-1, -1, -1}, 0.125, {16, 16, 16});
  const VoxelGrid fine = coarse.refined(2);
  const RVec3 c1{-0.5625, 0, 0}, c2{0.5625, 0, 0}, m{0, 0, 1};
  const double radius = 0.2;
  const RealField jf = make_ball_source(fine, c1, radius, m) + make_ball_source(fine, c2, radius, m);
  const RealField jc = make_ball_source(coarse, c1, radius, m) + make_ball_source(coarse, c2, radius, m);
  const SurfaceMesh mesh = make_sphere_mesh({0, 0, 0}, 4.0, 4000);
  const FrequencySet freqs = FrequencySet::band(medium, 6.0, 14.0, 8);
  const double longest = medium.wavelength(freqs[0]);
  const BoundaryData data = add_noise(simulate_boundary_data(jf, mesh, freqs, medium, threads), 0.01, 42);
  const ImageStack stack = phase_conj_stack(data, coarse, medium, threads);

  const auto peaks = find_peaks(coarse, stack.magnitude_sum(), 2);
  bool located = peaks.size() == 2;
  std::ostringstream where;
  for (const RVec3 &c : {c1, c2})
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p : peaks)
    {
      const RVec3 d = coarse.center(p) - c;
      best = std::min(best, std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])}) / coarse.spacing());
    }
    located = located && best <= 1.0;
    where << fmt(best) << " ";
  }

  const FidelityProblem prob(coarse, freqs, medium, fidelity_targets(stack), KernelPath::fft);
  const double lmax = lambda_max(prob);
  FistaConfig cfg;
  cfg.gamma0 = 1e-2 * prob.lipschitz_estimate();
  cfg.max_iters = 500;
  cfg.rel_tol = 1e-6;
  const double truth = l2_norm(jc);
  const auto solve = [&](double lambda) {
    cfg.lambda = lambda;
    return fista_backtracking(prob, cfg, RealField(coarse)).solution;
  };
  const double err0 = l2_norm(solve(0.0) - jc) / truth;
  double best_err = std::numeric_limits<double>::infinity(), best_frac = 0.0;
  std::vector<std::size_t> l0;
  std::ostringstream sweep;
  for (double frac : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1})
  {
    const RealField x = solve(frac * lmax);
    const double err = l2_norm(x - jc) / truth;
    l0.push_back(count_nonzero_components(x));
    sweep << frac << ":" << fmt(err) << "/" << l0.back() << " ";
    if (err < best_err)
    {
      best_err = err;
      best_frac = frac;
    }
  }
  const bool l0_monotone = std::is_sorted(l0.rbegin(), l0.rend());
  const double gain = (err0 - best_err) / err0;
  Outcome o;
  o.pass = located && gain >= 0.25 && l0_monotone && norm(c2 - c1) > longest;
  o.detail = "separation " + fmt(norm(c2 - c1)) + " vs wavelength " + fmt(longest) + "; peak offsets (voxels) " +
             where.str() + "(<= 1); error lambda=0 " + fmt(err0) + ", best " + fmt(best_err) + " at " +
             fmt(best_frac) + " lambda_max, improvement " + fmt(100.0 * gain) + "% (>= 25%); sweep err/l0 " +
             sweep.str() + (l0_monotone ? "(l0 non-increasing)" : "(l0 NOT monotone)");
  return o;
}

// ---------------------------------------------------------------------------
// 8. Reproducibility of the command pipeline.

json reproducibility_scenario()
{
  return json::parse(R"({
    "schema": "emloc.scenario/1",
    "grid": {"origin": [-0.5, -0.5, -0.5], "spacing": 0.125, "dims": [8, 8, 8]},
    "forward_refinement": 2,
    "surface": {"center": [0, 0, 0], "radius": 3.0, "n_points": 800},
    "sources": [{"type": "ball", "center": [0.1, 0.0, -0.05], "radius": 0.2, "moment": [0, 1, 1]}],
    "frequencies": {"band": {"kappa_min": 4.0, "kappa_max": 12.0, "count": 4}},
    "noise": {"level": 0.01, "seed": 7},
    "inversion": {"lambda": 1e-4, "gamma0": 1.0, "max_iters": 150, "kernel": "fft"},
    "imaging": {"broadband": true}
  })");
}

bool run_pipeline(const std::filesystem::path &scenario, const std::filesystem::path &out, unsigned threads)
{
  CommandOptions opt;
  opt.scenario = scenario;
  opt.out = out;
  opt.threads = threads;
  std::ostringstream log, err;
  return cmd_forward(opt, log, err) == 0 && cmd_image(opt, log, err) == 0 && cmd_invert(opt, log, err) == 0;
}

Outcome criterion8()
{
  const emloc::test::TempDir dir("acceptance_repro");
  emloc::test::spit(dir / "s.json", reproducibility_scenario().dump(2));
  Outcome o;
  if (!run_pipeline(dir / "s.json", dir / "a", 1) || !run_pipeline(dir / "s.json", dir / "b", 1) ||
      !run_pipeline(dir / "s.json", dir / "t", 4))
  {
    o.detail = "pipeline failed";
    return o;
  }
  std::size_t files = 0, identical = 0;
  for (const auto &e : std::filesystem::directory_iterator(dir / "a"))
  {
    ++files;
    if (emloc::test::slurp(e.path()) == emloc::test::slurp(dir / "b" / e.path().filename()))
      ++identical;
  }
  const json s1 = json::parse(emloc::test::slurp(dir / "a/summary.json"));
  const json st = json::parse(emloc::test::slurp(dir / "t/summary.json"));
  double worst = 0.0;
  std::size_t scalars = 0;
  for (const auto &[key, v] : s1.items())
    if (v.is_number_float())
    {
      ++scalars;
      const double a = v.get<double>(), b = st[key].get<double>();
      worst = std::max(worst, a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
  o.pass = files > 0 && identical == files && worst <= 1e-12 && scalars > 0;
  o.detail = std::to_string(identical) + "/" + std::to_string(files) +
             " output files byte-identical across single-threaded reruns; 4 threads vs 1: worst relative gap " +
             fmt(worst) + " over " + std::to_string(scalars) + " summary scalars (<= 1e-12)";
  return o;
}

} // namespace

int main()
{
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
      {"kernel", criterion1},
      {"surface identity", criterion2},
      {"delta identity", criterion3},
      {"broadband image", [&] { return criterion4(threads); }},
      {"adjoint and gradient", criterion5},
      {"optimization", criterion6},
      {"two-source localization", [&] { return criterion7(threads); }},
      {"reproducibility", criterion8}};

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = criteria[i].second();
    }
    catch (const std::exception &e)
    {
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
