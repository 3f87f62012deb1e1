// SPDX-License-Identifier: Apache-2.0

#include "emloc/greens.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace emloc
{

namespace
{

constexpr double pi = std::numbers::pi;

// Spherical Bessel j_n(x) for n = 0, 2. Power series below |x| = 1 where the
// closed forms lose digits to cancellation.
double sph_j(int n, double x)
{
  const double ax = std::abs(x);
  if (ax < 1.0)
  {
    // j_n(x) = x^n / (2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    double lead = 1.0;
    for (int k = 1; k <= n; ++k)
      lead *= x / (2.0 * k + 1.0);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 30; ++k)
    {
      term *= -0.5 * x * x / (k * (2.0 * n + 2.0 * k + 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum))
        break;
    }
    return lead * sum;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  if (n == 0)
    return s / x;
  return (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
}

void require_frequency(double omega, const char *who)
{
  if (omega == 0.0 || !std::isfinite(omega))
    throw std::domain_error(std::string(who) + ": omega must be nonzero and finite");
}

} // namespace

RMat3 real(const Dyadic &d)
{
  RMat3 r;
  for (int i = 0; i < 9; ++i)
    r.m[i] = d.m[i].real();
  return r;
}

Dyadic conj(const Dyadic &d)
{
  Dyadic r;
  for (int i = 0; i < 9; ++i)
    r.m[i] = std::conj(d.m[i]);
  return r;
}

Dyadic transpose(const Dyadic &d)
{
  Dyadic r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = d(j, i);
  return r;
}

Dyadic operator*(const Dyadic &a, const Dyadic &b)
{
  Dyadic r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
    {
      Complex s = 0.0;
      for (int k = 0; k < 3; ++k)
        s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

double frobenius(const Dyadic &d)
{
  double s = 0.0;
  for (const auto &v : d.m)
    s += std::norm(v);
  return std::sqrt(s);
}

double frobenius(const RMat3 &d)
{
  double s = 0.0;
  for (double v : d.m)
    s += v * v;
  return std::sqrt(s);
}

Complex scalar_green(double r, double kappa)
{
  if (!(r > 0.0))
    throw std::domain_error("scalar_green: r must be positive");
  return std::polar(1.0 / (4.0 * pi * r), kappa * r);
}

Dyadic dyadic_green_ee(const RVec3 &x_minus_y, double omega, const Medium &medium)
{
  require_frequency(omega, "dyadic_green_ee");
  const double r = norm(x_minus_y);
  if (!(r > 0.0))
    throw std::domain_error("dyadic_green_ee: zero separation (use re_green_ee for the coincidence limit)");
  const double x = medium.kappa(omega) * r;
  const RVec3 rhat = x_minus_y * (1.0 / r);
  const Complex g = std::polar(1.0 / (4.0 * pi * r), x);
  const Complex scale = Complex(0.0, omega * medium.mu0()) * g;
  const double inv = 1.0 / x;
  const Complex a = scale * Complex(1.0 - inv * inv, inv);
  const Complex b = scale * Complex(-1.0 + 3.0 * inv * inv, -3.0 * inv);
  Dyadic d;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      d(i, j) = b * (rhat[i] * rhat[j]) + (i == j ? a : Complex(0.0));
  return d;
}

RMat3 re_green_ee(const RVec3 &x_minus_y, double omega, const Medium &medium)
{
  require_frequency(omega, "re_green_ee");
  const double kappa = medium.kappa(omega);
  const double r = norm(x_minus_y);
  RMat3 out;
  if (r == 0.0)
  {
    const double diag = coincidence_sign() * omega * medium.mu0() * kappa / (6.0 * pi);
    out(0, 0) = out(1, 1) = out(2, 2) = diag;
    return out;
  }
  const double x = kappa * r;
  const double j0 = sph_j(0, x);
  const double j2 = sph_j(2, x);
  const double scale = -omega * medium.mu0() * kappa / (4.0 * pi);
  const double a = scale * (2.0 * j0 - j2) / 3.0;
  const double b = scale * j2;
  const RVec3 rhat = x_minus_y * (1.0 / r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out(i, j) = b * rhat[i] * rhat[j] + (i == j ? a : 0.0);
  return out;
}

int determine_coincidence_sign()
{
  // (eps0 / 2 pi) * 2 * int_0^W tr Re G(eps u, omega) d omega at shrinking
  // separations, using only the closed-form (off-origin) kernel.
  const Medium medium;
  const RVec3 u = RVec3{1.0, 2.0, 2.0} * (1.0 / 3.0);
  const double band = 4.0;
  const int samples = 64;
  int sign = 0;
  for (double eps : {1e-2, 5e-3, 2.5e-3})
  {
    double integral = 0.0;
    for (int m = 1; m <= samples; ++m)
    {
      const double omega = band * m / samples;
      const double w = (m == samples ? 0.5 : 1.0) * band / samples;
      integral += w * real(dyadic_green_ee(u * eps, omega, medium)).trace();
    }
    integral *= medium.epsilon0() / pi;
    const int s = integral > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign)
      throw std::logic_error("determine_coincidence_sign: unstable sign along the limiting sequence");
    sign = s;
  }
  return sign;
}

int coincidence_sign()
{
  static const int sign = determine_coincidence_sign();
  return sign;
}

Dyadic hk_surface_integral(const RVec3 &x, const RVec3 &y, double omega, const Medium &medium,
                           const SurfaceMesh &mesh)
{
  require_frequency(omega, "hk_surface_integral");
  if (!mesh.sphere())
    throw std::invalid_argument("hk_surface_integral: mesh must discretize a sphere");
  const Sphere &sph = *mesh.sphere();
  if (!(norm(x - sph.center) < sph.radius) || !(norm(y - sph.center) < sph.radius))
    throw std::invalid_argument("hk_surface_integral: x and y must lie strictly inside the sphere");

  Dyadic sum;
  for (std::size_t i = 0; i < mesh.size(); ++i)
  {
    const RVec3 &xi = mesh.points()[i];
    Dyadic term = dyadic_green_ee(x - xi, omega, medium) * conj(dyadic_green_ee(xi - y, omega, medium));
    term *= Complex(mesh.weights()[i]);
    sum += term;
  }
  return sum;
}

double hk_identity_residual(const RVec3 &x, const RVec3 &y, double omega, const Medium &medium,
                            const SurfaceMesh &mesh)
{
  const Dyadic lhs = hk_surface_integral(x, y, omega, medium, mesh);
  const RMat3 rhs = re_green_ee(x - y, omega, medium) * (coincidence_sign() * medium.mu0() * medium.c0());
  Dyadic diff = lhs;
  for (int i = 0; i < 9; ++i)
    diff.m[i] -= rhs.m[i];
  const double scale = frobenius(rhs);
  if (!(scale > 0.0))
    throw std::domain_error("hk_identity_residual: right-hand side vanishes; relative residual undefined");
  return frobenius(diff) / scale;
}

} // namespace emloc
