// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_GREENS_HPP
#define EMLOC_GREENS_HPP

#include <array>

#include "emloc/geometry.hpp"
#include "emloc/vec3.hpp"

namespace emloc
{

// Dense 3x3 matrix, row major.
template <typename T>
struct Mat3
{
  std::array<T, 9> m{};

  T &operator()(int i, int j) { return m[3 * i + j]; }
  const T &operator()(int i, int j) const { return m[3 * i + j]; }

  Vec3<T> operator*(const Vec3<T> &v) const
  {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
  }
  Mat3 &operator+=(const Mat3 &o)
  {
    for (int i = 0; i < 9; ++i)
      m[i] += o.m[i];
    return *this;
  }
  Mat3 &operator*=(T a)
  {
    for (auto &v : m)
      v *= a;
    return *this;
  }
  friend Mat3 operator+(Mat3 a, const Mat3 &b) { return a += b; }
  friend Mat3 operator*(Mat3 a, T s) { return a *= s; }
  T trace() const { return m[0] + m[4] + m[8]; }
};

using RMat3 = Mat3<double>;
using Dyadic = Mat3<Complex>;

RMat3 real(const Dyadic &d);
Dyadic conj(const Dyadic &d);
Dyadic transpose(const Dyadic &d);
Dyadic operator*(const Dyadic &a, const Dyadic &b);
double frobenius(const Dyadic &d);
double frobenius(const RMat3 &d);

// Outgoing Helmholtz kernel e^{i kappa r} / (4 pi r), time dependence e^{-i omega t}.
Complex scalar_green(double r, double kappa);

// Electric-electric free-space dyadic i omega mu0 (I + grad grad / kappa^2) g(r)
// in closed form: i omega mu0 g(r) [A(kr) I + B(kr) rhat rhat^T] with
//   A = 1 + i/(kr) - 1/(kr)^2,  B = -1 - 3i/(kr) + 3/(kr)^2.
// Negative omega yields the complex conjugate kernel.
Dyadic dyadic_green_ee(const RVec3 &x_minus_y, double omega, const Medium &medium);

// Real part of dyadic_green_ee, evaluated through spherical Bessel functions
// so that it stays accurate down to (and including) zero separation:
//   Re G = -omega mu0 kappa / (4 pi) [((2/3) j0 - (1/3) j2) I + j2 rhat rhat^T].
// At zero separation the value is s * omega mu0 kappa / (6 pi) I with
// s = coincidence_sign().
RMat3 re_green_ee(const RVec3 &x_minus_y, double omega, const Medium &medium);

// Sign of the real part of the kernel at coincidence, relative to
// omega mu0 kappa. Determined once from a truncated frequency integral of
// the closed-form kernel at shrinking off-origin separations (positivity
// test of the delta identity); never hard-coded.
int coincidence_sign();
// Runs the self-test from scratch (used by the validation report).
int determine_coincidence_sign();

// Relative Frobenius residual of the Helmholtz-Kirchhoff identity
//   sum_xi w(xi) G(x - xi) conj(G(xi - y))  ~=  s mu0 c0 Re G(x - y)
// on a spherical mesh. Requires x and y strictly inside the sphere.
double hk_identity_residual(const RVec3 &x, const RVec3 &y, double omega, const Medium &medium,
                            const SurfaceMesh &mesh);

// Surface quadrature side of the identity above.
Dyadic hk_surface_integral(const RVec3 &x, const RVec3 &y, double omega, const Medium &medium,
                           const SurfaceMesh &mesh);

namespace detail
{

// G(r rhat) p for one frequency, given scale = i omega mu0 e^{i x} / (4 pi r)
// and x = kappa r. Shared by the hot quadrature loops.
inline CVec3 dyadic_apply(const Complex &scale, double x, const RVec3 &rhat, const CVec3 &p)
{
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const Complex a(1.0 - inv2, inv);
  const Complex b(-1.0 + 3.0 * inv2, -3.0 * inv);
  const Complex rp = rhat[0] * p[0] + rhat[1] * p[1] + rhat[2] * p[2];
  const Complex sa = scale * a;
  const Complex sbr = scale * b * rp;
  return {sa * p[0] + sbr * rhat[0], sa * p[1] + sbr * rhat[1], sa * p[2] + sbr * rhat[2]};
}

} // namespace detail

} // namespace emloc

#endif // EMLOC_GREENS_HPP
