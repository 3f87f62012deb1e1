// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_VEC3_HPP
#define EMLOC_VEC3_HPP

#include <array>
#include <cmath>
#include <complex>

namespace emloc
{

using Complex = std::complex<double>;

// Small fixed 3-vector used for positions, moments and field samples.
template <typename T>
struct Vec3
{
  std::array<T, 3> c{};

  constexpr Vec3() = default;
  constexpr Vec3(T x, T y, T z) : c{x, y, z} {}

  constexpr T &operator[](int i) { return c[i]; }
  constexpr const T &operator[](int i) const { return c[i]; }

  constexpr Vec3 &operator+=(const Vec3 &o)
  {
    c[0] += o.c[0];
    c[1] += o.c[1];
    c[2] += o.c[2];
    return *this;
  }
  constexpr Vec3 &operator-=(const Vec3 &o)
  {
    c[0] -= o.c[0];
    c[1] -= o.c[1];
    c[2] -= o.c[2];
    return *this;
  }
  constexpr Vec3 &operator*=(T a)
  {
    c[0] *= a;
    c[1] *= a;
    c[2] *= a;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, T s) { return a *= s; }
  friend constexpr Vec3 operator*(T s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3 &a) { return {-a.c[0], -a.c[1], -a.c[2]}; }
  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

using RVec3 = Vec3<double>;
using CVec3 = Vec3<Complex>;

inline double dot(const RVec3 &a, const RVec3 &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const RVec3 &a) { return std::sqrt(dot(a, a)); }

inline double norm2(const CVec3 &a)
{
  return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]);
}
inline double norm(const CVec3 &a) { return std::sqrt(norm2(a)); }

inline CVec3 conj(const CVec3 &a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }
inline RVec3 real(const CVec3 &a) { return {a[0].real(), a[1].real(), a[2].real()}; }
inline RVec3 imag(const CVec3 &a) { return {a[0].imag(), a[1].imag(), a[2].imag()}; }
inline CVec3 to_complex(const RVec3 &a) { return {a[0], a[1], a[2]}; }

// Squared Euclidean length of a real vector.
inline double norm2(const RVec3 &a) { return dot(a, a); }

} // namespace emloc

#endif // EMLOC_VEC3_HPP
