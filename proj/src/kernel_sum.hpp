// SPDX-License-Identifier: Apache-2.0

// Multi-frequency accumulation of dyadic-times-vector products for one
// source/receiver pair. Internal to the forward and imaging modules.

#ifndef EMLOC_SRC_KERNEL_SUM_HPP
#define EMLOC_SRC_KERNEL_SUM_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "emloc/greens.hpp"

namespace emloc::detail
{

class FrequencyTable
{
public:
  FrequencyTable(const FrequencySet &freqs, const Medium &medium)
      : kappa_(freqs.size()), pref_(freqs.size()), uniform_(freqs.uniformly_spaced())
  {
    for (std::size_t n = 0; n < freqs.size(); ++n)
    {
      kappa_[n] = medium.kappa(freqs[n]);
      pref_[n] = Complex(0.0, freqs[n] * medium.mu0() / (4.0 * std::numbers::pi));
    }
    if (uniform_)
      dkappa_ = (kappa_.back() - kappa_.front()) / static_cast<double>(kappa_.size() - 1);
  }

  std::size_t size() const { return kappa_.size(); }

  // out[n] += G(d, omega_n) * moment(n) for every n. d must be nonzero.
  template <typename MomentFn>
  void accumulate(const RVec3 &d, MomentFn &&moment, CVec3 *out) const
  {
    const double r = norm(d);
    const RVec3 rhat = d * (1.0 / r);
    const double inv_r = 1.0 / r;
    Complex phase;
    Complex step;
    if (uniform_)
      step = std::polar(1.0, dkappa_ * r);
    for (std::size_t n = 0; n < kappa_.size(); ++n)
    {
      const double x = kappa_[n] * r;
      // Resynchronize the phase recurrence periodically to bound drift.
      if (!uniform_ || n % 16 == 0)
        phase = std::polar(1.0, x);
      else
        phase *= step;
      const Complex scale = pref_[n] * phase * inv_r;
      out[n] += dyadic_apply(scale, x, rhat, moment(n));
    }
  }

private:
  std::vector<double> kappa_;
  std::vector<Complex> pref_;
  bool uniform_;
  double dkappa_ = 0.0;
};

} // namespace emloc::detail

#endif // EMLOC_SRC_KERNEL_SUM_HPP
