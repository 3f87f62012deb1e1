// SPDX-License-Identifier: Apache-2.0

#include "emloc/fidelity.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "emloc/greens.hpp"

namespace emloc
{

namespace
{

// FFTW planning is not thread safe; execution with new-array calls is.
std::mutex &fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwFree
{
  void operator()(void *p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n)
{
  auto *p = static_cast<T *>(fftw_malloc(sizeof(T) * n));
  if (!p)
    throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Symmetric 3x3 stored as xx, xy, xz, yy, yz, zz.
constexpr int sym_index[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

} // namespace

// Circulant embedding of the translation-invariant kernel on a grid padded
// to twice its size per axis.
class FidelityProblem::FftEngine
{
public:
  FftEngine(const VoxelGrid &grid, const std::vector<std::vector<std::array<double, 6>>> &tables)
      : dims_(grid.dims())
  {
    for (int a = 0; a < 3; ++a)
      pad_[a] = 2 * dims_[a];
    real_size_ = pad_[0] * pad_[1] * pad_[2];
    spec_size_ = pad_[2] * pad_[1] * (pad_[0] / 2 + 1);

    auto in = fftw_buffer<double>(real_size_);
    auto out = fftw_buffer<fftw_complex>(spec_size_);
    {
      std::lock_guard lock(fftw_planner_mutex());
      // FFTW is row major with the last index fastest: (z, y, x).
      forward_ = fftw_plan_dft_r2c_3d(static_cast<int>(pad_[2]), static_cast<int>(pad_[1]),
                                      static_cast<int>(pad_[0]), in.get(), out.get(),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
      backward_ = fftw_plan_dft_c2r_3d(static_cast<int>(pad_[2]), static_cast<int>(pad_[1]),
                                       static_cast<int>(pad_[0]), out.get(), in.get(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!forward_ || !backward_)
      throw std::runtime_error("FidelityProblem: FFTW planning failed");

    const std::size_t mx = 2 * dims_[0] - 1;
    const std::size_t my = 2 * dims_[1] - 1;
    spectra_.resize(tables.size());
    for (std::size_t n = 0; n < tables.size(); ++n)
    {
      spectra_[n].resize(6 * spec_size_);
      for (int e = 0; e < 6; ++e)
      {
        std::fill(in.get(), in.get() + real_size_, 0.0);
        for (std::size_t k = 0; k < 2 * dims_[2] - 1; ++k)
          for (std::size_t j = 0; j < my; ++j)
            for (std::size_t i = 0; i < mx; ++i)
            {
              const std::size_t pi = wrap(i, 0);
              const std::size_t pj = wrap(j, 1);
              const std::size_t pk = wrap(k, 2);
              in[pi + pad_[0] * (pj + pad_[1] * pk)] = tables[n][i + mx * (j + my * k)][e];
            }
        fftw_execute_dft_r2c(forward_, in.get(), out.get());
        for (std::size_t s = 0; s < spec_size_; ++s)
          spectra_[n][e * spec_size_ + s] = Complex(out[s][0], out[s][1]);
      }
    }
  }

  ~FftEngine()
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  FftEngine(const FftEngine &) = delete;
  FftEngine &operator=(const FftEngine &) = delete;

  void apply(std::size_t n, const RealField &field, RealField &out) const
  {
    auto in = fftw_buffer<double>(real_size_);
    std::array<FftwBuffer<fftw_complex>, 3> f;
    for (int c = 0; c < 3; ++c)
    {
      f[c] = fftw_buffer<fftw_complex>(spec_size_);
      std::fill(in.get(), in.get() + real_size_, 0.0);
      for (std::size_t k = 0; k < dims_[2]; ++k)
        for (std::size_t j = 0; j < dims_[1]; ++j)
          for (std::size_t i = 0; i < dims_[0]; ++i)
            in[i + pad_[0] * (j + pad_[1] * k)] = field[i + dims_[0] * (j + dims_[1] * k)][c];
      fftw_execute_dft_r2c(forward_, in.get(), f[c].get());
    }
    auto prod = fftw_buffer<fftw_complex>(spec_size_);
    const double norm = 1.0 / static_cast<double>(real_size_);
    const Complex *kern = spectra_[n].data();
    for (int r = 0; r < 3; ++r)
    {
      for (std::size_t s = 0; s < spec_size_; ++s)
      {
        Complex acc = 0.0;
        for (int c = 0; c < 3; ++c)
          acc += kern[sym_index[r][c] * spec_size_ + s] * Complex(f[c][s][0], f[c][s][1]);
        prod[s][0] = acc.real();
        prod[s][1] = acc.imag();
      }
      fftw_execute_dft_c2r(backward_, prod.get(), in.get());
      for (std::size_t k = 0; k < dims_[2]; ++k)
        for (std::size_t j = 0; j < dims_[1]; ++j)
          for (std::size_t i = 0; i < dims_[0]; ++i)
            out[i + dims_[0] * (j + dims_[1] * k)][r] = in[i + pad_[0] * (j + pad_[1] * k)] * norm;
    }
  }

private:
  // Offset-table index along axis a -> padded position.
  std::size_t wrap(std::size_t t, int a) const
  {
    const auto d = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(dims_[a] - 1);
    return d >= 0 ? static_cast<std::size_t>(d) : static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pad_[a]) + d);
  }

  Index3 dims_;
  Index3 pad_{};
  std::size_t real_size_ = 0;
  std::size_t spec_size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<std::vector<Complex>> spectra_;
};

FidelityProblem::FidelityProblem(VoxelGrid grid, FrequencySet freqs, Medium medium, std::vector<RealField> targets,
                                 KernelPath path)
    : grid_(std::move(grid)), freqs_(std::move(freqs)), medium_(medium), targets_(std::move(targets)), path_(path)
{
  if (targets_.size() != freqs_.size())
    throw std::invalid_argument("FidelityProblem: need one target per frequency");
  for (const auto &t : targets_)
    require_grid(t, "FidelityProblem");

  const Index3 &d = grid_.dims();
  const std::size_t mx = 2 * d[0] - 1;
  const std::size_t my = 2 * d[1] - 1;
  const std::size_t mz = 2 * d[2] - 1;
  const double h = grid_.spacing();
  const double weight = medium_.epsilon0() / (2.0 * std::numbers::pi) * grid_.voxel_volume();

  tables_.resize(freqs_.size());
  for (std::size_t n = 0; n < freqs_.size(); ++n)
  {
    auto &tab = tables_[n];
    tab.resize(mx * my * mz);
    for (std::size_t k = 0; k < mz; ++k)
      for (std::size_t j = 0; j < my; ++j)
        for (std::size_t i = 0; i < mx; ++i)
        {
          const RVec3 off{h * (static_cast<double>(i) - static_cast<double>(d[0] - 1)),
                          h * (static_cast<double>(j) - static_cast<double>(d[1] - 1)),
                          h * (static_cast<double>(k) - static_cast<double>(d[2] - 1))};
          const RMat3 g = re_green_ee(off, freqs_[n], medium_);
          tab[i + mx * (j + my * k)] = {g(0, 0) * weight, g(0, 1) * weight, g(0, 2) * weight,
                                        g(1, 1) * weight, g(1, 2) * weight, g(2, 2) * weight};
        }
  }
  if (path_ == KernelPath::fft)
    fft_ = std::make_unique<FftEngine>(grid_, tables_);
}

FidelityProblem::~FidelityProblem() = default;
FidelityProblem::FidelityProblem(FidelityProblem &&) noexcept = default;
FidelityProblem &FidelityProblem::operator=(FidelityProblem &&) noexcept = default;

void FidelityProblem::require_grid(const RealField &field, const char *who) const
{
  if (!(field.grid() == grid_))
    throw std::invalid_argument(std::string(who) + ": field grid does not match the problem grid");
}

RealField FidelityProblem::apply_direct(std::size_t n, const RealField &field) const
{
  const Index3 &d = grid_.dims();
  const std::size_t mx = 2 * d[0] - 1;
  const std::size_t my = 2 * d[1] - 1;
  const auto &tab = tables_[n];
  RealField out(grid_);
  for (std::size_t ok = 0; ok < d[2]; ++ok)
    for (std::size_t oj = 0; oj < d[1]; ++oj)
      for (std::size_t oi = 0; oi < d[0]; ++oi)
      {
        double sx = 0.0, sy = 0.0, sz = 0.0;
        for (std::size_t vk = 0; vk < d[2]; ++vk)
          for (std::size_t vj = 0; vj < d[1]; ++vj)
          {
            const std::size_t row = (oj + d[1] - 1 - vj) * mx + (ok + d[2] - 1 - vk) * mx * my;
            const std::size_t vbase = d[0] * (vj + d[1] * vk);
            for (std::size_t vi = 0; vi < d[0]; ++vi)
            {
              const auto &k = tab[row + oi + d[0] - 1 - vi];
              const RVec3 &v = field[vbase + vi];
              sx += k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
              sy += k[1] * v[0] + k[3] * v[1] + k[4] * v[2];
              sz += k[2] * v[0] + k[4] * v[1] + k[5] * v[2];
            }
          }
        out[grid_.linear(oi, oj, ok)] = {sx, sy, sz};
      }
  return out;
}

RealField FidelityProblem::apply(std::size_t n, const RealField &field) const
{
  if (n >= freqs_.size())
    throw std::out_of_range("FidelityProblem::apply: frequency index out of range");
  require_grid(field, "FidelityProblem::apply");
  if (path_ == KernelPath::direct)
    return apply_direct(n, field);
  RealField out(grid_);
  fft_->apply(n, field, out);
  return out;
}

double FidelityProblem::fidelity(const RealField &field) const
{
  require_grid(field, "fidelity");
  double sum = 0.0;
  for (std::size_t n = 0; n < size(); ++n)
  {
    const RealField r = apply(n, field) - targets_[n];
    sum += inner(r, r);
  }
  return sum / (2.0 * static_cast<double>(size()));
}

double FidelityProblem::fidelity_and_gradient(const RealField &field, RealField &grad) const
{
  require_grid(field, "grad_fidelity");
  double sum = 0.0;
  grad = RealField(grid_);
  for (std::size_t n = 0; n < size(); ++n)
  {
    const RealField r = apply(n, field) - targets_[n];
    sum += inner(r, r);
    grad += apply(n, r);
  }
  grad *= 1.0 / static_cast<double>(size());
  return sum / (2.0 * static_cast<double>(size()));
}

RealField FidelityProblem::gradient(const RealField &field) const
{
  RealField g(grid_);
  fidelity_and_gradient(field, g);
  return g;
}

double FidelityProblem::lipschitz_estimate(std::size_t iterations, std::uint64_t seed) const
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  RealField v(grid_);
  for (auto &x : v.values())
    x = {gauss(rng), gauss(rng), gauss(rng)};
  v *= 1.0 / l2_norm(v);
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it)
  {
    RealField w(grid_);
    for (std::size_t n = 0; n < size(); ++n)
      w += apply(n, apply(n, v));
    w *= 1.0 / static_cast<double>(size());
    lambda = inner(v, w);
    const double nw = l2_norm(w);
    if (!(nw > 0.0))
      return 0.0;
    v = w * (1.0 / nw);
  }
  return lambda;
}

std::vector<RealField> fidelity_targets(const ImageStack &stack)
{
  std::vector<RealField> targets;
  targets.reserve(stack.per_freq.size());
  const double s = coincidence_sign();
  for (const auto &img : stack.per_freq)
    targets.push_back(real_part(img) * s);
  return targets;
}

RealField initial_guess(const FidelityProblem &problem, InitialGuess kind)
{
  RealField x(problem.grid());
  if (kind == InitialGuess::zero)
    return x;
  for (const auto &t : problem.targets())
    x += t;
  x *= 1.0 / static_cast<double>(problem.size());
  return x;
}

} // namespace emloc
