#include "interaction.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

namespace nanopair::cda {

CMat3 green_tensor(const Vec3& r_nm, double k) {
  const double r = r_nm.norm();
  const Vec3 n = r_nm / r;
  const cplx ikr = kI * (k * r);
  const cplx phase = std::exp(ikr) / (r * r * r);
  const double kr2 = k * k * r * r;
  const cplx diag = phase * (kr2 + ikr - 1.0);
  const cplx outer = phase * (3.0 - 3.0 * ikr - kr2);
  return diag * CMat3::Identity() + outer * (n * n.transpose()).cast<cplx>();
}

namespace detail {

namespace {

// Plan creation in FFTW is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool smooth(int n) {
  for (int p : {2, 3, 5, 7})
    while (n % p == 0) n /= p;
  return n == 1;
}

int fft_size(int min_size) {
  int n = std::max(min_size, 1);
  while (!smooth(n)) ++n;
  return n;
}

class DirectInteraction final : public InteractionOperator {
 public:
  DirectInteraction(const LatticeGeometry& lattice, double k) : lattice_(lattice), k_(k) {}

  void apply(std::span<const cplx> in, std::span<cplx> out) override {
    const std::size_t n = lattice_.size();
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t j = 0; j < n; ++j) {
      const CVec3 pj(in[3 * j], in[3 * j + 1], in[3 * j + 2]);
      for (std::size_t m = j + 1; m < n; ++m) {
        const CMat3 g = green_tensor(lattice_.positions_nm[j] - lattice_.positions_nm[m], k_);
        const CVec3 pm(in[3 * m], in[3 * m + 1], in[3 * m + 2]);
        const CVec3 to_j = g * pm;
        const CVec3 to_m = g * pj;  // G is even in r and symmetric
        for (int c = 0; c < 3; ++c) {
          out[3 * j + c] += to_j[c];
          out[3 * m + c] += to_m[c];
        }
      }
    }
  }

 private:
  const LatticeGeometry& lattice_;
  double k_;
};

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer make_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  std::fill_n(reinterpret_cast<cplx*>(p), n, cplx{});
  return FftwBuffer(p);
}

// Block-Toeplitz product embedded in a circulant of size >= 2n-1 per axis.
class FftInteraction final : public InteractionOperator {
 public:
  FftInteraction(const LatticeGeometry& lattice, double k) : lattice_(lattice) {
    for (int axis = 0; axis < 3; ++axis) m_[axis] = fft_size(2 * lattice.dims[axis] - 1);
    total_ = static_cast<std::size_t>(m_[0]) * m_[1] * m_[2];
    for (auto& w : work_) w = make_buffer(total_);
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward_ = fftw_plan_dft_3d(m_[0], m_[1], m_[2], work_[0].get(), work_[0].get(),
                                  FFTW_FORWARD, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_3d(m_[0], m_[1], m_[2], work_[0].get(), work_[0].get(),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    build_kernel(k);
    site_index_.reserve(lattice.size());
    for (const auto& c : lattice.cells) site_index_.push_back(index(c[0], c[1], c[2]));
  }

  ~FftInteraction() override {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  FftInteraction(const FftInteraction&) = delete;
  FftInteraction& operator=(const FftInteraction&) = delete;

  void apply(std::span<const cplx> in, std::span<cplx> out) override {
    std::array<cplx*, 3> w;
    for (int c = 0; c < 3; ++c) {
      w[c] = reinterpret_cast<cplx*>(work_[c].get());
      std::fill_n(w[c], total_, cplx{});
    }
    for (std::size_t s = 0; s < site_index_.size(); ++s)
      for (int c = 0; c < 3; ++c) w[c][site_index_[s]] = in[3 * s + c];
    for (int c = 0; c < 3; ++c) fftw_execute_dft(forward_, work_[c].get(), work_[c].get());

    std::array<const cplx*, 6> g;
    for (int q = 0; q < 6; ++q) g[q] = reinterpret_cast<const cplx*>(kernel_[q].get());
    for (std::size_t q = 0; q < total_; ++q) {
      const cplx x = w[0][q], y = w[1][q], z = w[2][q];
      w[0][q] = g[0][q] * x + g[1][q] * y + g[2][q] * z;
      w[1][q] = g[1][q] * x + g[3][q] * y + g[4][q] * z;
      w[2][q] = g[2][q] * x + g[4][q] * y + g[5][q] * z;
    }
    for (int c = 0; c < 3; ++c) fftw_execute_dft(backward_, work_[c].get(), work_[c].get());

    const double scale = 1.0 / static_cast<double>(total_);
    for (std::size_t s = 0; s < site_index_.size(); ++s)
      for (int c = 0; c < 3; ++c) out[3 * s + c] = w[c][site_index_[s]] * scale;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    auto wrap = [](int v, int m) { return v < 0 ? v + m : v; };
    return (static_cast<std::size_t>(wrap(i, m_[0])) * m_[1] + wrap(j, m_[1])) * m_[2] +
           wrap(k, m_[2]);
  }

  void build_kernel(double k) {
    const auto& d = lattice_.dims;
    const double a = lattice_.spacing_nm;
    for (auto& g : kernel_) g = make_buffer(total_);
    constexpr int rows[6] = {0, 0, 0, 1, 1, 2};
    constexpr int cols[6] = {0, 1, 2, 1, 2, 2};
    for (int i = -(d[0] - 1); i <= d[0] - 1; ++i)
      for (int j = -(d[1] - 1); j <= d[1] - 1; ++j)
        for (int l = -(d[2] - 1); l <= d[2] - 1; ++l) {
          if (i == 0 && j == 0 && l == 0) continue;
          const CMat3 g = green_tensor(Vec3(i * a, j * a, l * a), k);
          const std::size_t idx = index(i, j, l);
          for (int q = 0; q < 6; ++q)
            reinterpret_cast<cplx*>(kernel_[q].get())[idx] = g(rows[q], cols[q]);
        }
    for (auto& g : kernel_) fftw_execute_dft(forward_, g.get(), g.get());
  }

  const LatticeGeometry& lattice_;
  std::array<int, 3> m_{};
  std::size_t total_ = 0;
  std::array<FftwBuffer, 6> kernel_;  // xx xy xz yy yz zz
  std::array<FftwBuffer, 3> work_;
  std::vector<std::size_t> site_index_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

std::unique_ptr<InteractionOperator> make_interaction(const LatticeGeometry& lattice,
                                                      double wavenumber, GreenBackend backend) {
  if (backend == GreenBackend::Auto) {
    backend = lattice.size() <= 400 ? GreenBackend::Direct : GreenBackend::Fft;
  }
  if (backend == GreenBackend::Direct) return std::make_unique<DirectInteraction>(lattice, wavenumber);
  return std::make_unique<FftInteraction>(lattice, wavenumber);
}

}  // namespace detail
}  // namespace nanopair::cda
