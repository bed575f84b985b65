#include "evidentsel/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace evsel {
namespace {

// FFTW plan creation is not thread-safe; execution through the new-array
// interface is. Plans are cached per shape/direction and created with
// FFTW_UNALIGNED so they accept any caller buffer.
class PlanCache {
 public:
  fftw_plan get(int rank, Index n0, Index n1, int sign) {
    const Key key{rank, n0, n1, sign};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<fftw_complex> dummy(static_cast<std::size_t>(n0 * std::max<Index>(n1, 1)));
    fftw_plan plan = nullptr;
    if (rank == 1) {
      plan = fftw_plan_dft_1d(static_cast<int>(n0), dummy.data(), dummy.data(), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), dummy.data(),
                              dummy.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  using Key = std::tuple<int, Index, Index, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

CVec execute(const CVec& x, int rank, Index n0, Index n1, int sign) {
  CVec out(x.size());
  fftw_plan plan = cache().get(rank, n0, n1, sign);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(x.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

CVec dft_unnormalized(const CVec& x) {
  return execute(x, 1, x.size(), 1, FFTW_FORWARD);
}

CVec dft_unnormalized(const Vec& x) { return dft_unnormalized(CVec(x.cast<Complex>())); }

CVec dft2_unnormalized(const Vec& x, Index rows, Index cols) {
  return execute(CVec(x.cast<Complex>()), 2, rows, cols, FFTW_FORWARD);
}

CVec fft(const CVec& x) {
  return execute(x, 1, x.size(), 1, FFTW_FORWARD) / std::sqrt(static_cast<double>(x.size()));
}

CVec ifft(const CVec& x) {
  return execute(x, 1, x.size(), 1, FFTW_BACKWARD) / std::sqrt(static_cast<double>(x.size()));
}

CVec fft2(const CVec& x, Index rows, Index cols) {
  return execute(x, 2, rows, cols, FFTW_FORWARD) / std::sqrt(static_cast<double>(x.size()));
}

CVec ifft2(const CVec& x, Index rows, Index cols) {
  return execute(x, 2, rows, cols, FFTW_BACKWARD) / std::sqrt(static_cast<double>(x.size()));
}

CVec fft(const Vec& x) { return fft(CVec(x.cast<Complex>())); }

CVec fft2(const Vec& x, Index rows, Index cols) { return fft2(CVec(x.cast<Complex>()), rows, cols); }

Vec ifft_real(const CVec& x) { return ifft(x).real(); }

Vec ifft2_real(const CVec& x, Index rows, Index cols) { return ifft2(x, rows, cols).real(); }

}  // namespace evsel
