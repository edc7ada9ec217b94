#include "isac/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace isac::fft {
namespace {

struct PlanKey {
  int n;
  int howmany;
  int stride;
  int dist;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // Planning touches the buffer, so plan on scratch memory with the same layout.
    std::vector<cplx> scratch(static_cast<std::size_t>(key.n - 1) * key.stride +
                              static_cast<std::size_t>(key.howmany - 1) * key.dist + 1);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    int n = key.n;
    fftw_plan plan = fftw_plan_many_dft(1, &n, key.howmany, buf, nullptr, key.stride, key.dist,
                                        buf, nullptr, key.stride, key.dist, key.sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<cplx> data, const PlanKey& key) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(key);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

int sign_of(Direction dir) { return dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

void transform(std::span<cplx> data, Direction dir) {
  run(data, {static_cast<int>(data.size()), 1, 1, static_cast<int>(data.size()), sign_of(dir)});
}

void transform_rows(std::span<cplx> data, std::size_t rows, std::size_t cols, Direction dir) {
  if (data.size() != rows * cols) throw DimensionMismatch("transform_rows: size mismatch");
  run(data, {static_cast<int>(cols), static_cast<int>(rows), 1, static_cast<int>(cols),
             sign_of(dir)});
}

void transform_cols(std::span<cplx> data, std::size_t rows, std::size_t cols, Direction dir) {
  if (data.size() != rows * cols) throw DimensionMismatch("transform_cols: size mismatch");
  run(data, {static_cast<int>(rows), static_cast<int>(cols), static_cast<int>(cols), 1,
             sign_of(dir)});
}

}  // namespace isac::fft
