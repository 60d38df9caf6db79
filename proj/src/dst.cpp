#include "gpe_peaks/dst.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace gpe {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct SineTransform::Impl {
  double* buffer = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buffer) fftw_free(buffer);
  }
};

SineTransform::SineTransform(int dim, int m) : impl_(std::make_unique<Impl>()) {
  if (dim < 1 || dim > 3 || m < 1) throw std::invalid_argument("bad sine transform shape");
  std::size_t count = 1;
  int n[3];
  fftw_r2r_kind kinds[3];
  for (int a = 0; a < dim; ++a) {
    count *= static_cast<std::size_t>(m);
    n[a] = m;
    kinds[a] = FFTW_RODFT00;
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->buffer = static_cast<double*>(fftw_malloc(sizeof(double) * count));
  if (!impl_->buffer) throw std::bad_alloc();
  impl_->plan = fftw_plan_r2r(dim, n, impl_->buffer, impl_->buffer, kinds, FFTW_ESTIMATE);
  if (!impl_->plan) throw std::runtime_error("FFTW could not plan the sine transform");
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

double* SineTransform::data() { return impl_->buffer; }

void SineTransform::execute() { fftw_execute(impl_->plan); }

}  // namespace gpe
