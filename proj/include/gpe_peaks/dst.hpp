#ifndef GPE_PEAKS_DST_HPP
#define GPE_PEAKS_DST_HPP

#include <memory>

namespace gpe {

/// In-place unnormalised type-I discrete sine transform over every axis of a
/// dim-dimensional array of m^dim doubles (row-major). Applying it twice
/// multiplies by (2(m+1))^dim. Backed by FFTW; plans use FFTW_ESTIMATE so the
/// transform is bit-reproducible.
class SineTransform {
 public:
  SineTransform(int dim, int m);
  ~SineTransform();
  SineTransform(SineTransform&&) noexcept;
  SineTransform& operator=(SineTransform&&) noexcept;
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  double* data();
  void execute();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gpe

#endif  // GPE_PEAKS_DST_HPP
