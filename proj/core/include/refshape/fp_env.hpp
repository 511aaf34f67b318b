#pragma once

#if defined(__SSE__) || defined(__x86_64__)
#include <xmmintrin.h>
#define REFSHAPE_HAVE_MXCSR 1
#endif

namespace refshape {

// Flushes subnormal results and inputs to zero while in scope. Adam moments of
// inactive ReLU units decay geometrically through the subnormal range, where
// x86 arithmetic is orders of magnitude slower. No-op off x86.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals() {
#ifdef REFSHAPE_HAVE_MXCSR
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | kFlushToZero | kDenormalsAreZero);
#endif
  }
  ~ScopedFlushDenormals() {
#ifdef REFSHAPE_HAVE_MXCSR
    _mm_setcsr(saved_);
#endif
  }
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
#ifdef REFSHAPE_HAVE_MXCSR
  static constexpr unsigned kFlushToZero = 0x8000;
  static constexpr unsigned kDenormalsAreZero = 0x0040;
  unsigned saved_ = 0;
#endif
};

}  // namespace refshape
