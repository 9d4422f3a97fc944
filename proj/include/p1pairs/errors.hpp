#pragma once

#include <atomic>
#include <stdexcept>
#include <string>

namespace p1pairs {

/// The degree window is too small for a certified answer; regenerate with a
/// wider one.
struct WindowTooNarrow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotLocallyFree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentDims : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hilbert polynomials failed to add up through a kernel/image/cokernel.
struct ChiAdditivityError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Internal contract violated; always a bug.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Process-wide count of failed Euler characteristic checks.
std::atomic<long>& chi_failures();

}  // namespace p1pairs
