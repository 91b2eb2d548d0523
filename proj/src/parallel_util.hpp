#pragma once

#include <exception>
#include <mutex>

namespace fansmb::detail {

// Captures the first exception thrown inside an OpenMP region so it can be
// rethrown on the calling thread after the region ends.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!first_) first_ = std::current_exception();
    }
  }

  void rethrow() {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr first_;
};

}  // namespace fansmb::detail
