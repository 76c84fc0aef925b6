#pragma once

// Resumable background job: a coroutine that co_yields between slices of
// work. resume() runs one slice; exceptions surface from resume().

#include <coroutine>
#include <exception>
#include <utility>

namespace dynseq {

class Stepper {
 public:
  struct promise_type {
    std::exception_ptr error;
    Stepper get_return_object() { return Stepper(std::coroutine_handle<promise_type>::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    std::suspend_always yield_value(int) noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { error = std::current_exception(); }
  };

  Stepper() = default;
  Stepper(Stepper&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Stepper& operator=(Stepper&& o) noexcept {
    if (this != &o) {
      reset();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;
  ~Stepper() { reset(); }

  bool valid() const { return static_cast<bool>(h_); }
  bool done() const { return !h_ || h_.done(); }

  /// Runs one slice; returns true once the job has finished.
  bool resume() {
    if (done()) return true;
    h_.resume();
    if (h_.promise().error) {
      auto e = h_.promise().error;
      h_.promise().error = nullptr;
      std::rethrow_exception(e);
    }
    return h_.done();
  }

  /// Runs to completion.
  void finish() {
    while (!resume()) {
    }
  }

 private:
  explicit Stepper(std::coroutine_handle<promise_type> h) : h_(h) {}
  void reset() {
    if (h_) h_.destroy();
    h_ = {};
  }

  std::coroutine_handle<promise_type> h_;
};

}  // namespace dynseq
