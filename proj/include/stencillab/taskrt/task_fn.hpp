#pragma once

#include <cstddef>
#include <new>
#include <type_traits>
#include <utility>

namespace stencillab::taskrt {

/// Allocation-free holder for small trivially copyable callables
/// (lambdas capturing a few pointers and integers).
class TaskFn {
 public:
  static constexpr std::size_t kCapacity = 48;

  TaskFn() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, TaskFn> && std::is_invocable_r_v<void, F&>)
  TaskFn(F f) {  // NOLINT(google-explicit-constructor)
    static_assert(std::is_trivially_copyable_v<F>, "task closures must be trivially copyable");
    static_assert(sizeof(F) <= kCapacity, "task closure too large");
    static_assert(alignof(F) <= alignof(std::max_align_t));
    ::new (static_cast<void*>(storage_)) F(f);
    invoke_ = [](void* p) { (*std::launder(static_cast<F*>(p)))(); };
  }

  void operator()() { invoke_(storage_); }
  explicit operator bool() const { return invoke_ != nullptr; }

 private:
  alignas(std::max_align_t) std::byte storage_[kCapacity]{};
  void (*invoke_)(void*) = nullptr;
};

}  // namespace stencillab::taskrt
