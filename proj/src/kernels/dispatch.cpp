#include <atomic>

#include "unmix/kernels.hpp"

namespace unmix::kernels {

#if defined(UNMIX_HAVE_AVX2)
const Backend& avx2_backend_table();  // kernels_avx2.cpp
#endif

const Backend* avx2_backend_if_supported() {
#if defined(UNMIX_HAVE_AVX2)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_backend_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const Backend* pick_default() {
  if (const Backend* avx2 = avx2_backend_if_supported()) return avx2;
  return &scalar_backend();
}

std::atomic<const Backend*>& active_slot() {
  static std::atomic<const Backend*> slot{pick_default()};
  return slot;
}

}  // namespace

const Backend& active() { return *active_slot().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
  if (name == "auto") {
    active_slot().store(pick_default(), std::memory_order_relaxed);
    return true;
  }
  if (name == "scalar") {
    active_slot().store(&scalar_backend(), std::memory_order_relaxed);
    return true;
  }
  if (name == "avx2") {
    if (const Backend* avx2 = avx2_backend_if_supported()) {
      active_slot().store(avx2, std::memory_order_relaxed);
      return true;
    }
    return false;
  }
  return false;
}

std::vector<const Backend*> available() {
  std::vector<const Backend*> out{&scalar_backend()};
  if (const Backend* avx2 = avx2_backend_if_supported()) out.push_back(avx2);
  return out;
}

}  // namespace unmix::kernels
