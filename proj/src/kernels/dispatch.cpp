#include <atomic>
#include <cstdlib>
#include <cstring>

#include "streetscope/kernels/kernels.hpp"

namespace streetscope::kernels {

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
  if (const char* env = std::getenv("STREETSCOPE_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2() && avx2_ops())
      return avx2_ops();
  }
  if (cpu_has_avx2() && avx2_ops()) return avx2_ops();
  return &scalar_ops();
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Ops& ops() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (!p) {
    p = pick_default();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

Isa active_isa() {
  return &ops() == &scalar_ops() ? Isa::scalar : Isa::avx2;
}

bool force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return true;
  }
  if (cpu_has_avx2() && avx2_ops()) {
    g_active.store(avx2_ops(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace streetscope::kernels
