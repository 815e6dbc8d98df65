#include "hrl/kernels.hpp"

#include <atomic>

#include "hrl/errors.hpp"

namespace hrl::kern {

const Ops* avx2_ops_table();  // defined in kernels_avx2.cpp

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve_best() {
  if (const Ops* t = avx2_ops()) return t;
  return &scalar_ops();
}

}  // namespace

const Ops* avx2_ops() {
  const Ops* t = avx2_ops_table();
  if (t == nullptr || !cpu_has_avx2_fma()) return nullptr;
  return t;
}

const Ops& ops() {
  const Ops* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = resolve_best();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_backend(Backend b) {
  switch (b) {
    case Backend::kAuto:
      g_active.store(resolve_best(), std::memory_order_release);
      return;
    case Backend::kScalar:
      g_active.store(&scalar_ops(), std::memory_order_release);
      return;
    case Backend::kAvx2: {
      const Ops* t = avx2_ops();
      if (t == nullptr) throw DomainError("kernel backend 'avx2' unavailable on this machine");
      g_active.store(t, std::memory_order_release);
      return;
    }
  }
}

Backend parse_backend(const std::string& name) {
  if (name == "auto") return Backend::kAuto;
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  throw DomainError("unknown kernel backend '" + name + "' (expected auto|scalar|avx2)");
}

const char* active_backend_name() { return ops().name; }

}  // namespace hrl::kern
