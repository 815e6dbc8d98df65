#include <doctest.h>

#include <vector>

#include "hrl/kernels.hpp"
#include "hrl/rng.hpp"
#include "test_util.hpp"

using namespace hrl;

namespace {

// Sizes cover full SIMD lanes plus every remainder class.
const std::vector<size_t> kSizes = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 200, 201};

std::vector<real> random_buf(Rng& rng, size_t n) {
  std::vector<real> v(n);
  for (auto& x : v) x = static_cast<real>(rng.uniform(-2.0, 2.0));
  return v;
}

}  // namespace

TEST_CASE("matvec matches a triple-loop oracle") {
  Rng rng(11);
  const auto& k = kern::ops();
  for (size_t m : {1u, 3u, 8u, 17u}) {
    for (size_t n : {1u, 4u, 9u, 33u}) {
      const auto a = random_buf(rng, m * n);
      const auto x = random_buf(rng, n);
      std::vector<real> y(m, real(0));
      k.matvec(a.data(), x.data(), y.data(), m, n);
      for (size_t i = 0; i < m; ++i) {
        long double s = 0;
        for (size_t j = 0; j < n; ++j) s += static_cast<long double>(a[i * n + j]) * x[j];
        CHECK(testutil::rel_err(static_cast<double>(y[i]), static_cast<double>(s)) < 1e-12);
      }
    }
  }
}

TEST_CASE("avx2 variants agree with the scalar reference") {
  const kern::Ops* simd = kern::avx2_ops();
  if (simd == nullptr) {
    MESSAGE("avx2 unavailable on this machine; dispatch equivalence skipped");
    return;
  }
  const kern::Ops& ref = kern::scalar_ops();
  Rng rng(17);

  for (size_t n : kSizes) {
    const auto x = random_buf(rng, n);
    const auto y = random_buf(rng, n);

    CHECK(testutil::rel_err(simd->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n),
                            1e-12) < 1e-12);

    auto za = random_buf(rng, n);
    auto zb = za;
    simd->axpy(za.data(), real(0.37), x.data(), n);
    ref.axpy(zb.data(), real(0.37), x.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(testutil::rel_err(za[i], zb[i]) < 1e-12);

    std::vector<real> ca(n), cb(n);
    simd->vadd(ca.data(), x.data(), y.data(), n);
    ref.vadd(cb.data(), x.data(), y.data(), n);
    CHECK(ca == cb);

    simd->vmul(ca.data(), x.data(), y.data(), n);
    ref.vmul(cb.data(), x.data(), y.data(), n);
    CHECK(ca == cb);

    auto ma = random_buf(rng, n);
    auto mb = ma;
    simd->vmul_acc(ma.data(), x.data(), y.data(), n);
    ref.vmul_acc(mb.data(), x.data(), y.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(testutil::rel_err(ma[i], mb[i]) < 1e-12);
  }

  for (size_t m : {1u, 2u, 5u, 8u, 13u, 32u}) {
    for (size_t n : {1u, 3u, 8u, 21u, 64u}) {
      const auto a = random_buf(rng, m * n);
      const auto x = random_buf(rng, n);
      const auto v = random_buf(rng, m);

      std::vector<real> ya(m), yb(m);
      simd->matvec(a.data(), x.data(), ya.data(), m, n);
      ref.matvec(a.data(), x.data(), yb.data(), m, n);
      for (size_t i = 0; i < m; ++i) CHECK(testutil::rel_err(ya[i], yb[i]) < 1e-12);

      ya = random_buf(rng, m);
      yb = ya;
      simd->matvec_acc(a.data(), x.data(), ya.data(), m, n);
      ref.matvec_acc(a.data(), x.data(), yb.data(), m, n);
      for (size_t i = 0; i < m; ++i) CHECK(testutil::rel_err(ya[i], yb[i]) < 1e-12);

      auto ta = random_buf(rng, n);
      auto tb = ta;
      simd->matvec_t_acc(a.data(), v.data(), ta.data(), m, n);
      ref.matvec_t_acc(a.data(), v.data(), tb.data(), m, n);
      for (size_t i = 0; i < n; ++i) CHECK(testutil::rel_err(ta[i], tb[i]) < 1e-12);

      auto ga = random_buf(rng, m * n);
      auto gb = ga;
      simd->ger_acc(ga.data(), v.data(), x.data(), m, n);
      ref.ger_acc(gb.data(), v.data(), x.data(), m, n);
      for (size_t i = 0; i < m * n; ++i) CHECK(testutil::rel_err(ga[i], gb[i]) < 1e-12);
    }
  }
}

TEST_CASE("backend forcing") {
  kern::set_backend(kern::Backend::kScalar);
  CHECK(std::string(kern::active_backend_name()) == "scalar");
  kern::set_backend(kern::Backend::kAuto);
  if (kern::avx2_ops() != nullptr) {
    CHECK(std::string(kern::active_backend_name()) == "avx2");
  } else {
    CHECK(std::string(kern::active_backend_name()) == "scalar");
    CHECK_THROWS_AS(kern::set_backend(kern::Backend::kAvx2), DomainError);
  }
  kern::set_backend(kern::Backend::kAuto);
}
