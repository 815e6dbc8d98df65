#include "hrl/rng.hpp"

#include <cmath>
#include <sstream>

namespace hrl {

std::uint64_t mix_seed(std::uint64_t x) {
  // splitmix64 finalizer (Steele, Lea, Flood 2014).
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::split(std::uint64_t tag) const {
  Rng copy = *this;
  const std::uint64_t base = copy.engine_();
  return Rng(mix_seed(base ^ mix_seed(tag)));
}

std::string Rng::serialize_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
}

}  // namespace hrl
