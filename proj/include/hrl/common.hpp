#pragma once

#include <cstddef>
#include <cstdint>

namespace hrl {

#ifdef HRL_REAL_FLOAT
using real = float;
#else
using real = double;
#endif

using std::size_t;

}  // namespace hrl
