#include "dirlab/parallel.hpp"

namespace dirlab {

unsigned hardware_threads() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace dirlab
