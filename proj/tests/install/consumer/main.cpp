#include <cmath>
#include <cstdio>

#include "cebound/cebound.hpp"

int main() {
  const cebound::BlockState s = cebound::two_level_pure_state(0.25);
  const double d = cebound::coherence_entropy(s);
  const double h = -0.25 * std::log(0.25) - 0.75 * std::log(0.75);
  std::printf("entropy %.17g\n", d);
  return std::abs(d - h) <= 1e-12 ? 0 : 1;
}
