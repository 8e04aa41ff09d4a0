#include "spdtraj/parallel.hpp"

#include <cstdlib>
#include <string>

namespace spdtraj {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPDTRAJ_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace spdtraj
