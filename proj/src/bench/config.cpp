#include "stencillab/bench.hpp"

namespace stencillab {

void BenchConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("--dim must be 2 or 3");
  if (stencil_dim(kind) != dim) {
    throw ConfigError(std::string(to_string(kind)) + " is a " +
                      std::to_string(stencil_dim(kind)) + "D stencil but --dim is " +
                      std::to_string(dim));
  }
  if (sizes.empty()) throw ConfigError("no mesh size given");
  for (int n : sizes)
    if (n < 1) throw ConfigError("mesh size must be at least 1");
  if (threads.empty()) throw ConfigError("no thread count given");
  for (unsigned t : threads)
    if (t < 1) throw ConfigError("thread count must be at least 1");
  if (chunk < 1) throw ConfigError("--chunk must be at least 1");
  if (sweeps < 1) throw ConfigError("--sweeps must be at least 1");
  if (reps < 1) throw ConfigError("--reps must be at least 1");
  if (schedule.kind == taskrt::Schedule::Kind::Dynamic && schedule.chunk < 1) {
    throw ConfigError("dynamic schedule chunk must be at least 1");
  }
}

std::size_t BenchPoint::cell_updates() const {
  std::size_t cells = 1;
  for (int a = 0; a < dim; ++a) cells *= static_cast<std::size_t>(n);
  return cells * sweeps;
}

}  // namespace stencillab
