#include "mwjoin/machine.hpp"

#include <stdexcept>

namespace mwjoin {

MachineConfig default_config() { return MachineConfig{}; }

uint64_t effective_M(const MachineConfig& cfg, uint32_t tuple_width_bytes) {
  if (tuple_width_bytes == 0)
    throw std::invalid_argument("tuple width must be positive");
  uint64_t cap = cfg.onchip_bytes / tuple_width_bytes;
  if (cfg.double_buffered) cap /= 2;
  return cap;
}

} // namespace mwjoin
