#pragma once

#include <stdexcept>

namespace mecsim {

// Shared per-round resource budgets. remaining counts deplete as grants are
// made and reset to the totals at the start of every round.
struct ResourcePools {
  int comm_total = 80;
  int comp_total = 40;
  int comm_remaining = 80;
  int comp_remaining = 40;

  bool operator==(const ResourcePools&) const = default;
};

inline ResourcePools make_pools(int comm_total, int comp_total) {
  if (comm_total <= 0 || comp_total <= 0) {
    throw std::invalid_argument("make_pools: pool totals must be positive");
  }
  return {comm_total, comp_total, comm_total, comp_total};
}

}  // namespace mecsim
