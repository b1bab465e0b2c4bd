#pragma once

#include <cstdint>
#include <vector>

#include "lorawsn/simcore.hpp"

namespace lorawsn::sim {

struct Replication {
  std::uint64_t seed = 0;
  std::uint64_t tx_attempts = 0;
  std::uint64_t collided = 0;
  double conflict_ratio = 0.0;
  double mean_current_ua = 0.0;

  bool operator==(const Replication&) const = default;
};

// Runs `count` independent copies of the scenario with seeds base_seed + i.
// Each run is single-threaded; replications are spread over OpenMP threads.
std::vector<Replication> run_replications(const Scenario& scenario, int count, std::uint64_t base_seed);

// Same results, one after another. Reference for the parallel version.
std::vector<Replication> run_replications_serial(const Scenario& scenario, int count,
                                                 std::uint64_t base_seed);

struct ReplicationSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double pooled_ratio = 0.0;  // total collided / total attempts
};
ReplicationSummary summarize(const std::vector<Replication>& runs);

}  // namespace lorawsn::sim
