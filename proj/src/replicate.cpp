#include "lorawsn/replicate.hpp"

#include <cmath>
#include <exception>

namespace lorawsn::sim {

namespace {

Replication run_one(Scenario scenario, std::uint64_t seed) {
  scenario.seed = seed;
  const ScenarioStats stats = run_scenario(scenario);
  Replication r;
  r.seed = seed;
  r.tx_attempts = stats.tx_attempts;
  r.collided = stats.collided;
  r.conflict_ratio = stats.conflict_ratio();
  double sum = 0.0;
  for (const NodeStats& n : stats.nodes) sum += n.average_current_ua();
  r.mean_current_ua = stats.nodes.empty() ? 0.0 : sum / static_cast<double>(stats.nodes.size());
  return r;
}

}  // namespace

std::vector<Replication> run_replications_serial(const Scenario& scenario, int count,
                                                 std::uint64_t base_seed) {
  std::vector<Replication> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out.push_back(run_one(scenario, base_seed + static_cast<std::uint64_t>(i)));
  return out;
}

std::vector<Replication> run_replications(const Scenario& scenario, int count, std::uint64_t base_seed) {
  std::vector<Replication> out(static_cast<std::size_t>(std::max(count, 0)));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_one(scenario, base_seed + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ReplicationSummary summarize(const std::vector<Replication>& runs) {
  ReplicationSummary s;
  if (runs.empty()) return s;
  std::uint64_t tx = 0, col = 0;
  for (const Replication& r : runs) {
    s.mean += r.conflict_ratio;
    tx += r.tx_attempts;
    col += r.collided;
  }
  s.mean /= static_cast<double>(runs.size());
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const Replication& r : runs) ss += (r.conflict_ratio - s.mean) * (r.conflict_ratio - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(runs.size() - 1));
  }
  s.pooled_ratio = tx == 0 ? 0.0 : static_cast<double>(col) / static_cast<double>(tx);
  return s;
}

}  // namespace lorawsn::sim
