#pragma once

// Episode loops. Each kernel has a serial reference and an OpenMP variant;
// episode i always draws from RandomStream(seed, i), and tallies are integer
// sums, so both variants return identical results for any thread count.

#include <cstdint>
#include <ostream>
#include <vector>

#include <omp.h>

#include "nic/estimation.hpp"
#include "nic/rac_protocols.hpp"

namespace nic {

enum class Execution { serial, parallel };

struct EpisodeTally {
  std::vector<ContingencyTable> tables;  ///< one per query
  std::uint64_t episodes = 0;
  std::uint64_t successes = 0;
  std::uint64_t parity_violations = 0;

  explicit EpisodeTally(std::size_t queries = 0);

  void record(const EpisodeOutcome& outcome);
  EpisodeTally& operator+=(const EpisodeTally& other);
  bool operator==(const EpisodeTally&) const = default;
};

/// Runs `episode(i)` for i in [0, count) and tallies the outcomes.
/// `episode` must be safe to call concurrently for distinct i.
template <class EpisodeFn>
EpisodeTally tally_episodes(std::size_t queries, std::uint64_t count, EpisodeFn&& episode,
                            Execution exec = Execution::parallel) {
  EpisodeTally total(queries);
  if (exec == Execution::serial) {
    for (std::uint64_t i = 0; i < count; ++i) total.record(episode(i));
    return total;
  }
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel
  {
    EpisodeTally local(queries);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) local.record(episode(static_cast<std::uint64_t>(i)));
#pragma omp critical(nic_tally_merge)
    total += local;
  }
  return total;
}

/// Design B pyramid episodes: fresh uniform database and uniform query each
/// episode, fresh cell-bank draws each episode.
EpisodeTally run_pyramid_episodes(const PyramidProtocol& protocol, std::uint64_t episodes,
                                  std::uint64_t seed, Execution exec = Execution::parallel);

/// Copy-baseline episodes over N bits with an m-bit message.
EpisodeTally run_copy_episodes(std::size_t n, std::size_t m, std::uint64_t episodes,
                               std::uint64_t seed, Execution exec = Execution::parallel);

/// Episode `i` of run_pyramid_episodes, exposed for trace export and tests.
EpisodeOutcome pyramid_episode(const PyramidProtocol& protocol, std::uint64_t seed, std::uint64_t i);

/// JSON lines {seed, episode, query, target, output, success, errors} for the
/// first `count` pyramid episodes; errors are listed root first.
void write_pyramid_traces(std::ostream& out, const PyramidProtocol& protocol, std::uint64_t seed,
                          std::uint64_t count);

/// Sets the OpenMP worker count; 0 keeps the runtime default.
void set_worker_count(int workers);

}  // namespace nic
