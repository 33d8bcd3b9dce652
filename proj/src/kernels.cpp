#include "nic/kernels.hpp"

#include <json.hpp>

namespace nic {

EpisodeTally::EpisodeTally(std::size_t queries) : tables(queries) {
  for (std::size_t k = 0; k < queries; ++k) tables[k].query = static_cast<std::uint32_t>(k);
}

void EpisodeTally::record(const EpisodeOutcome& outcome) {
  ++episodes;
  successes += outcome.success ? 1 : 0;
  if (!outcome.path_errors.empty() && !outcome.parity_consistent()) ++parity_violations;
  tables.at(outcome.query).add(outcome.target, outcome.output);
}

EpisodeTally& EpisodeTally::operator+=(const EpisodeTally& other) {
  episodes += other.episodes;
  successes += other.successes;
  parity_violations += other.parity_violations;
  for (std::size_t k = 0; k < tables.size(); ++k) tables[k] += other.tables[k];
  return *this;
}

EpisodeOutcome pyramid_episode(const PyramidProtocol& protocol, std::uint64_t seed, std::uint64_t i) {
  RandomStream rng(seed, i);
  const Database db = Database::random(protocol.leaves(), rng);
  const auto query = static_cast<std::uint32_t>(rng.below(protocol.leaves()));
  return run_pyramid(protocol, db, query, rng);
}

EpisodeTally run_pyramid_episodes(const PyramidProtocol& protocol, std::uint64_t episodes,
                                  std::uint64_t seed, Execution exec) {
  return tally_episodes(
      protocol.leaves(), episodes,
      [&](std::uint64_t i) { return pyramid_episode(protocol, seed, i); }, exec);
}

EpisodeTally run_copy_episodes(std::size_t n, std::size_t m, std::uint64_t episodes,
                               std::uint64_t seed, Execution exec) {
  if (m > n) throw std::invalid_argument("copy width m exceeds N");
  return tally_episodes(
      n, episodes,
      [&](std::uint64_t i) {
        RandomStream rng(seed, i);
        const Database db = Database::random(n, rng);
        const auto query = static_cast<std::uint32_t>(rng.below(n));
        return baseline_copy_protocol(n, m, db, query, rng);
      },
      exec);
}

void write_pyramid_traces(std::ostream& out, const PyramidProtocol& protocol, std::uint64_t seed,
                          std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) {
    const EpisodeOutcome o = pyramid_episode(protocol, seed, i);
    nlohmann::json line = {{"seed", seed},         {"episode", i},
                           {"query", o.query},     {"target", o.target},
                           {"output", o.output},   {"success", o.success},
                           {"errors", o.path_errors}};
    out << line.dump() << '\n';
  }
}

void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

}  // namespace nic
