#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "nic/kernels.hpp"

using namespace nic;

TEST_CASE("serial and parallel tallies are identical") {
  const auto p = PyramidProtocol::uniform(4, CellSpec::isotropic(0.7));
  for (int threads : {1, 2, 4}) {
    set_worker_count(threads);
    const auto s = run_pyramid_episodes(p, 50000, 9, Execution::serial);
    const auto par = run_pyramid_episodes(p, 50000, 9, Execution::parallel);
    CHECK(s == par);
    CHECK(s.episodes == 50000);
    CHECK(s.parity_violations == 0);
  }
  set_worker_count(0);
  const auto a = run_copy_episodes(8, 3, 20000, 5, Execution::serial);
  const auto b = run_copy_episodes(8, 3, 20000, 5, Execution::parallel);
  CHECK(a == b);
}

TEST_CASE("episodes are addressable by index") {
  const auto p = PyramidProtocol::uniform(3, CellSpec::isotropic(0.6));
  EpisodeTally t(8);
  for (std::uint64_t i = 0; i < 1000; ++i) t.record(pyramid_episode(p, 21, i));
  CHECK(t == run_pyramid_episodes(p, 1000, 21, Execution::serial));
  std::uint64_t total = 0;
  for (const auto& table : t.tables) total += table.total();
  CHECK(total == 1000);
}

TEST_CASE("different seeds differ") {
  const auto p = PyramidProtocol::uniform(3, CellSpec::isotropic(0.6));
  CHECK_FALSE(run_pyramid_episodes(p, 2000, 1) == run_pyramid_episodes(p, 2000, 2));
}

TEST_CASE("trace export") {
  const auto p = PyramidProtocol::uniform(2, CellSpec::isotropic(0.5));
  std::ostringstream out;
  write_pyramid_traces(out, p, 3, 5);
  std::istringstream in(out.str());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("episode") == count);
    CHECK(j.at("errors").size() == 2);
    const auto ep = pyramid_episode(p, 3, static_cast<std::uint64_t>(count));
    CHECK(j.at("output") == ep.output);
    ++count;
  }
  CHECK(count == 5);
}
