// Serial reference vs OpenMP episode kernels on the pyramid protocol.

#include <chrono>
#include <cstdlib>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nic/kernels.hpp"

namespace {

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Episode kernel benchmark"};
  int depth = 5;
  double bias = 0.7;
  std::uint64_t episodes = 1000000;
  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("--depth", depth)->check(CLI::Range(1, 20));
  app.add_option("--bias", bias)->check(CLI::Range(0.0, 1.0));
  app.add_option("--episodes", episodes);
  app.add_option("--seed", seed);
  app.add_option("--threads", threads);
  CLI11_PARSE(app, argc, argv);

  nic::set_worker_count(threads);
  const auto protocol = nic::PyramidProtocol::uniform(depth, nic::CellSpec::isotropic(bias));

  nic::EpisodeTally serial, parallel;
  const double ts = seconds([&] { serial = nic::run_pyramid_episodes(protocol, episodes, seed, nic::Execution::serial); });
  const double tp = seconds([&] { parallel = nic::run_pyramid_episodes(protocol, episodes, seed, nic::Execution::parallel); });

  fmt::print("depth={} bias={} episodes={} threads={}\n", depth, bias, episodes, omp_get_max_threads());
  fmt::print("serial   {:8.3f} s  {:10.0f} episodes/s\n", ts, static_cast<double>(episodes) / ts);
  fmt::print("parallel {:8.3f} s  {:10.0f} episodes/s  speedup {:.2f}x\n", tp, static_cast<double>(episodes) / tp, ts / tp);
  fmt::print("tallies identical: {}\n", serial == parallel ? "yes" : "NO");
  return serial == parallel ? EXIT_SUCCESS : EXIT_FAILURE;
}
