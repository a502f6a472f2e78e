#ifndef SALAB_MONTECARLO_HPP
#define SALAB_MONTECARLO_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "salab/problem.hpp"
#include "salab/rng.hpp"
#include "salab/schedule.hpp"

namespace salab {

/// Resolves a requested worker count; <= 0 means one per hardware thread.
inline int resolve_jobs(int jobs)
{
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs task(i) for i in [0, count) on `jobs` workers and returns the results in index order.
///
/// Tasks must not share mutable state. Because results land in their own slot and callers
/// aggregate in index order, the output does not depend on the worker count or scheduling.
/// The first exception (lowest index) is rethrown after all workers join.
template <typename Task>
auto run_replicas(std::size_t count, int jobs, Task&& task) -> std::vector<std::invoke_result_t<Task&, std::size_t>>
{
  using Result = std::invoke_result_t<Task&, std::size_t>;
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(task(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(resolve_jobs(jobs), static_cast<int>(std::max<std::size_t>(count, 1)))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Initial-state law: a fixed point or uniform on a box.
struct InitLaw {
  std::variant<State, Box> law;

  State sample(Rng& rng) const;
  int dim() const;
};

/// Generator seed for drawing a replica's initial state, disjoint from its noise stream.
inline std::uint64_t init_stream_seed(std::uint64_t replica_seed) { return derive_replica_seed(replica_seed, 0x1D17ULL); }

/// Block boundaries (length T) from n0 up to `horizon`, each block subsampled at `per_block`
/// evenly spaced indices; the trailing partial block is subsampled the same way and `horizon`
/// itself is always included. Sorted, unique, starts at n0.
std::vector<Index> checkpoint_indices(const StepSchedule& schedule, Index n0, double T, Index horizon,
                                      int per_block = 8);

/// Smallest n with t(n) - t(n0) >= duration, accumulated exactly as SaStepper does.
Index index_after_time(const StepSchedule& schedule, Index n0, double duration);

}  // namespace salab

#endif  // SALAB_MONTECARLO_HPP
