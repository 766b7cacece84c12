#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace lnq {

/// Runs `fn(items[i])` for every item on up to `workers` threads. Results
/// come back in item order whatever the scheduling, so reports assembled
/// from them are reproducible. The first failure in item order is rethrown
/// after all workers have stopped.
template <typename Item, typename Fn>
auto run_batch(const std::vector<Item>& items, int workers, Fn fn) {
  using Result = decltype(fn(items.front()));
  if (items.empty()) return std::vector<Result>{};
  std::vector<std::optional<Result>> results(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        results[i].emplace(fn(items[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min(static_cast<std::size_t>(std::max(workers, 1)), items.size());
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(items.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace lnq
