#ifndef NBSEL_PARALLEL_HPP
#define NBSEL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "nbsel/errors.hpp"

namespace nbsel {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Results must be
/// written by index so that the outcome does not depend on scheduling. If any
/// call throws, the failures are collected and rethrown once all work stops:
/// a single failure is rethrown as is, several are folded into one Error that
/// lists every failing index.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(workers < 1 ? 1 : workers));
  if (threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& thread : pool) thread.join();
  }

  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < count; ++i)
    if (failures[i]) failed.push_back(i);
  if (failed.empty()) return;
  if (failed.size() == 1) std::rethrow_exception(failures[failed.front()]);

  std::string message = "failures at indices";
  ErrorKind kind = ErrorKind::DomainError;
  for (std::size_t k = 0; k < failed.size(); ++k) {
    message += (k == 0 ? " " : ", ") + std::to_string(failed[k]);
    try {
      std::rethrow_exception(failures[failed[k]]);
    } catch (const Error& e) {
      if (k == 0) kind = e.kind();
      message += " (" + std::string(e.what()) + ")";
    } catch (const std::exception& e) {
      message += " (" + std::string(e.what()) + ")";
    }
  }
  throw Error(kind, message, static_cast<std::int64_t>(failed.front()));
}

}  // namespace nbsel

#endif  // NBSEL_PARALLEL_HPP
