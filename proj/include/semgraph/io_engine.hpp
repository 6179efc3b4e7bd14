/*
 * Copyright 2026 The semgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "semgraph/common.hpp"
#include "semgraph/graph_store.hpp"
#include "semgraph/io_stats.hpp"
#include "semgraph/page_cache.hpp"

namespace semgraph {

inline constexpr std::size_t kDefaultPageSize = 4096;
inline constexpr std::size_t kDefaultCacheBytes = std::size_t{64} << 20;

struct IoOptions {
  std::size_t page_size = kDefaultPageSize;
  std::size_t cache_bytes = kDefaultCacheBytes;
  // 0 services requests inline on the submitting thread.
  unsigned io_threads = 1;

  /// Defaults with SEMGRAPH_CACHE_BYTES applied when set.
  static IoOptions from_env() {
    IoOptions o;
    if (const char* s = std::getenv("SEMGRAPH_CACHE_BYTES"); s && *s) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(s, &end, 10);
      if (end && *end == '\0' && v > 0) o.cache_bytes = static_cast<std::size_t>(v);
    }
    return o;
  }
};

struct AdjacencyRequest {
  vertex_id vertex = 0;
  Direction dir = Direction::out;
  // Opaque to the I/O layer; the compute engine stores the requesting vertex.
  std::uint64_t tag = 0;
};

using AdjacencyList = std::vector<vertex_id>;

struct Completion {
  AdjacencyRequest request;
  std::shared_ptr<const AdjacencyList> list;
  std::exception_ptr error;
};

/// Receiver of completions. post() may be called from any I/O thread.
class CompletionSink {
 public:
  virtual ~CompletionSink() = default;
  virtual void post(Completion&& c) = 0;
};

/// A blocking FIFO of completions for callers that just want the stream.
class CompletionQueue final : public CompletionSink {
 public:
  void post(Completion&& c) override {
    {
      std::lock_guard lk(mu_);
      q_.push_back(std::move(c));
    }
    cv_.notify_one();
  }

  Completion pop() {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return !q_.empty(); });
    Completion c = std::move(q_.front());
    q_.pop_front();
    return c;
  }

  bool try_pop(Completion& out) {
    std::lock_guard lk(mu_);
    if (q_.empty()) return false;
    out = std::move(q_.front());
    q_.pop_front();
    return true;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Completion> q_;
};

/// Asynchronous adjacency reader backed by a shared page cache.
///
/// A batch is coalesced on (vertex, direction) and queued FIFO; I/O threads
/// assemble each list page by page through the cache and post one completion
/// per original request. Callers never see pages.
class IoEngine {
  struct Job {
    vertex_id vertex;
    Direction dir;
    std::vector<std::uint64_t> tags;
    CompletionSink* sink;
  };

 public:
  IoEngine(const GraphHandle& g, IoOptions opts = IoOptions::from_env())
      : graph_(g),
        opts_(opts),
        cache_(opts.page_size, std::max<std::size_t>(1, opts.cache_bytes / opts.page_size), stats_) {
    for (unsigned i = 0; i < opts_.io_threads; ++i) {
      threads_.emplace_back([this] { io_loop(); });
    }
  }
  IoEngine(const IoEngine&) = delete;
  IoEngine& operator=(const IoEngine&) = delete;

  ~IoEngine() {
    {
      std::lock_guard lk(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  const GraphHandle& graph() const { return graph_; }
  const IoOptions& options() const { return opts_; }
  PageCache& cache() { return cache_; }
  const PageCache& cache() const { return cache_; }
  AtomicIoStats& counters() { return stats_; }

  IoStats stats() const { return stats_.snapshot(); }

  /// Zeroes all counters; returns the snapshot taken just before.
  IoStats reset_stats() { return stats_.reset(); }

  /// Queues a batch. Each request completes exactly once on `sink`, in any
  /// order. Throws out_of_range_error before queueing anything if an id is bad.
  void submit(std::span<const AdjacencyRequest> batch, CompletionSink& sink) {
    const auto n = graph_.num_vertices();
    for (const auto& r : batch) {
      if (r.vertex >= n) {
        throw out_of_range_error("adjacency request for vertex " + std::to_string(r.vertex) +
                                 " out of range");
      }
    }
    std::vector<Job> jobs;
    jobs.reserve(batch.size());
    // Coalesce duplicates; keep first-occurrence order so the queue stays FIFO.
    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = batch[a];
      const auto& y = batch[b];
      return std::tie(x.vertex, x.dir) < std::tie(y.vertex, y.dir);
    });
    std::vector<std::size_t> job_of(batch.size());
    std::vector<std::size_t> first_pos;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& r = batch[order[k]];
      if (k > 0) {
        const auto& p = batch[order[k - 1]];
        if (p.vertex == r.vertex && effective(p.dir) == effective(r.dir)) {
          job_of[order[k]] = job_of[order[k - 1]];
          jobs[job_of[order[k]]].tags.push_back(r.tag);
          continue;
        }
      }
      job_of[order[k]] = jobs.size();
      first_pos.push_back(order[k]);
      jobs.push_back(Job{r.vertex, effective(r.dir), {r.tag}, &sink});
    }
    std::vector<std::size_t> job_order(jobs.size());
    for (std::size_t i = 0; i < job_order.size(); ++i) job_order[i] = i;
    std::sort(job_order.begin(), job_order.end(),
              [&](std::size_t a, std::size_t b) { return first_pos[a] < first_pos[b]; });

    if (threads_.empty()) {
      for (std::size_t j : job_order) run_job(jobs[j]);
      return;
    }
    {
      std::lock_guard lk(mu_);
      for (std::size_t j : job_order) queue_.push_back(std::move(jobs[j]));
    }
    cv_.notify_all();
  }

  /// Synchronous read through the cache.
  AdjacencyList read_adjacency(vertex_id v, Direction d) {
    if (v >= graph_.num_vertices()) throw out_of_range_error("vertex out of range");
    return assemble(v, effective(d));
  }

 private:
  Direction effective(Direction d) const {
    if (!graph_.directed() || d == Direction::both) return Direction::out;
    return d;
  }

  AdjacencyList assemble(vertex_id v, Direction d) {
    const auto& idx = graph_.index();
    const std::uint64_t deg = idx.degree(v, d);
    AdjacencyList out(deg);
    if (deg == 0) return out;
    const std::uint64_t begin = idx.offset(v, d);
    const std::uint64_t end = begin + deg * kEdgeBytes;
    const auto& file = graph_.adjacency_file(d);
    const std::uint32_t file_id = d == Direction::in ? 1 : 0;
    const std::size_t ps = cache_.page_size();
    std::size_t filled = 0;
    for (std::uint64_t page = begin / ps; page * ps < end; ++page) {
      auto pin = cache_.acquire({file_id, page}, [&](std::span<unsigned char> buf) {
        return file.read_at(page * ps, buf);
      });
      const auto bytes = pin.bytes();
      const std::uint64_t lo = std::max(begin, page * ps);
      const std::uint64_t hi = std::min(end, page * ps + ps);
      if (hi - page * ps > bytes.size()) throw io_error("adjacency file shorter than index");
      for (std::uint64_t off = lo; off < hi; off += kEdgeBytes) {
        out[filled++] = detail::load_le<std::uint64_t>(bytes.data() + (off - page * ps));
      }
    }
    return out;
  }

  void run_job(Job& job) {
    std::shared_ptr<const AdjacencyList> list;
    std::exception_ptr err;
    try {
      list = std::make_shared<const AdjacencyList>(assemble(job.vertex, job.dir));
    } catch (const std::exception& e) {
      err = std::make_exception_ptr(request_error(job.vertex, e.what()));
    }
    for (std::uint64_t tag : job.tags) {
      job.sink->post(Completion{AdjacencyRequest{job.vertex, job.dir, tag}, list, err});
    }
  }

  void io_loop() {
    for (;;) {
      Job job;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      run_job(job);
    }
  }

  const GraphHandle& graph_;
  IoOptions opts_;
  AtomicIoStats stats_;
  PageCache cache_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> queue_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace semgraph
