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
#include <atomic>
#include <concepts>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semgraph/common.hpp"
#include "semgraph/frontier.hpp"
#include "semgraph/graph_store.hpp"
#include "semgraph/io_engine.hpp"
#include "semgraph/io_stats.hpp"
#include "semgraph/reduction.hpp"

namespace semgraph {

enum class Mode : std::uint8_t { sync, async };

inline const char* to_string(Mode m) { return m == Mode::sync ? "sync" : "async"; }

/// Upper bound on a message payload.
inline constexpr std::size_t kMaxPayloadBytes = 64;

/// Slack allowed above a program's declared per-vertex state bound.
inline constexpr std::size_t kStateSlackBytes = 4096;

struct RunOptions {
  unsigned workers = 1;
  Mode mode = Mode::sync;
  // 0 selects the default cap of 10 * n supersteps (at least 16).
  std::uint64_t superstep_cap = 0;
  // Adjacency bytes a worker may have requested but not yet consumed.
  std::size_t io_budget_bytes = std::size_t{1} << 20;

  /// Defaults with SEMGRAPH_WORKERS applied when set.
  static RunOptions from_env() {
    RunOptions o;
    if (const char* s = std::getenv("SEMGRAPH_WORKERS"); s && *s) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(s, &end, 10);
      if (end && *end == '\0' && v > 0) o.workers = static_cast<unsigned>(v);
    }
    return o;
  }
};

struct MemoryReport {
  // Frontier bitsets, message storage, program state, in-flight adjacency
  // data and program-declared transient buffers, at their high-water mark.
  std::size_t engine_peak_bytes = 0;
  std::size_t program_state_bytes = 0;
  std::size_t cache_peak_bytes = 0;
};

struct RunResult {
  std::uint64_t supersteps = 0;
  IoStats stats;
  MemoryReport memory;
};

/// Initial active set for a run.
struct Activation {
  bool all = false;
  std::vector<vertex_id> vertices;

  static Activation none() { return {}; }
  static Activation all_vertices() { return {true, {}}; }
  static Activation of(std::vector<vertex_id> vs) { return {false, std::move(vs)}; }
};

/// Message-free programs use this as their message_type.
struct NoMessage {};

class MemoryMeter {
 public:
  void add(std::int64_t delta) {
    const std::int64_t now = current_.fetch_add(delta, std::memory_order_relaxed) + delta;
    std::int64_t peak = peak_.load(std::memory_order_relaxed);
    while (now > peak && !peak_.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
    }
  }
  std::size_t current() const { return static_cast<std::size_t>(std::max<std::int64_t>(0, current_.load())); }
  std::size_t peak() const { return static_cast<std::size_t>(std::max<std::int64_t>(0, peak_.load())); }

 private:
  std::atomic<std::int64_t> current_{0};
  std::atomic<std::int64_t> peak_{0};
};

namespace detail {

struct ReductionEntry {
  ReduceOp op;
  double dval;
  std::int64_t ival;
};

using ReductionMap = std::unordered_map<std::uint64_t, ReductionEntry>;

inline void contribute(ReductionMap& m, std::uint64_t key, ReduceOp op, double d, std::int64_t i,
                       bool is_int) {
  auto [it, inserted] = m.try_emplace(
      key, ReductionEntry{op, reduce_identity<double>(op), reduce_identity<std::int64_t>(op)});
  if (!inserted && it->second.op != op) {
    throw error("reduction key " + std::to_string(key) + " used with two operators");
  }
  if (is_int) it->second.ival = reduce_apply(op, it->second.ival, i);
  else it->second.dval = reduce_apply(op, it->second.dval, d);
}

// Reusable barrier; the last thread to arrive runs `completion` before
// anyone is released.
class PhaseBarrier {
 public:
  explicit PhaseBarrier(unsigned parties) : parties_(parties) {}

  template <typename F>
  void arrive_and_wait(F&& completion) {
    std::unique_lock lk(mu_);
    const std::uint64_t gen = generation_;
    if (++arrived_ == parties_) {
      completion();
      arrived_ = 0;
      ++generation_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lk, [&] { return generation_ != gen; });
  }
  void arrive_and_wait() {
    arrive_and_wait([] {});
  }

 private:
  unsigned parties_;
  unsigned arrived_ = 0;
  std::uint64_t generation_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace detail

/// View handed to a program's end_superstep hook. Runs on one thread while
/// every worker is parked at the barrier.
class BarrierContext {
 public:
  BarrierContext(std::uint64_t superstep, std::uint64_t n, const detail::ReductionMap& results,
                 Frontier& frontier, IoEngine& io, std::uint64_t queued_messages)
      : superstep_(superstep),
        n_(n),
        results_(results),
        frontier_(frontier),
        io_(io),
        queued_(queued_messages) {}

  /// Index of the superstep that just finished (0-based).
  std::uint64_t superstep() const { return superstep_; }
  std::uint64_t num_vertices() const { return n_; }
  IoEngine& io() { return io_; }

  double reduced(std::uint64_t key, ReduceOp op) const {
    auto it = results_.find(key);
    return it == results_.end() ? reduce_identity<double>(op) : it->second.dval;
  }
  std::int64_t reduced_int(std::uint64_t key, ReduceOp op) const {
    auto it = results_.find(key);
    return it == results_.end() ? reduce_identity<std::int64_t>(op) : it->second.ival;
  }

  void activate(vertex_id v) {
    if (v >= n_) throw out_of_range_error("activate: vertex out of range");
    frontier_.activate(v);
  }
  void activate_all() {
    for (vertex_id v = 0; v < n_; ++v) frontier_.activate(v);
  }
  std::size_t next_frontier_size() const { return frontier_.next().count(); }
  /// True when the run would end at this barrier unless something is activated.
  bool idle() const { return queued_ == 0 && frontier_.next().count() == 0; }

  /// Ends the run after this barrier regardless of pending activity.
  void stop() { stop_ = true; }
  bool stop_requested() const { return stop_; }

 private:
  std::uint64_t superstep_;
  std::uint64_t n_;
  const detail::ReductionMap& results_;
  Frontier& frontier_;
  IoEngine& io_;
  std::uint64_t queued_;
  bool stop_ = false;
};

template <class P>
concept VertexProgram = requires {
  typename P::message_type;
} && std::is_trivially_copyable_v<typename P::message_type> &&
    (sizeof(typename P::message_type) <= kMaxPayloadBytes);

template <class P>
concept CombiningProgram =
    VertexProgram<P> && requires(typename P::message_type& a, const typename P::message_type& b) {
      P::combine(a, b);
    };

template <class P>
concept LanedProgram = requires(const P& p) {
  { p.lanes() } -> std::convertible_to<std::size_t>;
};

template <class P>
concept BarrierHookProgram = requires(P& p, BarrierContext& b) { p.end_superstep(b); };

template <class P>
concept StateReportingProgram = requires(const P& p) {
  { p.state_bytes() } -> std::convertible_to<std::size_t>;
  { p.state_bytes_per_vertex() } -> std::convertible_to<std::size_t>;
};

namespace detail {
template <class P>
class Run;
}

/// Per-worker handle passed to program callbacks.
template <class P>
class Context {
  using M = typename P::message_type;

 public:
  /// Vertex whose callback is running.
  vertex_id self() const { return self_; }
  std::uint64_t superstep() const;
  std::uint64_t num_vertices() const;
  const GraphHandle& graph() const;
  unsigned worker() const { return worker_; }
  Mode mode() const;

  /// Requests `owner`'s adjacency list; delivered to on_adjacency of self().
  void request(vertex_id owner, Direction d);
  void request(Direction d) { request(self_, d); }

  void send(vertex_id dst, const M& m, std::uint32_t lane = 0);
  void multicast(std::span<const vertex_id> dsts, const M& m, std::uint32_t lane = 0);

  /// Marks v active for the next superstep (idempotent).
  void activate(vertex_id v);

  void reduce(std::uint64_t key, ReduceOp op, double value);
  void reduce_int(std::uint64_t key, ReduceOp op, std::int64_t value);
  /// Fold of the previous superstep's contributions (the operator's identity
  /// if there were none). Not-ready while this worker holds an unfolded
  /// contribution to the same key.
  double reduced(std::uint64_t key, ReduceOp op) const;
  std::int64_t reduced_int(std::uint64_t key, ReduceOp op) const;

  /// Accounts program-held buffers (e.g. a cached adjacency list). Held
  /// bytes count against the worker's I/O budget, so no new vertex is
  /// activated while they fill it.
  void track_transient(std::int64_t delta_bytes);

 private:
  friend class detail::Run<P>;
  detail::Run<P>* run_ = nullptr;
  unsigned worker_ = 0;
  vertex_id self_ = 0;
  bool delivering_ = false;
};

namespace detail {

template <class P>
class Run {
  using M = typename P::message_type;
  static constexpr bool kCombining = CombiningProgram<P>;
  static constexpr std::size_t kLockStripes = 1024;

  struct Envelope {
    vertex_id dst;
    vertex_id src;
    std::uint32_t lane;
    M msg;
  };

  struct Inbox {
    std::mutex mu;
    std::vector<Envelope> items;
  };

  struct Worker final : CompletionSink {
    Run* run = nullptr;
    unsigned id = 0;
    vertex_id lo = 0;
    vertex_id hi = 0;
    Context<P> ctx;

    std::mutex mu;
    std::condition_variable cv;
    std::deque<Completion> completions;                         // guarded by mu
    std::vector<std::pair<vertex_id, std::uint32_t>> notices;  // guarded by mu (async slots)
    std::atomic<std::uint64_t> mail{0};                          // async envelopes waiting

    std::vector<AdjacencyRequest> deferred;
    std::uint64_t deferred_bytes = 0;
    std::uint64_t outstanding_bytes = 0;
    std::int64_t transient_bytes = 0;  // program-held buffers
    std::size_t outstanding = 0;
    std::deque<vertex_id> work;
    ReductionMap reductions;

    void post(Completion&& c) override {
      {
        std::lock_guard lk(mu);
        completions.push_back(std::move(c));
      }
      cv.notify_one();
    }
  };

 public:
  Run(IoEngine& io, P& prog, const RunOptions& opts)
      : io_(io),
        prog_(prog),
        opts_(opts),
        n_(io.graph().num_vertices()),
        workers_count_(std::max(1u, opts.workers)),
        frontier_(n_),
        barrier_(workers_count_),
        stats_(io.counters()) {
    if constexpr (LanedProgram<P>) lanes_ = std::max<std::size_t>(1, prog.lanes());
    cap_ = opts.superstep_cap ? opts.superstep_cap : std::max<std::uint64_t>(16, 10 * n_);
    chunk_ = n_ == 0 ? 1 : (n_ + workers_count_ - 1) / workers_count_;
    workers_.reserve(workers_count_);
    for (unsigned w = 0; w < workers_count_; ++w) {
      auto wk = std::make_unique<Worker>();
      wk->run = this;
      wk->id = w;
      wk->lo = std::min<vertex_id>(n_, std::uint64_t{w} * chunk_);
      wk->hi = std::min<vertex_id>(n_, std::uint64_t{w + 1} * chunk_);
      wk->ctx.run_ = this;
      wk->ctx.worker_ = w;
      workers_.push_back(std::move(wk));
    }
    if constexpr (kCombining) {
      slots_.resize(n_ * lanes_);
      slot_bits_ = AtomicBitset(n_ * lanes_);
      slot_locks_ = std::make_unique<std::mutex[]>(kLockStripes);
      meter_.add(static_cast<std::int64_t>(slots_.capacity() * sizeof(M) + slot_bits_.memory_bytes()));
    } else {
      inboxes_ = std::make_unique<Inbox[]>(std::size_t{workers_count_} * workers_count_);
    }
    meter_.add(static_cast<std::int64_t>(frontier_.memory_bytes()));
  }

  RunResult execute(const Activation& init) {
    const IoStats before = stats_.snapshot();
    if (init.all) {
      for (vertex_id v = 0; v < n_; ++v) frontier_.current().set(v);
    } else {
      for (vertex_id v : init.vertices) {
        if (v >= n_) throw out_of_range_error("initial activation out of range");
        frontier_.current().set(v);
      }
    }
    account_program_state();
    pending_.store(static_cast<std::int64_t>(frontier_.current().count()));

    std::vector<std::thread> threads;
    for (unsigned w = 1; w < workers_count_; ++w) {
      threads.emplace_back([this, w] { worker_main(*workers_[w]); });
    }
    worker_main(*workers_[0]);
    for (auto& t : threads) t.join();

    if (failure_) std::rethrow_exception(failure_);

    RunResult r;
    r.supersteps = supersteps_;
    const IoStats after = stats_.snapshot();
    r.stats.bytes_read_from_disk = after.bytes_read_from_disk - before.bytes_read_from_disk;
    r.stats.read_requests_issued = after.read_requests_issued - before.read_requests_issued;
    r.stats.cache_accesses = after.cache_accesses - before.cache_accesses;
    r.stats.cache_hits = after.cache_hits - before.cache_hits;
    r.stats.messages_point_to_point = after.messages_point_to_point - before.messages_point_to_point;
    r.stats.messages_multicast = after.messages_multicast - before.messages_multicast;
    r.stats.barrier_count = after.barrier_count - before.barrier_count;
    r.memory.engine_peak_bytes = meter_.peak();
    r.memory.program_state_bytes = program_state_bytes_;
    r.memory.cache_peak_bytes = io_.cache().peak_resident_bytes();
    return r;
  }

  // ---- Context plumbing -------------------------------------------------

  std::uint64_t superstep() const { return supersteps_; }
  std::uint64_t num_vertices() const { return n_; }
  const GraphHandle& graph() const { return io_.graph(); }
  Mode mode() const { return opts_.mode; }

  void request(Worker& w, vertex_id owner, Direction d) {
    if (owner >= n_) throw out_of_range_error("request: vertex " + std::to_string(owner) + " out of range");
    const std::uint64_t bytes = list_bytes(owner, d);
    w.deferred.push_back(AdjacencyRequest{owner, d, w.ctx.self_});
    w.deferred_bytes += bytes;
    meter_.add(static_cast<std::int64_t>(bytes + sizeof(AdjacencyRequest)));
    if (opts_.mode == Mode::async) pending_.fetch_add(1);
  }

  void send(Worker& w, vertex_id dst, const M& m, std::uint32_t lane, bool multicast_part) {
    if (dst >= n_) throw out_of_range_error("send: destination " + std::to_string(dst) + " out of range");
    if (lane >= lanes_) throw error("send: lane out of range");
    if (w.ctx.delivering_ && opts_.mode == Mode::sync) {
      throw error("sync mode: on_message may not send; send from on_activate or on_adjacency");
    }
    if (!multicast_part) stats_.messages_point_to_point.fetch_add(1, std::memory_order_relaxed);
    deposit(w, dst, m, lane);
  }

  void multicast(Worker& w, std::span<const vertex_id> dsts, const M& m, std::uint32_t lane) {
    for (vertex_id d : dsts) {
      if (d >= n_) throw out_of_range_error("multicast: destination out of range");
    }
    stats_.messages_multicast.fetch_add(1, std::memory_order_relaxed);
    for (vertex_id d : dsts) send(w, d, m, lane, true);
  }

  void activate(vertex_id v) {
    if (v >= n_) throw out_of_range_error("activate: vertex out of range");
    frontier_.activate(v);
  }

  double reduced(const Worker& w, std::uint64_t key, ReduceOp op) const {
    if (w.reductions.count(key)) throw not_ready_error("reduction result read before barrier");
    auto it = results_.find(key);
    return it == results_.end() ? reduce_identity<double>(op) : it->second.dval;
  }
  std::int64_t reduced_int(const Worker& w, std::uint64_t key, ReduceOp op) const {
    if (w.reductions.count(key)) throw not_ready_error("reduction result read before barrier");
    auto it = results_.find(key);
    return it == results_.end() ? reduce_identity<std::int64_t>(op) : it->second.ival;
  }

  void track_transient(Worker& w, std::int64_t delta) {
    w.transient_bytes += delta;
    meter_.add(delta);
  }

  Worker& worker_of(const Context<P>& c) { return *workers_[c.worker_]; }

 private:
  unsigned owner(vertex_id v) const { return static_cast<unsigned>(v / chunk_); }

  std::uint64_t list_bytes(vertex_id v, Direction d) const {
    return std::uint64_t{io_.graph().index().degree(v, d == Direction::both ? Direction::out : d)} *
           kEdgeBytes;
  }

  Inbox& inbox(unsigned dst_worker, unsigned src_worker) {
    return inboxes_[std::size_t{dst_worker} * workers_count_ + src_worker];
  }

  void deposit(Worker& from, vertex_id dst, const M& m, std::uint32_t lane) {
    const unsigned ow = owner(dst);
    if constexpr (kCombining) {
      const std::size_t idx = dst * lanes_ + lane;
      bool fresh = false;
      {
        std::lock_guard lk(slot_locks_[idx % kLockStripes]);
        if (!slot_bits_.test(idx)) {
          slots_[idx] = m;
          slot_bits_.set(idx);
          fresh = true;
        } else {
          P::combine(slots_[idx], m);
        }
      }
      if (fresh) {
        queued_messages_.fetch_add(1);
        if (opts_.mode == Mode::async) {
          pending_.fetch_add(1);
          Worker& to = *workers_[ow];
          {
            std::lock_guard lk(to.mu);
            to.notices.emplace_back(dst, lane);
          }
          to.cv.notify_one();
        }
      }
    } else {
      {
        Inbox& ib = inbox(ow, from.id);
        std::lock_guard lk(ib.mu);
        ib.items.push_back(Envelope{dst, from.ctx.self_, lane, m});
      }
      meter_.add(static_cast<std::int64_t>(sizeof(Envelope)));
      queued_messages_.fetch_add(1);
      if (opts_.mode == Mode::async) {
        pending_.fetch_add(1);
        Worker& to = *workers_[ow];
        to.mail.fetch_add(1);
        {
          std::lock_guard lk(to.mu);
        }
        to.cv.notify_one();
      }
    }
  }

  // ---- worker side ------------------------------------------------------

  void worker_main(Worker& w) {
    for (;;) {
      if (opts_.mode == Mode::sync) {
        guarded(w, [&] { deliver_sync(w); });
        barrier_.arrive_and_wait();
      }
      guarded(w, [&] {
        if (opts_.mode == Mode::sync) compute_sync(w);
        else compute_async(w);
      });
      drain_outstanding(w);
      barrier_.arrive_and_wait([this] { on_barrier(); });
      if (finished_) return;
    }
  }

  template <typename F>
  void guarded(Worker& w, F&& f) {
    if (abort_.load()) return;
    try {
      f();
    } catch (...) {
      fail(std::current_exception());
    }
    (void)w;
  }

  void fail(std::exception_ptr e) {
    {
      std::lock_guard lk(failure_mu_);
      if (!failure_) failure_ = e;
    }
    abort_.store(true);
    wake_all();
  }

  void wake_all() {
    for (auto& wk : workers_) {
      {
        std::lock_guard lk(wk->mu);
      }
      wk->cv.notify_all();
    }
  }

  void begin_callback(Worker& w, vertex_id v, bool delivering) {
    w.ctx.self_ = v;
    w.ctx.delivering_ = delivering;
  }

  void deliver_one_sync(Worker& w, vertex_id v, std::uint32_t lane, const M& m) {
    begin_callback(w, v, true);
    prog_.on_message(v, lane, m, w.ctx);
    w.ctx.delivering_ = false;
    frontier_.current().set(v);
  }

  void deliver_sync(Worker& w) {
    if constexpr (kCombining) {
      const std::size_t lo = w.lo * lanes_;
      const std::size_t hi = w.hi * lanes_;
      for (std::size_t idx = slot_bits_.next_set(lo, hi); idx < hi; idx = slot_bits_.next_set(idx + 1, hi)) {
        const M m = slots_[idx];
        slot_bits_.reset(idx);
        queued_messages_.fetch_sub(1);
        deliver_one_sync(w, idx / lanes_, static_cast<std::uint32_t>(idx % lanes_), m);
      }
    } else {
      std::vector<Envelope> batch;
      for (unsigned src = 0; src < workers_count_; ++src) {
        batch.clear();
        {
          Inbox& ib = inbox(w.id, src);
          std::lock_guard lk(ib.mu);
          batch.swap(ib.items);
        }
        queued_messages_.fetch_sub(batch.size());
        for (const Envelope& e : batch) {
          meter_.add(-static_cast<std::int64_t>(sizeof(Envelope)));
          deliver_one_sync(w, e.dst, e.lane, e.msg);
        }
      }
    }
  }

  bool over_budget(const Worker& w) const {
    const std::uint64_t held = w.transient_bytes > 0 ? static_cast<std::uint64_t>(w.transient_bytes) : 0;
    return w.outstanding_bytes + w.deferred_bytes + held >= opts_.io_budget_bytes;
  }

  // Submits deferred requests that fit the budget; always lets one through
  // when nothing is outstanding so oversized lists still make progress.
  bool flush(Worker& w) {
    if (w.deferred.empty()) return false;
    std::vector<AdjacencyRequest> batch;
    std::size_t taken = 0;
    std::uint64_t bytes = 0;
    for (; taken < w.deferred.size(); ++taken) {
      const auto& r = w.deferred[taken];
      const std::uint64_t b = list_bytes(r.vertex, r.dir);
      if (w.outstanding + batch.size() > 0 && w.outstanding_bytes + bytes + b > opts_.io_budget_bytes) break;
      bytes += b;
      batch.push_back(r);
    }
    if (batch.empty()) return false;
    w.deferred.erase(w.deferred.begin(), w.deferred.begin() + static_cast<std::ptrdiff_t>(taken));
    w.deferred_bytes -= bytes;
    w.outstanding += batch.size();
    w.outstanding_bytes += bytes;
    io_.submit(batch, w);
    return true;
  }

  bool process_completions(Worker& w) {
    std::deque<Completion> local;
    {
      std::lock_guard lk(w.mu);
      local.swap(w.completions);
    }
    if (local.empty()) return false;
    while (!local.empty()) {
      Completion c = std::move(local.front());
      local.pop_front();
      const std::uint64_t bytes = list_bytes(c.request.vertex, c.request.dir);
      --w.outstanding;
      w.outstanding_bytes -= bytes;
      if (c.error) {
        meter_.add(-static_cast<std::int64_t>(bytes + sizeof(AdjacencyRequest)));
        std::rethrow_exception(c.error);
      }
      begin_callback(w, c.request.tag, false);
      prog_.on_adjacency(c.request.tag, c.request.vertex, c.request.dir,
                         std::span<const vertex_id>(*c.list), w.ctx);
      meter_.add(-static_cast<std::int64_t>(bytes + sizeof(AdjacencyRequest)));
      if (opts_.mode == Mode::async) finish_unit();
    }
    return true;
  }

  void wait_for_input(Worker& w, bool async) {
    std::unique_lock lk(w.mu);
    w.cv.wait(lk, [&] {
      if (abort_.load() || !w.completions.empty()) return true;
      if (async) return !w.notices.empty() || w.mail.load() > 0 || pending_.load() == 0;
      return false;
    });
  }

  void compute_sync(Worker& w) {
    auto& cur = frontier_.current();
    vertex_id cursor = w.lo;
    for (;;) {
      if (abort_.load()) return;
      bool progress = process_completions(w);
      progress |= flush(w);
      while (cursor < w.hi && !over_budget(w)) {
        const vertex_id v = cur.next_set(cursor, w.hi);
        cursor = v + 1;
        if (v >= w.hi) {
          cursor = w.hi;
          break;
        }
        begin_callback(w, v, false);
        prog_.on_activate(v, w.ctx);
        progress = true;
      }
      progress |= flush(w);
      if (cursor >= w.hi && w.outstanding == 0 && w.deferred.empty()) return;
      if (!progress) wait_for_input(w, false);
    }
  }

  void finish_unit() {
    if (pending_.fetch_sub(1) == 1) wake_all();
  }

  void enqueue_async(Worker& w, vertex_id v) {
    if (frontier_.current().set(v)) {
      pending_.fetch_add(1);
      w.work.push_back(v);
    }
  }

  bool deliver_async(Worker& w) {
    bool progress = false;
    if constexpr (kCombining) {
      std::vector<std::pair<vertex_id, std::uint32_t>> notes;
      {
        std::lock_guard lk(w.mu);
        notes.swap(w.notices);
      }
      for (auto [v, lane] : notes) {
        const std::size_t idx = v * lanes_ + lane;
        M m;
        {
          std::lock_guard lk(slot_locks_[idx % kLockStripes]);
          m = slots_[idx];
          slot_bits_.reset(idx);
        }
        queued_messages_.fetch_sub(1);
        begin_callback(w, v, true);
        prog_.on_message(v, lane, m, w.ctx);
        w.ctx.delivering_ = false;
        enqueue_async(w, v);
        finish_unit();
        progress = true;
      }
    } else {
      if (w.mail.load() == 0) return false;
      std::vector<Envelope> batch;
      for (unsigned src = 0; src < workers_count_; ++src) {
        batch.clear();
        {
          Inbox& ib = inbox(w.id, src);
          std::lock_guard lk(ib.mu);
          batch.swap(ib.items);
        }
        w.mail.fetch_sub(batch.size());
        queued_messages_.fetch_sub(batch.size());
        for (const Envelope& e : batch) {
          meter_.add(-static_cast<std::int64_t>(sizeof(Envelope)));
          begin_callback(w, e.dst, true);
          prog_.on_message(e.dst, e.lane, e.msg, w.ctx);
          w.ctx.delivering_ = false;
          enqueue_async(w, e.dst);
          finish_unit();
          progress = true;
        }
      }
    }
    return progress;
  }

  void compute_async(Worker& w) {
    auto& cur = frontier_.current();
    w.work.clear();
    for (vertex_id v = cur.next_set(w.lo, w.hi); v < w.hi; v = cur.next_set(v + 1, w.hi)) {
      w.work.push_back(v);
    }
    bool messages_first = true;
    for (;;) {
      if (abort_.load()) return;
      bool progress = false;
      // Alternate which input is served first so neither starves.
      if (messages_first) {
        progress |= deliver_async(w);
        progress |= process_completions(w);
      } else {
        progress |= process_completions(w);
        progress |= deliver_async(w);
      }
      messages_first = !messages_first;
      progress |= flush(w);
      while (!w.work.empty() && !over_budget(w)) {
        const vertex_id v = w.work.front();
        w.work.pop_front();
        cur.reset(v);
        begin_callback(w, v, false);
        prog_.on_activate(v, w.ctx);
        finish_unit();
        progress = true;
      }
      progress |= flush(w);
      if (pending_.load() == 0) return;
      if (!progress) wait_for_input(w, true);
    }
  }

  // After an abort, wait for in-flight completions so no I/O thread posts
  // into a destroyed worker.
  void drain_outstanding(Worker& w) {
    if (!abort_.load()) return;
    while (w.outstanding > 0) {
      std::unique_lock lk(w.mu);
      w.cv.wait(lk, [&] { return !w.completions.empty(); });
      while (!w.completions.empty()) {
        w.completions.pop_front();
        --w.outstanding;
      }
    }
  }

  void account_program_state() {
    if constexpr (StateReportingProgram<P>) {
      const std::size_t now = prog_.state_bytes();
      meter_.add(static_cast<std::int64_t>(now) - static_cast<std::int64_t>(program_state_bytes_));
      program_state_bytes_ = now;
      const std::size_t bound = prog_.state_bytes_per_vertex() * n_ + kStateSlackBytes;
      if (now > bound) {
        throw memory_contract_error("program state " + std::to_string(now) +
                                    " bytes exceeds declared bound of " + std::to_string(bound));
      }
    }
  }

  // Runs on the last thread to reach the end-of-superstep barrier.
  void on_barrier() {
    try {
      ++supersteps_;
      stats_.barrier_count.fetch_add(1, std::memory_order_relaxed);
      if (abort_.load()) {
        finished_ = true;
        return;
      }
      ReductionMap folded;
      for (auto& wk : workers_) {
        for (auto& [key, e] : wk->reductions) {
          auto [it, inserted] = folded.try_emplace(key, e);
          if (!inserted) {
            it->second.dval = reduce_apply(e.op, it->second.dval, e.dval);
            it->second.ival = reduce_apply(e.op, it->second.ival, e.ival);
          }
        }
        wk->reductions.clear();
      }
      // Only this superstep's contributions are visible after the barrier.
      results_ = std::move(folded);

      bool stop = false;
      if constexpr (BarrierHookProgram<P>) {
        BarrierContext b(supersteps_ - 1, n_, results_, frontier_, io_, queued_messages_.load());
        prog_.end_superstep(b);
        stop = b.stop_requested();
      }
      account_program_state();

      frontier_.advance();
      const bool idle = frontier_.current().count() == 0 && queued_messages_.load() == 0;
      if (stop || idle) {
        finished_ = true;
        return;
      }
      if (supersteps_ >= cap_) {
        throw superstep_cap_error("superstep cap of " + std::to_string(cap_) + " exceeded");
      }
      pending_.store(static_cast<std::int64_t>(frontier_.current().count()));
    } catch (...) {
      {
        std::lock_guard lk(failure_mu_);
        if (!failure_) failure_ = std::current_exception();
      }
      abort_.store(true);
      finished_ = true;
    }
  }

  IoEngine& io_;
  P& prog_;
  RunOptions opts_;
  std::uint64_t n_;
  unsigned workers_count_;
  std::uint64_t chunk_ = 1;
  std::size_t lanes_ = 1;
  std::uint64_t cap_ = 0;
  Frontier frontier_;
  PhaseBarrier barrier_;
  AtomicIoStats& stats_;
  std::vector<std::unique_ptr<Worker>> workers_;

  std::vector<M> slots_;
  AtomicBitset slot_bits_;
  std::unique_ptr<std::mutex[]> slot_locks_;
  std::unique_ptr<Inbox[]> inboxes_;

  ReductionMap results_;
  std::atomic<std::uint64_t> queued_messages_{0};
  std::atomic<std::int64_t> pending_{0};
  std::uint64_t supersteps_ = 0;
  bool finished_ = false;
  std::size_t program_state_bytes_ = 0;
  MemoryMeter meter_;

  std::atomic<bool> abort_{false};
  std::mutex failure_mu_;
  std::exception_ptr failure_;
};

}  // namespace detail

// ---- Context definitions ----------------------------------------------------

template <class P>
std::uint64_t Context<P>::superstep() const {
  return run_->superstep();
}
template <class P>
std::uint64_t Context<P>::num_vertices() const {
  return run_->num_vertices();
}
template <class P>
const GraphHandle& Context<P>::graph() const {
  return run_->graph();
}
template <class P>
Mode Context<P>::mode() const {
  return run_->mode();
}
template <class P>
void Context<P>::request(vertex_id owner, Direction d) {
  run_->request(run_->worker_of(*this), owner, d);
}
template <class P>
void Context<P>::send(vertex_id dst, const M& m, std::uint32_t lane) {
  run_->send(run_->worker_of(*this), dst, m, lane, false);
}
template <class P>
void Context<P>::multicast(std::span<const vertex_id> dsts, const M& m, std::uint32_t lane) {
  run_->multicast(run_->worker_of(*this), dsts, m, lane);
}
template <class P>
void Context<P>::activate(vertex_id v) {
  run_->activate(v);
}
template <class P>
void Context<P>::reduce(std::uint64_t key, ReduceOp op, double value) {
  detail::contribute(run_->worker_of(*this).reductions, key, op, value, 0, false);
}
template <class P>
void Context<P>::reduce_int(std::uint64_t key, ReduceOp op, std::int64_t value) {
  detail::contribute(run_->worker_of(*this).reductions, key, op, 0.0, value, true);
}
template <class P>
double Context<P>::reduced(std::uint64_t key, ReduceOp op) const {
  return run_->reduced(run_->worker_of(*this), key, op);
}
template <class P>
std::int64_t Context<P>::reduced_int(std::uint64_t key, ReduceOp op) const {
  return run_->reduced_int(run_->worker_of(*this), key, op);
}
template <class P>
void Context<P>::track_transient(std::int64_t delta_bytes) {
  run_->track_transient(run_->worker_of(*this), delta_bytes);
}

/// Executes `program` over the graph behind `io` until no vertex is active,
/// no message is queued and no I/O is outstanding.
///
/// Sync mode: messages sent in superstep t are delivered (on_message) at the
/// start of t+1 and activate their destination for t+1; a barrier separates
/// supersteps. Async mode: messages are delivered as soon as the owning
/// worker dequeues them and the destination runs again in the same superstep.
template <VertexProgram P>
RunResult run(IoEngine& io, P& program, const Activation& initial, const RunOptions& opts = {}) {
  if (opts.workers == 0) throw error("run: workers must be >= 1");
  detail::Run<P> r(io, program, opts);
  return r.execute(initial);
}

}  // namespace semgraph
