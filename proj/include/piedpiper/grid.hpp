#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "piedpiper/types.hpp"

namespace pp::grid {

using NodeId = std::uint32_t;
using Tick = std::int64_t;
using MsgId = std::uint64_t;

enum class MsgKind {
  CallForRescue,
  WorkRequest,
  FileTransfer,
  WorkResult,
  RewardSignal,
  OverrideCommand,
};

std::string to_string(MsgKind k);

enum class WorkerKind { Rat, Kid };

struct NodeRole {
  enum class Kind { Client, Mayor, Worker, Piper };
  Kind kind = Kind::Client;
  WorkerKind worker_kind = WorkerKind::Kid;  // meaningful for workers only
};

struct GridMessage {
  MsgId msg_id = 0;
  MsgKind kind = MsgKind::WorkRequest;
  NodeId src = 0;
  NodeId dst = 0;
  std::string payload;
  Tick send_time = 0;
};

struct LogEntry {
  Tick tick = 0;
  std::uint64_t seq = 0;
  MsgKind kind = MsgKind::WorkRequest;
  NodeId src = 0;
  NodeId dst = 0;
  MsgId msg_id = 0;
};

struct GridParams {
  std::size_t n_workers = 1;
  double rat_fraction = 0.0;
  std::size_t n_clients = 1;
  Tick latency_ticks = 1;
  std::uint64_t seed = 0;
};

/// Result payload decoded from a delivered WorkResult.
struct WorkerResult {
  int sensor_id = 0;
  bool contaminated = false;
  double statistic = 0.0;
};

WorkerResult parse_result_payload(const std::string& payload);

enum class RunOutcome { Idle, TickLimit };

/// Deterministic single-owner event simulator of the single-server grid:
/// clients split work into requests, the Mayor routes everything, workers
/// compute, and the Piper holds override authority. Not thread-safe by
/// contract; one logical owner drives it.
class GridSim {
 public:
  explicit GridSim(const GridParams& params);

  static constexpr NodeId kMayor = 0;
  static constexpr NodeId kPiper = 1;

  /// Splits a job into n_chunks WorkRequests from `client` to the Mayor;
  /// a FileTransfer with the full job payload goes first when non-empty.
  /// The job's '|'-separated pieces become the per-chunk data slices.
  /// Returns the WorkRequest msg_ids.
  std::vector<MsgId> submit_work(NodeId client, const std::string& job, std::size_t n_chunks);

  /// Delivers the earliest queued event and runs its handler. Throws
  /// QueueEmpty when nothing is pending.
  void step();

  /// Steps until the queue drains or the next delivery would pass max_ticks.
  RunOutcome run_until_idle(Tick max_ticks);

  // Mayor/Piper control traffic (validated source roles).
  void emit_reward_signal();
  void emit_call_for_rescue();
  void emit_override_command();

  /// Removes and returns the WorkResult payloads delivered to `client`.
  std::vector<std::string> take_results(NodeId client);

  bool idle() const { return queue_.empty(); }
  Tick clock() const { return clock_; }
  std::size_t n_nodes() const { return roles_.size(); }
  NodeRole role_of(NodeId id) const;
  const std::vector<NodeId>& client_ids() const { return clients_; }
  const std::vector<NodeId>& worker_ids() const { return workers_; }
  Tick worker_delay(NodeId worker) const;

  const std::vector<LogEntry>& log() const { return log_; }
  /// Line-delimited export, one delivered message per line:
  /// `tick seq kind src dst msg_id`.
  std::string log_text() const;
  std::uint64_t log_digest() const { return fnv1a64(log_text()); }

 private:
  struct PendingEvent {
    Tick deliver_time = 0;
    std::uint64_t seq = 0;
    GridMessage msg;
  };
  struct After {
    bool operator()(const PendingEvent& a, const PendingEvent& b) const {
      if (a.deliver_time != b.deliver_time) return a.deliver_time > b.deliver_time;
      return a.seq > b.seq;
    }
  };

  MsgId enqueue(MsgKind kind, NodeId src, NodeId dst, std::string payload, Tick extra_delay);
  void handle_delivery(const GridMessage& msg);

  std::vector<NodeRole> roles_;
  std::vector<NodeId> clients_;
  std::vector<NodeId> workers_;
  std::map<NodeId, Tick> compute_delay_;
  std::map<NodeId, std::vector<std::string>> pending_results_;
  std::map<NodeId, std::string> mayor_files_;
  std::priority_queue<PendingEvent, std::vector<PendingEvent>, After> queue_;
  std::vector<LogEntry> log_;
  Tick latency_ = 1;
  Tick clock_ = 0;
  MsgId next_msg_id_ = 0;
  std::uint64_t next_seq_ = 0;
  std::size_t round_robin_ = 0;
};

GridSim spawn_grid(std::size_t n_workers, double rat_fraction, std::size_t n_clients,
                   Tick latency_ticks, std::uint64_t seed);

}  // namespace pp::grid
