#include "piedpiper/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "piedpiper/errors.hpp"

namespace pp::grid {

std::string to_string(MsgKind k) {
  switch (k) {
    case MsgKind::CallForRescue: return "CallForRescue";
    case MsgKind::WorkRequest: return "WorkRequest";
    case MsgKind::FileTransfer: return "FileTransfer";
    case MsgKind::WorkResult: return "WorkResult";
    case MsgKind::RewardSignal: return "RewardSignal";
    case MsgKind::OverrideCommand: return "OverrideCommand";
  }
  return "?";
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& payload) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    std::size_t end = payload.find(';', pos);
    if (end == std::string::npos) end = payload.size();
    const std::string field = payload.substr(pos, end - pos);
    const std::size_t eq = field.find('=');
    if (eq != std::string::npos) out[field.substr(0, eq)] = field.substr(eq + 1);
    pos = end + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Mean of the comma-separated numbers in `data`; non-numeric or empty
// slices yield 0. This is the work a Kid sensor performs.
double slice_mean(const std::string& data) {
  double sum = 0.0;
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find(',', pos);
    if (end == std::string::npos) end = data.size();
    const std::string tok = data.substr(pos, end - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size() && std::isfinite(v)) {
        sum += v;
        ++count;
      }
    } catch (const std::exception&) {
      // skip non-numeric tokens
    }
    pos = end + 1;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

WorkerResult parse_result_payload(const std::string& payload) {
  const auto kv = parse_kv(payload);
  WorkerResult r;
  auto sensor = kv.find("sensor");
  auto cont = kv.find("contaminated");
  auto stat = kv.find("stat");
  if (sensor == kv.end() || cont == kv.end() || stat == kv.end()) {
    throw InvalidArgument("parse_result_payload: missing field in '" + payload + "'");
  }
  r.sensor_id = std::stoi(sensor->second);
  r.contaminated = cont->second == "1";
  r.statistic = std::stod(stat->second);
  return r;
}

GridSim::GridSim(const GridParams& params) {
  if (params.n_workers < 1) throw InvalidArgument("spawn_grid: need at least one worker");
  if (params.n_clients < 1) throw InvalidArgument("spawn_grid: need at least one client");
  if (params.latency_ticks < 1) throw InvalidArgument("spawn_grid: latency must be >= 1 tick");
  if (!(params.rat_fraction >= 0.0 && params.rat_fraction <= 1.0)) {
    throw InvalidArgument("spawn_grid: rat_fraction must be in [0, 1]");
  }
  latency_ = params.latency_ticks;

  roles_.push_back({NodeRole::Kind::Mayor, WorkerKind::Kid});
  roles_.push_back({NodeRole::Kind::Piper, WorkerKind::Kid});
  for (std::size_t i = 0; i < params.n_clients; ++i) {
    clients_.push_back(static_cast<NodeId>(roles_.size()));
    roles_.push_back({NodeRole::Kind::Client, WorkerKind::Kid});
  }
  for (std::size_t i = 0; i < params.n_workers; ++i) {
    workers_.push_back(static_cast<NodeId>(roles_.size()));
    roles_.push_back({NodeRole::Kind::Worker, WorkerKind::Kid});
  }

  // Seeded rat assignment and per-worker compute delays.
  const std::size_t n_rats = static_cast<std::size_t>(
      std::llround(params.rat_fraction * static_cast<double>(params.n_workers)));
  Rng rng(Rng::mix(params.seed, 0x971d));
  std::vector<std::size_t> order(params.n_workers);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  for (std::size_t i = 0; i < n_rats; ++i) {
    roles_[workers_[order[i]]].worker_kind = WorkerKind::Rat;
  }
  for (NodeId w : workers_) {
    compute_delay_[w] = 1 + static_cast<Tick>(rng.below(3));
  }
}

GridSim spawn_grid(std::size_t n_workers, double rat_fraction, std::size_t n_clients,
                   Tick latency_ticks, std::uint64_t seed) {
  return GridSim({n_workers, rat_fraction, n_clients, latency_ticks, seed});
}

NodeRole GridSim::role_of(NodeId id) const {
  if (id >= roles_.size()) throw UnknownNode("node " + std::to_string(id) + " does not exist");
  return roles_[id];
}

Tick GridSim::worker_delay(NodeId worker) const {
  auto it = compute_delay_.find(worker);
  if (it == compute_delay_.end()) throw UnknownNode("not a worker node");
  return it->second;
}

MsgId GridSim::enqueue(MsgKind kind, NodeId src, NodeId dst, std::string payload,
                       Tick extra_delay) {
  if (kind == MsgKind::OverrideCommand && role_of(src).kind != NodeRole::Kind::Piper) {
    throw InvalidArgument("only the Piper may send OverrideCommand");
  }
  if ((kind == MsgKind::RewardSignal || kind == MsgKind::CallForRescue) &&
      role_of(src).kind != NodeRole::Kind::Mayor) {
    throw InvalidArgument("only the Mayor may send " + to_string(kind));
  }
  PendingEvent ev;
  ev.msg.msg_id = next_msg_id_++;
  ev.msg.kind = kind;
  ev.msg.src = src;
  ev.msg.dst = dst;
  ev.msg.payload = std::move(payload);
  ev.msg.send_time = clock_;
  // The Piper's command preempts in-flight traffic: zero transport delay.
  const Tick transit = kind == MsgKind::OverrideCommand ? 0 : latency_;
  ev.deliver_time = clock_ + transit + extra_delay;
  ev.seq = next_seq_++;
  queue_.push(std::move(ev));
  return next_msg_id_ - 1;
}

std::vector<MsgId> GridSim::submit_work(NodeId client, const std::string& job,
                                        std::size_t n_chunks) {
  if (role_of(client).kind != NodeRole::Kind::Client) {
    throw UnknownNode("submit_work: node " + std::to_string(client) + " is not a client");
  }
  if (n_chunks < 1) throw InvalidArgument("submit_work: need at least one chunk");

  std::vector<std::string> pieces;
  if (!job.empty()) {
    std::size_t pos = 0;
    while (true) {
      const std::size_t bar = job.find('|', pos);
      if (bar == std::string::npos) {
        pieces.push_back(job.substr(pos));
        break;
      }
      pieces.push_back(job.substr(pos, bar - pos));
      pos = bar + 1;
    }
    enqueue(MsgKind::FileTransfer, client, kMayor, job, 0);
  }

  std::vector<MsgId> ids;
  ids.reserve(n_chunks);
  for (std::size_t i = 0; i < n_chunks; ++i) {
    std::string data = i < pieces.size() ? pieces[i] : std::string();
    std::string payload = "client=" + std::to_string(client) + ";chunk=" + std::to_string(i) +
                          ";data=" + data;
    ids.push_back(enqueue(MsgKind::WorkRequest, client, kMayor, std::move(payload), 0));
  }
  return ids;
}

void GridSim::step() {
  if (queue_.empty()) throw QueueEmpty("step: no pending events");
  PendingEvent ev = queue_.top();
  queue_.pop();
  clock_ = ev.deliver_time;
  log_.push_back({ev.deliver_time, ev.seq, ev.msg.kind, ev.msg.src, ev.msg.dst, ev.msg.msg_id});
  handle_delivery(ev.msg);
}

void GridSim::handle_delivery(const GridMessage& msg) {
  const NodeRole role = role_of(msg.dst);
  switch (role.kind) {
    case NodeRole::Kind::Mayor:
      if (msg.kind == MsgKind::FileTransfer) {
        mayor_files_[msg.src] = msg.payload;
      } else if (msg.kind == MsgKind::WorkRequest) {
        const NodeId worker = workers_[round_robin_ % workers_.size()];
        ++round_robin_;
        enqueue(MsgKind::WorkRequest, kMayor, worker, msg.payload, 0);
      } else if (msg.kind == MsgKind::WorkResult) {
        const auto kv = parse_kv(msg.payload);
        auto it = kv.find("client");
        if (it == kv.end()) throw InvalidArgument("work result without originating client");
        enqueue(MsgKind::WorkResult, kMayor, static_cast<NodeId>(std::stoul(it->second)),
                msg.payload, 0);
      }
      break;
    case NodeRole::Kind::Worker: {
      if (msg.kind != MsgKind::WorkRequest) break;
      const auto kv = parse_kv(msg.payload);
      const std::string client = kv.count("client") ? kv.at("client") : "0";
      const std::string chunk = kv.count("chunk") ? kv.at("chunk") : "0";
      std::string result = "client=" + client + ";sensor=" + chunk;
      if (role.worker_kind == WorkerKind::Rat) {
        result += ";contaminated=1;stat=0";
      } else {
        const double stat = slice_mean(kv.count("data") ? kv.at("data") : "");
        result += ";contaminated=0;stat=" + fmt_double(stat);
      }
      enqueue(MsgKind::WorkResult, msg.dst, kMayor, std::move(result),
              compute_delay_.at(msg.dst));
      break;
    }
    case NodeRole::Kind::Client:
      if (msg.kind == MsgKind::WorkResult) pending_results_[msg.dst].push_back(msg.payload);
      break;
    case NodeRole::Kind::Piper:
      break;  // informational traffic only
  }
}

RunOutcome GridSim::run_until_idle(Tick max_ticks) {
  while (!queue_.empty()) {
    if (queue_.top().deliver_time > max_ticks) return RunOutcome::TickLimit;
    step();
  }
  return RunOutcome::Idle;
}

void GridSim::emit_reward_signal() {
  enqueue(MsgKind::RewardSignal, kMayor, kPiper, "", 0);
}

void GridSim::emit_call_for_rescue() {
  enqueue(MsgKind::CallForRescue, kMayor, kPiper, "", 0);
}

void GridSim::emit_override_command() {
  enqueue(MsgKind::OverrideCommand, kPiper, kMayor, "", 0);
}

std::vector<std::string> GridSim::take_results(NodeId client) {
  auto it = pending_results_.find(client);
  if (it == pending_results_.end()) return {};
  std::vector<std::string> out = std::move(it->second);
  pending_results_.erase(it);
  return out;
}

std::string GridSim::log_text() const {
  std::ostringstream os;
  for (const auto& e : log_) {
    os << e.tick << ' ' << e.seq << ' ' << to_string(e.kind) << ' ' << e.src << ' ' << e.dst
       << ' ' << e.msg_id << '\n';
  }
  return os.str();
}

}  // namespace pp::grid
