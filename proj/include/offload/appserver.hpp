#ifndef OFFLOAD_APPSERVER_HPP_
#define OFFLOAD_APPSERVER_HPP_

#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "offload/clock.hpp"
#include "offload/common.hpp"
#include "offload/protocol.hpp"
#include "offload/task.hpp"
#include "offload/vmpool.hpp"

namespace offload::appserver {

struct ServerOptions {
  bool restricted = false;  // refuse bundle transfers for tasks not in the registry
  std::string primary_config = "main";
  bool run_parts_concurrently = false;  // wall-clock mode may thread the fan-out
};

// Usable heap of a clone. The primary context runs with the configuration's
// default heap; a dedicated secondary is provisioned with its heap raised to
// the VM's full memory (the client asks for a high heap when delegating).
inline double usable_heap_mb(const vmpool::VmConfig& config, bool dedicated) {
  return static_cast<double>(dedicated ? config.memory_mb : config.heap_mb);
}

// Memory guard for the simulated clones: a task whose declared peak demand
// strictly exceeds the usable heap cannot run there. Demand exactly equal to
// the heap proceeds.
inline bool memory_exhausted(const task::TaskBundle& bundle, const Bytes& input,
                             const vmpool::VmConfig& config, bool dedicated = false) {
  return bundle.peak_memory_mb(input) > usable_heap_mb(config, dedicated);
}

// Cloud-side handler for one client connection: bundle negotiation, pings,
// execution with OOM escalation and parallel fan-out.
class AppServer {
 public:
  AppServer(task::TaskRegistry& registry, vmpool::VmPool& pool, Clock& clock,
            ServerOptions options = {})
      : registry_(&registry), pool_(&pool), clock_(&clock), options_(options) {
    primary_config_ = *vmpool::find_config(options_.primary_config);
  }

  struct Session {
    std::set<protocol::TaskRef> installed;
    int escalations_total = 0;
  };

  std::unique_ptr<Session> open_session() { return std::make_unique<Session>(); }

  void set_logger(std::function<void(const std::string&)> log) { log_ = std::move(log); }

  // Process one inbound frame, return the response frames (usually one).
  std::vector<Bytes> handle_frame(Session& session, const Bytes& frame) {
    auto decoded = protocol::decode(frame);
    if (std::holds_alternative<protocol::DecodeError>(decoded)) {
      const auto& err = std::get<protocol::DecodeError>(decoded);
      protocol::Message reply;
      reply.type = protocol::MsgType::Error;
      reply.seq = 0;
      reply.payload = protocol::ErrorPayload{protocol::ErrorCode::Malformed, err.detail};
      return {protocol::encode(reply)};
    }
    const auto& msg = std::get<protocol::Message>(decoded);
    protocol::Message reply;
    reply.seq = msg.seq;
    switch (msg.type) {
      case protocol::MsgType::Ping:
        reply.type = protocol::MsgType::Pong;
        reply.payload = protocol::PongPayload{};
        break;
      case protocol::MsgType::RegisterApp: {
        const auto& p = std::get<protocol::RegisterAppPayload>(msg.payload);
        protocol::NeedTaskPayload need;
        for (const auto& ref : p.manifest) {
          if (registry_->contains(ref.task_id, ref.version)) {
            session.installed.insert(ref);
          } else {
            need.unknown.push_back(ref);
          }
        }
        reply.type = protocol::MsgType::NeedTask;
        reply.payload = need;
        break;
      }
      case protocol::MsgType::TaskBundleTransfer: {
        const auto& p = std::get<protocol::TaskBundleTransferPayload>(msg.payload);
        if (options_.restricted || !registry_->contains(p.task.task_id, p.task.version)) {
          reply.type = protocol::MsgType::Error;
          reply.payload = protocol::ErrorPayload{
              protocol::ErrorCode::BundleRejected,
              "bundle rejected: " + p.task.task_id + " v" + std::to_string(p.task.version)};
        } else {
          const auto* bundle = registry_->find(p.task.task_id, p.task.version);
          if (bundle->integrity_hash() != p.integrity_hash) {
            reply.type = protocol::MsgType::Error;
            reply.payload = protocol::ErrorPayload{protocol::ErrorCode::BundleRejected,
                                                   "integrity hash mismatch"};
          } else {
            session.installed.insert(p.task);
            reply.type = protocol::MsgType::Pong;
            reply.payload = protocol::PongPayload{};
          }
        }
        break;
      }
      case protocol::MsgType::Execute: {
        const auto& p = std::get<protocol::ExecutePayload>(msg.payload);
        if (!session.installed.count({p.task_id, p.task_version}) &&
            !registry_->contains(p.task_id, p.task_version)) {
          reply.type = protocol::MsgType::Error;
          reply.payload = protocol::ErrorPayload{protocol::ErrorCode::TaskUnknown,
                                                 "task not installed: " + p.task_id};
        } else {
          reply.type = protocol::MsgType::Result;
          reply.payload = handle_execute(session, p);
        }
        break;
      }
      default:
        reply.type = protocol::MsgType::Error;
        reply.payload = protocol::ErrorPayload{protocol::ErrorCode::Malformed,
                                               "unexpected message type"};
        break;
    }
    return {protocol::encode(reply)};
  }

  // Execute a request, escalating to larger clones while the memory guard
  // trips. The client never sees an OOM that a larger config can absorb.
  protocol::ResultPayload handle_execute(Session& session,
                                         const protocol::ExecutePayload& p) {
    const auto* bundle = registry_->find(p.task_id, p.task_version);
    protocol::ResultPayload result;

    vmpool::VmConfig config = primary_config_;
    if (p.power_request) {
      auto requested = vmpool::find_config(p.power_request->config_name);
      if (!requested) {
        result.ok = false;
        result.exception_kind = "ConfigUnknown";
        result.exception_message = "unknown VM config: " + p.power_request->config_name;
        return result;
      }
      config = *requested;
    }
    int n_vms = p.power_request ? static_cast<int>(p.power_request->n_vms) : 1;

    std::uint32_t escalations = 0;
    std::vector<double> per_vm_overhead;
    double overhead_ms = 0;
    bool dedicated = p.power_request != std::nullopt;
    while (memory_exhausted(*bundle, p.serialized_args, config, dedicated)) {
      try {
        config = vmpool::escalate(config);
      } catch (const vmpool::NoLargerConfig&) {
        result.ok = false;
        result.exception_kind = "OutOfMemory";
        result.exception_message =
            "peak demand exceeds largest configuration (" + config.name + ")";
        log("execute " + p.task_id + ": OOM on largest config");
        return result;
      }
      ++escalations;
      dedicated = true;  // an escalated clone is a dedicated secondary
    }
    session.escalations_total += static_cast<int>(escalations);

    bool needs_acquire = escalations > 0 || p.power_request != std::nullopt;
    std::vector<vmpool::VmInstance> instances;
    std::vector<int> acquired_ids;
    if (needs_acquire) {
      try {
        auto acq = pool_->acquire(config, n_vms);
        acquired_ids = acq.vm_ids;
        overhead_ms = acq.overhead_ms;
        per_vm_overhead = acq.per_vm_overhead_ms;
        for (int id : acquired_ids) {
          pool_->set_busy(id, true);
          instances.push_back(pool_->get(id));
        }
      } catch (const vmpool::PoolExhausted& e) {
        result.ok = false;
        result.exception_kind = "PoolExhausted";
        result.exception_message = e.what();
        return result;
      }
    } else {
      // The primary server context; always running, nothing to resume.
      vmpool::VmInstance primary;
      primary.id = 0;
      primary.config = config;
      primary.state = vmpool::VmState::Running;
      instances.push_back(primary);
      per_vm_overhead.push_back(0.0);
    }

    try {
      std::vector<vmpool::VmInstance> workers = instances;
      if (!bundle->splittable || n_vms == 1) workers.resize(1);
      auto split = vmpool::split_and_distribute(*bundle, p.serialized_args, workers,
                                                options_.run_parts_concurrently);
      clock_->sleep_ms(overhead_ms + split.makespan_ms);
      result.ok = true;
      result.result_bytes = split.merged;
      result.profiling.program.wall_time_ms = overhead_ms + split.makespan_ms;
      result.profiling.program.thread_cpu_time_ms = split.makespan_ms;
      result.profiling.program.work_units =
          static_cast<std::uint64_t>(bundle->work_units(p.serialized_args));
      result.profiling.escalations = escalations;
      result.profiling.per_vm_overhead_ms = per_vm_overhead;
      log("execute " + p.task_id + " on " + config.name + " x" +
          std::to_string(workers.size()) + " escalations=" + std::to_string(escalations) +
          " makespan_ms=" + std::to_string(split.makespan_ms));
    } catch (const std::exception& e) {
      result.ok = false;
      result.exception_kind = "TaskError";
      result.exception_message = e.what();
    }

    if (!acquired_ids.empty()) {
      for (int id : acquired_ids) pool_->set_busy(id, false);
      pool_->release(acquired_ids);
    }
    return result;
  }

  const vmpool::VmConfig& primary_config() const { return primary_config_; }

 private:
  void log(const std::string& line) {
    if (log_) log_(line);
  }

  task::TaskRegistry* registry_;
  vmpool::VmPool* pool_;
  Clock* clock_;
  ServerOptions options_;
  vmpool::VmConfig primary_config_;
  std::function<void(const std::string&)> log_;
};

}  // namespace offload::appserver

#endif  // OFFLOAD_APPSERVER_HPP_
