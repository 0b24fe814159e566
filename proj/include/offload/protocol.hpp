#ifndef OFFLOAD_PROTOCOL_HPP_
#define OFFLOAD_PROTOCOL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "offload/common.hpp"
#include "offload/profiling.hpp"

// Client <-> server wire protocol.
//
// Frame layout (all integers big-endian):
//   u32  length of everything after this field
//   u8   protocol version (0x01)
//   u8   message type
//   u64  sequence number
//   ...  payload fields in the order documented per message, using
//        u32-length-prefixed byte strings and fixed-width integers
namespace offload::protocol {

constexpr std::uint8_t kProtocolVersion = 0x01;
constexpr std::size_t kDefaultMaxFrame = 64ull * 1024 * 1024;
constexpr std::size_t kHeaderAfterLen = 1 + 1 + 8;  // version + type + seq

enum class MsgType : std::uint8_t {
  RegisterApp = 1,
  NeedTask = 2,
  TaskBundleTransfer = 3,
  Ping = 4,
  Pong = 5,
  Execute = 6,
  Result = 7,
  Error = 8,
};

struct TaskRef {
  std::string task_id;
  std::uint32_t version = 1;
  auto operator<=>(const TaskRef&) const = default;
};

struct RegisterAppPayload {
  std::vector<TaskRef> manifest;
  bool operator==(const RegisterAppPayload&) const = default;
};

// Server reply to RegisterApp: the subset of tasks it lacks.
struct NeedTaskPayload {
  std::vector<TaskRef> unknown;
  bool operator==(const NeedTaskPayload&) const = default;
};

// Carries identity + integrity hash; the server maps it to a pre-built
// plugin in its registry.
struct TaskBundleTransferPayload {
  TaskRef task;
  std::string integrity_hash;
  bool operator==(const TaskBundleTransferPayload&) const = default;
};

struct PingPayload {
  bool operator==(const PingPayload&) const = default;
};
struct PongPayload {
  bool operator==(const PongPayload&) const = default;
};

struct PowerRequest {
  std::string config_name;
  std::uint32_t n_vms = 1;
  bool operator==(const PowerRequest&) const = default;
};

struct ExecutePayload {
  std::string task_id;
  std::uint32_t task_version = 1;
  std::int32_t input_bucket = 0;
  Bytes serialized_state;
  Bytes serialized_args;
  std::optional<PowerRequest> power_request;
  bool operator==(const ExecutePayload&) const = default;
};

struct RemoteProfile {
  profiling::ProgramProfile program;
  std::uint32_t escalations = 0;
  std::vector<double> per_vm_overhead_ms;
  bool operator==(const RemoteProfile& o) const {
    return program.wall_time_ms == o.program.wall_time_ms &&
           program.thread_cpu_time_ms == o.program.thread_cpu_time_ms &&
           program.work_units == o.program.work_units &&
           program.alloc_bytes == o.program.alloc_bytes &&
           program.gc_or_reclaim_count == o.program.gc_or_reclaim_count &&
           escalations == o.escalations && per_vm_overhead_ms == o.per_vm_overhead_ms;
  }
};

struct ResultPayload {
  bool ok = true;
  Bytes result_bytes;       // ok only
  Bytes state_delta_bytes;  // ok only
  RemoteProfile profiling;  // ok only
  std::string exception_kind;     // error only
  std::string exception_message;  // error only
  bool operator==(const ResultPayload&) const = default;
};

enum class ErrorCode : std::uint32_t {
  TaskUnknown = 1,
  BundleRejected = 2,
  Malformed = 3,
  Internal = 4,
};

struct ErrorPayload {
  ErrorCode code = ErrorCode::Internal;
  std::string message;
  bool operator==(const ErrorPayload&) const = default;
};

using Payload = std::variant<RegisterAppPayload, NeedTaskPayload,
                             TaskBundleTransferPayload, PingPayload, PongPayload,
                             ExecutePayload, ResultPayload, ErrorPayload>;

struct Message {
  MsgType type = MsgType::Ping;
  std::uint64_t seq = 0;
  Payload payload = PingPayload{};
  bool operator==(const Message&) const = default;
};

struct DecodeError {
  enum class Kind { Malformed, Version, TooLarge };
  Kind kind = Kind::Malformed;
  std::string detail;
};

using DecodeResult = std::variant<Message, DecodeError>;

// --- byte writer/reader ---

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    u64(bits);
  }
  void bytes(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  Bytes take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    __builtin_memcpy(&v, &bits, sizeof(v));
    return v;
  }
  Bytes bytes() {
    std::uint32_t n = u32();
    need(n);
    Bytes b(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return b;
  }
  std::string str() {
    Bytes b = bytes();
    return std::string(b.begin(), b.end());
  }
  bool done() const { return pos_ == data_.size(); }

  struct Truncated {};

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) throw Truncated{};
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// --- payload codecs ---

namespace detail {

inline void write_task_refs(Writer& w, const std::vector<TaskRef>& refs) {
  w.u32(static_cast<std::uint32_t>(refs.size()));
  for (const auto& r : refs) {
    w.str(r.task_id);
    w.u32(r.version);
  }
}

inline std::vector<TaskRef> read_task_refs(Reader& r) {
  std::uint32_t n = r.u32();
  std::vector<TaskRef> refs;
  refs.reserve(std::min<std::uint32_t>(n, 1024));
  for (std::uint32_t i = 0; i < n; ++i) {
    TaskRef ref;
    ref.task_id = r.str();
    ref.version = r.u32();
    refs.push_back(std::move(ref));
  }
  return refs;
}

inline void write_payload(Writer& w, const Message& m) {
  switch (m.type) {
    case MsgType::RegisterApp:
      write_task_refs(w, std::get<RegisterAppPayload>(m.payload).manifest);
      break;
    case MsgType::NeedTask:
      write_task_refs(w, std::get<NeedTaskPayload>(m.payload).unknown);
      break;
    case MsgType::TaskBundleTransfer: {
      const auto& p = std::get<TaskBundleTransferPayload>(m.payload);
      w.str(p.task.task_id);
      w.u32(p.task.version);
      w.str(p.integrity_hash);
      break;
    }
    case MsgType::Ping:
    case MsgType::Pong:
      break;
    case MsgType::Execute: {
      const auto& p = std::get<ExecutePayload>(m.payload);
      w.str(p.task_id);
      w.u32(p.task_version);
      w.i32(p.input_bucket);
      w.bytes(p.serialized_state);
      w.bytes(p.serialized_args);
      w.u8(p.power_request ? 1 : 0);
      if (p.power_request) {
        w.str(p.power_request->config_name);
        w.u32(p.power_request->n_vms);
      }
      break;
    }
    case MsgType::Result: {
      const auto& p = std::get<ResultPayload>(m.payload);
      w.u8(p.ok ? 0 : 1);
      if (p.ok) {
        w.bytes(p.result_bytes);
        w.bytes(p.state_delta_bytes);
        const auto& prof = p.profiling;
        w.f64(prof.program.wall_time_ms);
        w.f64(prof.program.thread_cpu_time_ms);
        w.u64(prof.program.work_units);
        w.u64(prof.program.alloc_bytes);
        w.u64(prof.program.gc_or_reclaim_count);
        w.u32(prof.escalations);
        w.u32(static_cast<std::uint32_t>(prof.per_vm_overhead_ms.size()));
        for (double v : prof.per_vm_overhead_ms) w.f64(v);
      } else {
        w.str(p.exception_kind);
        w.str(p.exception_message);
      }
      break;
    }
    case MsgType::Error: {
      const auto& p = std::get<ErrorPayload>(m.payload);
      w.u32(static_cast<std::uint32_t>(p.code));
      w.str(p.message);
      break;
    }
  }
}

inline Payload read_payload(Reader& r, MsgType type) {
  switch (type) {
    case MsgType::RegisterApp:
      return RegisterAppPayload{read_task_refs(r)};
    case MsgType::NeedTask:
      return NeedTaskPayload{read_task_refs(r)};
    case MsgType::TaskBundleTransfer: {
      TaskBundleTransferPayload p;
      p.task.task_id = r.str();
      p.task.version = r.u32();
      p.integrity_hash = r.str();
      return p;
    }
    case MsgType::Ping:
      return PingPayload{};
    case MsgType::Pong:
      return PongPayload{};
    case MsgType::Execute: {
      ExecutePayload p;
      p.task_id = r.str();
      p.task_version = r.u32();
      p.input_bucket = r.i32();
      p.serialized_state = r.bytes();
      p.serialized_args = r.bytes();
      if (r.u8() != 0) {
        PowerRequest pr;
        pr.config_name = r.str();
        pr.n_vms = r.u32();
        p.power_request = pr;
      }
      return p;
    }
    case MsgType::Result: {
      ResultPayload p;
      p.ok = r.u8() == 0;
      if (p.ok) {
        p.result_bytes = r.bytes();
        p.state_delta_bytes = r.bytes();
        p.profiling.program.wall_time_ms = r.f64();
        p.profiling.program.thread_cpu_time_ms = r.f64();
        p.profiling.program.work_units = r.u64();
        p.profiling.program.alloc_bytes = r.u64();
        p.profiling.program.gc_or_reclaim_count = r.u64();
        p.profiling.escalations = r.u32();
        std::uint32_t n = r.u32();
        for (std::uint32_t i = 0; i < n; ++i)
          p.profiling.per_vm_overhead_ms.push_back(r.f64());
      } else {
        p.exception_kind = r.str();
        p.exception_message = r.str();
      }
      return p;
    }
    case MsgType::Error: {
      ErrorPayload p;
      p.code = static_cast<ErrorCode>(r.u32());
      p.message = r.str();
      return p;
    }
  }
  throw Reader::Truncated{};
}

inline bool known_type(std::uint8_t t) {
  return t >= static_cast<std::uint8_t>(MsgType::RegisterApp) &&
         t <= static_cast<std::uint8_t>(MsgType::Error);
}

}  // namespace detail

inline Bytes encode(const Message& m) {
  Writer body;
  body.u8(kProtocolVersion);
  body.u8(static_cast<std::uint8_t>(m.type));
  body.u64(m.seq);
  detail::write_payload(body, m);
  Bytes payload = body.take();
  Writer frame;
  frame.u32(static_cast<std::uint32_t>(payload.size()));
  Bytes out = frame.take();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

// Total: never throws on arbitrary input, returns a DecodeError instead.
inline DecodeResult decode(std::span<const std::uint8_t> frame,
                           std::size_t max_frame = kDefaultMaxFrame) {
  try {
    Reader hdr(frame);
    std::uint32_t len = hdr.u32();
    if (len > max_frame)
      return DecodeError{DecodeError::Kind::TooLarge,
                         "frame length " + std::to_string(len) + " exceeds limit"};
    if (static_cast<std::size_t>(len) + 4 != frame.size())
      return DecodeError{DecodeError::Kind::Malformed, "frame length mismatch"};
    if (len < kHeaderAfterLen)
      return DecodeError{DecodeError::Kind::Malformed, "frame too short"};
    std::uint8_t version = hdr.u8();
    if (version != kProtocolVersion)
      return DecodeError{DecodeError::Kind::Version,
                         "unknown protocol version " + std::to_string(version)};
    std::uint8_t type_byte = hdr.u8();
    if (!detail::known_type(type_byte))
      return DecodeError{DecodeError::Kind::Malformed,
                         "unknown message type " + std::to_string(type_byte)};
    Message m;
    m.type = static_cast<MsgType>(type_byte);
    m.seq = hdr.u64();
    Reader body(frame.subspan(4 + kHeaderAfterLen));
    m.payload = detail::read_payload(body, m.type);
    if (!body.done())
      return DecodeError{DecodeError::Kind::Malformed, "trailing bytes in payload"};
    return m;
  } catch (const Reader::Truncated&) {
    return DecodeError{DecodeError::Kind::Malformed, "truncated frame"};
  } catch (const std::exception& e) {
    return DecodeError{DecodeError::Kind::Malformed, e.what()};
  }
}

inline DecodeResult decode(const Bytes& frame,
                           std::size_t max_frame = kDefaultMaxFrame) {
  return decode(std::span<const std::uint8_t>(frame), max_frame);
}

inline std::optional<MsgType> peek_type(const Bytes& frame) {
  if (frame.size() < 6) return std::nullopt;
  if (!detail::known_type(frame[5])) return std::nullopt;
  return static_cast<MsgType>(frame[5]);
}

}  // namespace offload::protocol

#endif  // OFFLOAD_PROTOCOL_HPP_
