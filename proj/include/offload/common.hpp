#ifndef OFFLOAD_COMMON_HPP_
#define OFFLOAD_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace offload {

using Bytes = std::vector<std::uint8_t>;

// Transport-level failure: the link died mid-conversation. Callers above the
// controller never see this; the controller falls back to local execution.
class ConnectionLost : public std::runtime_error {
 public:
  explicit ConnectionLost(const std::string& what) : std::runtime_error(what) {}
};

// A remote task raised; the controller rethrows it to the caller unchanged.
class RemoteTaskError : public std::runtime_error {
 public:
  RemoteTaskError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the server-side memory guard when a task's declared peak demand
// exceeds the executing VM's heap.
class MemoryExhausted : public std::runtime_error {
 public:
  explicit MemoryExhausted(const std::string& what) : std::runtime_error(what) {}
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

}  // namespace offload

#endif  // OFFLOAD_COMMON_HPP_
