#pragma once

// Single-slot blocking rendezvous channels. Probe carries values from the
// producer to the consumer; Inject carries the input in and the producer's
// leftover x back out.

#include "recsplit/checked.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace recsplit::chan {

struct ChannelEvent {
  std::size_t seq;
  std::string agent;
  std::string op;  // "probe.put", "probe.get", "inject.put", "inject.swapIn", ...
  Int value;

  bool operator==(const ChannelEvent&) const = default;
};

/// Shared, ordered log of completed channel operations.
class EventLog {
 public:
  void record(std::string op, Int value);
  std::vector<ChannelEvent> snapshot() const;

 private:
  mutable std::mutex mu_;
  std::vector<ChannelEvent> events_;
};

/// Identity of the calling agent and the operation it is currently blocked in.
struct AgentStatus {
  explicit AgentStatus(std::string n) : name(std::move(n)) {}
  const std::string name;
  std::atomic<const char*> blocked_in{nullptr};
};

/// Binds the calling thread to an AgentStatus for the scope's lifetime.
class AgentScope {
 public:
  explicit AgentScope(AgentStatus& status);
  ~AgentScope();
  AgentScope(const AgentScope&) = delete;
  AgentScope& operator=(const AgentScope&) = delete;

 private:
  AgentStatus* previous_;
};

/// Name of the agent bound to the calling thread, or "" if none.
std::string current_agent();

class ChannelCancelled : public std::runtime_error {
 public:
  explicit ChannelCancelled(const std::string& op)
      : std::runtime_error("channel cancelled during " + op) {}
};

class ProbeChannel {
 public:
  explicit ProbeChannel(EventLog* log = nullptr) : log_(log) {}

  /// Blocks while a previous value has not been consumed.
  void put(Int v);
  /// Blocks until a value has been produced.
  Int get();

  /// Wakes every waiter with ChannelCancelled; later calls throw too.
  void cancel();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  Int slot_ = 0;
  bool available_ = false;
  bool cancelled_ = false;
  EventLog* log_;
};

class InjectChannel {
 public:
  explicit InjectChannel(EventLog* log = nullptr) : log_(log) {}

  /// Blocks while set; stores v and marks the slot set.
  void put(Int v);
  /// Blocks while not set; exchanges v with the slot, flag untouched.
  Int swap_in(Int v);
  /// Exchanges v with the slot and marks it not set, without waiting.
  Int swap_out(Int v);
  /// Blocks while not set; reads the slot, flag untouched.
  Int get();

  void cancel();

  /// Current slot content (for inspection after a run).
  Int peek();
  bool not_set();

 private:
  template <class Pred>
  void wait(std::unique_lock<std::mutex>& lock, const char* op, Pred ready);

  std::mutex mu_;
  std::condition_variable cv_;
  Int x_initial_ = 0;
  bool not_set_ = true;
  bool cancelled_ = false;
  EventLog* log_;
};

}  // namespace recsplit::chan
