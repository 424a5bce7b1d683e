#include "recsplit/chan.hpp"

namespace recsplit::chan {

namespace {

thread_local AgentStatus* tl_agent = nullptr;

// Marks the calling agent as blocked in op while a guarded wait is in progress.
class BlockedMark {
 public:
  explicit BlockedMark(const char* op) {
    if (tl_agent) tl_agent->blocked_in.store(op);
  }
  ~BlockedMark() {
    if (tl_agent) tl_agent->blocked_in.store(nullptr);
  }
};

template <class Pred>
void guarded_wait(std::condition_variable& cv, std::unique_lock<std::mutex>& lock,
                  const bool& cancelled, const char* op, Pred ready) {
  if (cancelled) throw ChannelCancelled(op);
  if (ready()) return;
  BlockedMark mark(op);
  while (!ready()) {
    cv.wait(lock);
    if (cancelled) throw ChannelCancelled(op);
  }
}

}  // namespace

void EventLog::record(std::string op, Int value) {
  std::lock_guard lock(mu_);
  events_.push_back(ChannelEvent{events_.size(), current_agent(), std::move(op), value});
}

std::vector<ChannelEvent> EventLog::snapshot() const {
  std::lock_guard lock(mu_);
  return events_;
}

AgentScope::AgentScope(AgentStatus& status) : previous_(tl_agent) { tl_agent = &status; }
AgentScope::~AgentScope() { tl_agent = previous_; }

std::string current_agent() { return tl_agent ? tl_agent->name : std::string(); }

void ProbeChannel::put(Int v) {
  std::unique_lock lock(mu_);
  // consumer has not consumed
  guarded_wait(cv_, lock, cancelled_, "probe.put", [&] { return !available_; });
  slot_ = v;
  available_ = true;
  if (log_) log_->record("probe.put", v);
  cv_.notify_all();
}

Int ProbeChannel::get() {
  std::unique_lock lock(mu_);
  // producer has not produced
  guarded_wait(cv_, lock, cancelled_, "probe.get", [&] { return available_; });
  Int out = slot_;
  available_ = false;
  if (log_) log_->record("probe.get", out);
  cv_.notify_all();
  return out;
}

void ProbeChannel::cancel() {
  std::lock_guard lock(mu_);
  cancelled_ = true;
  cv_.notify_all();
}

template <class Pred>
void InjectChannel::wait(std::unique_lock<std::mutex>& lock, const char* op, Pred ready) {
  guarded_wait(cv_, lock, cancelled_, op, ready);
}

void InjectChannel::put(Int v) {
  std::unique_lock lock(mu_);
  wait(lock, "inject.put", [&] { return not_set_; });
  x_initial_ = v;
  not_set_ = false;
  if (log_) log_->record("inject.put", v);
  cv_.notify_all();
}

Int InjectChannel::swap_in(Int v) {
  std::unique_lock lock(mu_);
  wait(lock, "inject.swapIn", [&] { return !not_set_; });
  Int out = x_initial_;
  x_initial_ = v;
  if (log_) log_->record("inject.swapIn", out);
  cv_.notify_all();
  return out;
}

Int InjectChannel::swap_out(Int v) {
  std::unique_lock lock(mu_);
  if (cancelled_) throw ChannelCancelled("inject.swapOut");
  Int out = x_initial_;
  x_initial_ = v;
  not_set_ = !not_set_;
  if (log_) log_->record("inject.swapOut", v);
  cv_.notify_all();
  return out;
}

Int InjectChannel::get() {
  std::unique_lock lock(mu_);
  wait(lock, "inject.get", [&] { return !not_set_; });
  Int out = x_initial_;
  if (log_) log_->record("inject.get", out);
  cv_.notify_all();
  return out;
}

void InjectChannel::cancel() {
  std::lock_guard lock(mu_);
  cancelled_ = true;
  cv_.notify_all();
}

Int InjectChannel::peek() {
  std::lock_guard lock(mu_);
  return x_initial_;
}

bool InjectChannel::not_set() {
  std::lock_guard lock(mu_);
  return not_set_;
}

}  // namespace recsplit::chan
