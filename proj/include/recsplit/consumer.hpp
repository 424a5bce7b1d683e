#pragma once

// Classical side of the split: injects the input, learns the iteration count,
// applies b once and h repeatedly to values probed from the producer.

#include "recsplit/checked.hpp"
#include "recsplit/expression.hpp"

#include <concepts>
#include <deque>
#include <vector>
#include <stdexcept>

namespace recsplit {

template <class P>
concept ProbeSource = requires(P p) {
  { p.get() } -> std::convertible_to<Int>;
};

template <class I>
concept InjectTarget = requires(I i, Int v) { i.put(v); };

struct ConsumerConfig {
  ConsumerConfig(Expression b, Expression h, Int x0);

  Expression base;
  Expression step;
  Int input;
};

template <InjectTarget Inject, ProbeSource Probe>
Value run_consumer(const ConsumerConfig& cfg, Inject& inject, Probe& probe) {
  inject.put(cfg.input);
  const Int iterations = probe.get();
  Value out = eval_expr(cfg.base, Env{Value(probe.get()), std::nullopt});
  for (Int i = 0; i < iterations; ++i) out = eval_expr(cfg.step, Env{Value(probe.get()), out});
  return out;
}

/// Queue-backed stand-in for a producer, for driving the consumer without threads.
class ScriptedProbe {
 public:
  explicit ScriptedProbe(std::deque<Int> values) : values_(std::move(values)) {}
  Int get() {
    if (values_.empty()) throw std::out_of_range("scripted probe exhausted");
    ++gets_;
    Int v = values_.front();
    values_.pop_front();
    return v;
  }
  std::size_t gets() const { return gets_; }
  std::size_t remaining() const { return values_.size(); }

 private:
  std::deque<Int> values_;
  std::size_t gets_ = 0;
};

class RecordingInject {
 public:
  void put(Int v) { puts.push_back(v); }
  std::vector<Int> puts;
};

}  // namespace recsplit
