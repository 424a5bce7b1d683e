#include "recsplit/harness.hpp"

#include "recsplit/consumer.hpp"

#include <json.hpp>

#include <condition_variable>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace recsplit::harness {

namespace {

std::string describe(const std::optional<std::string>& op) {
  return op ? "blocked in " + *op : "not blocked";
}

}  // namespace

DeadlockTimeout::DeadlockTimeout(std::optional<std::string> producer_blocked_in,
                                 std::optional<std::string> consumer_blocked_in)
    : std::runtime_error("deadlock timeout: producer " + describe(producer_blocked_in) +
                         ", consumer " + describe(consumer_blocked_in)),
      producer_(std::move(producer_blocked_in)),
      consumer_(std::move(consumer_blocked_in)) {}

namespace {

// Producer-side binding: Emit goes to Probe.put, the first SwapCell is
// Inject.swapIn and the second is Inject.swapOut.
class ChannelIo final : public ir::IoBinding {
 public:
  ChannelIo(chan::ProbeChannel& probe, chan::InjectChannel& inject)
      : probe_(probe), inject_(inject) {}

  void emit(const ir::PortId& port, Int value) override {
    if (port != producer::kProbePort) throw ir::RunError("unbound port '" + port + "'");
    probe_.put(value);
    emitted_.push_back(value);
  }

  Int swap(const ir::CellId& cell, Int value) override {
    if (cell != producer::kInjectCell) throw ir::RunError("unbound cell '" + cell + "'");
    return swaps_++ % 2 == 0 ? inject_.swap_in(value) : inject_.swap_out(value);
  }

  std::vector<Int> take_emitted() { return std::move(emitted_); }

 private:
  chan::ProbeChannel& probe_;
  chan::InjectChannel& inject_;
  std::vector<Int> emitted_;
  std::size_t swaps_ = 0;
};

struct Completion {
  std::mutex mu;
  std::condition_variable cv;
  int finished = 0;
  bool failed = false;
};

std::optional<std::string> blocked(const chan::AgentStatus& st) {
  if (const char* op = st.blocked_in.load()) return std::string(op);
  return std::nullopt;
}

}  // namespace

RunReport run_split(const RecursionScheme& s, Int x0, std::chrono::milliseconds timeout) {
  if (x0 < 0) throw NegativeInput(x0);
  return run_split_with(producer::compile_producer(s), s, x0, timeout);
}

RunReport run_split_with(const ir::RevProgram& program, const RecursionScheme& s, Int x0,
                         std::chrono::milliseconds timeout) {
  if (x0 < 0) throw NegativeInput(x0);
  if (timeout <= std::chrono::milliseconds::zero())
    throw std::invalid_argument("timeout must be positive");

  const ConsumerConfig cfg(s.base, s.step, x0);
  chan::EventLog log;
  chan::ProbeChannel probe(&log);
  chan::InjectChannel inject(&log);
  ChannelIo io(probe, inject);

  chan::AgentStatus producer_status("producer");
  chan::AgentStatus consumer_status("consumer");
  Completion completion;
  bool producer_done = false, consumer_done = false;

  ir::Store final_store;
  Value y;
  std::exception_ptr producer_error, consumer_error;

  const auto start = std::chrono::steady_clock::now();

  std::thread producer_thread([&] {
    chan::AgentScope scope(producer_status);
    bool ok = true;
    try {
      final_store = ir::run(program, ir::Store{}, io);
    } catch (...) {
      producer_error = std::current_exception();
      ok = false;
    }
    std::lock_guard lock(completion.mu);
    producer_done = true;
    ++completion.finished;
    completion.failed = completion.failed || !ok;
    completion.cv.notify_all();
  });

  std::thread consumer_thread([&] {
    chan::AgentScope scope(consumer_status);
    bool ok = true;
    try {
      y = run_consumer(cfg, inject, probe);
    } catch (...) {
      consumer_error = std::current_exception();
      ok = false;
    }
    std::lock_guard lock(completion.mu);
    consumer_done = true;
    ++completion.finished;
    completion.failed = completion.failed || !ok;
    completion.cv.notify_all();
  });

  bool timed_out = false;
  std::optional<std::string> producer_op, consumer_op;
  {
    std::unique_lock lock(completion.mu);
    const bool settled = completion.cv.wait_for(lock, timeout, [&] {
      return completion.finished == 2 || completion.failed;
    });
    if (!settled) {
      timed_out = true;
      if (!producer_done) producer_op = blocked(producer_status).value_or("(running)");
      if (!consumer_done) consumer_op = blocked(consumer_status).value_or("(running)");
    }
  }
  // A failed or stuck agent would leave its peer waiting forever.
  if (timed_out || completion.failed) {
    probe.cancel();
    inject.cancel();
  }
  producer_thread.join();
  consumer_thread.join();

  if (timed_out) throw DeadlockTimeout(producer_op, consumer_op);
  // Report the root cause rather than the cancellation it triggered in the peer.
  auto is_cancel = [](const std::exception_ptr& e) {
    try {
      std::rethrow_exception(e);
    } catch (const chan::ChannelCancelled&) {
      return true;
    } catch (...) {
      return false;
    }
  };
  if (producer_error && !is_cancel(producer_error)) std::rethrow_exception(producer_error);
  if (consumer_error && !is_cancel(consumer_error)) std::rethrow_exception(consumer_error);
  if (producer_error) std::rethrow_exception(producer_error);
  if (consumer_error) std::rethrow_exception(consumer_error);

  RunReport r;
  r.wall_time = std::chrono::steady_clock::now() - start;
  r.y = std::move(y);
  r.oracle_y = eval_recursive(s, x0);
  r.emissions = io.take_emitted();
  r.inject_final = inject.peek();
  r.residuals =
      producer::residuals_from_store(final_store, r.inject_final, x0 % s.pred.delta() == 0);
  r.channel_log = log.snapshot();
  if (r.y != r.oracle_y)
    throw ResultMismatch("split result " + r.y.str() + " differs from recursive result " +
                         r.oracle_y.str() + " for x0 = " + std::to_string(x0));
  return r;
}

bool ReversibilityReport::all_restored() const { return failures() == 0; }

std::size_t ReversibilityReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : cases)
    if (!c.restored) ++n;
  return n;
}

ReversibilityReport check_reversibility(const ir::RevProgram& p,
                                        const std::vector<Preload>& preloads) {
  const ir::RevProgram inverse = ir::invert(p);
  ReversibilityReport report;
  for (std::size_t i = 0; i < preloads.size(); ++i) {
    ReversibilityCase c;
    c.index = i;
    try {
      ir::LocalIo io(preloads[i].cells, ir::LocalIo::Sink::Record);
      ir::Store mid = ir::run(p, preloads[i].store, io);
      io.set_sink(ir::LocalIo::Sink::Discard);
      ir::Store back = ir::run(inverse, std::move(mid), io);
      ir::LocalIo reference(preloads[i].cells);
      bool cells_ok = true;
      for (const auto& [name, v] : io.cells()) cells_ok = cells_ok && reference.cell(name) == v;
      for (const auto& [name, v] : preloads[i].cells) cells_ok = cells_ok && io.cell(name) == v;
      c.restored = back == preloads[i].store && cells_ok;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    report.cases.push_back(std::move(c));
  }
  return report;
}

producer::ResidualReport expected_split_residuals(Int x0, Int delta) {
  producer::ResidualReport r;
  r.divisible = x0 % delta == 0;
  r.temps = {{producer::regs::t_count, 0}, {producer::regs::t_divisible, 0},
             {producer::regs::t_remainder, 0}};
  if (r.divisible) {
    r.pred_div_x = 1;
    r.inject_cell = x0;
  } else {
    r.g = -1;
    r.w = delta;
    r.pred_not_div_x = 1;
    r.inject_cell = checked_sub(x0, delta);
  }
  return r;
}

std::string check_probe_alternation(const std::vector<chan::ChannelEvent>& log,
                                    std::size_t handshakes) {
  std::size_t idx = 0;
  for (const auto& ev : log) {
    if (ev.op.rfind("probe.", 0) != 0) continue;
    const char* want = idx % 2 == 0 ? "probe.put" : "probe.get";
    if (ev.op != want)
      return "probe event " + std::to_string(idx) + " is " + ev.op + ", expected " + want;
    ++idx;
  }
  if (idx % 2 != 0) return "probe log ends with an unmatched put";
  if (idx / 2 != handshakes)
    return "expected " + std::to_string(handshakes) + " probe handshakes, saw " +
           std::to_string(idx / 2);
  return {};
}

std::string check_inject_protocol(const std::vector<chan::ChannelEvent>& log) {
  std::vector<std::string> ops;
  for (const auto& ev : log)
    if (ev.op.rfind("inject.", 0) == 0) ops.push_back(ev.op);
  const std::vector<std::string> want{"inject.put", "inject.swapIn", "inject.swapOut"};
  if (ops == want) return {};
  std::string got;
  for (const auto& o : ops) got += (got.empty() ? "" : ",") + o;
  return "inject events [" + got + "], expected [inject.put,inject.swapIn,inject.swapOut]";
}

void write_trace_jsonl(std::ostream& out, const std::vector<chan::ChannelEvent>& log) {
  for (const auto& ev : log) {
    nlohmann::json j{{"seq", ev.seq}, {"agent", ev.agent}, {"op", ev.op}, {"value", ev.value}};
    out << j.dump() << '\n';
  }
}

std::size_t SweepReport::passed() const { return cases.size() - failed(); }

std::size_t SweepReport::failed() const {
  std::size_t n = 0;
  for (const auto& c : cases)
    if (!c.ok()) ++n;
  return n;
}

std::string SweepReport::to_table() const {
  struct Row {
    std::size_t runs = 0, passed = 0;
  };
  std::map<std::pair<std::string, Int>, Row> rows;
  for (const auto& c : cases) {
    Row& r = rows[{c.scheme, c.delta}];
    ++r.runs;
    if (c.ok()) ++r.passed;
  }
  std::ostringstream out;
  out << std::left << std::setw(16) << "scheme" << std::right << std::setw(7) << "delta"
      << std::setw(7) << "runs" << std::setw(7) << "pass" << std::setw(7) << "fail" << '\n';
  for (const auto& [key, r] : rows)
    out << std::left << std::setw(16) << key.first << std::right << std::setw(7) << key.second
        << std::setw(7) << r.runs << std::setw(7) << r.passed << std::setw(7)
        << (r.runs - r.passed) << '\n';
  out << "total " << cases.size() << ", passed " << passed() << ", failed " << failed() << '\n';
  for (const auto& c : cases)
    for (const auto& f : c.failures)
      out << "FAIL " << c.scheme << " delta=" << c.delta << " x0=" << c.x0 << ": " << f << '\n';
  return out.str();
}

SweepReport sweep(IntRange x_range, IntRange delta_range, const std::vector<NamedScheme>& schemes,
                  std::chrono::milliseconds timeout) {
  SweepReport report;
  for (const NamedScheme& ns : schemes) {
    for (Int delta = delta_range.lo; delta <= delta_range.hi; ++delta) {
      const RecursionScheme s = make_scheme(delta, ns.base, ns.step);
      for (Int x0 = x_range.lo; x0 <= x_range.hi; ++x0) {
        SweepCase c{ns.name, delta, x0, {}};
        try {
          const Value oracle = eval_recursive(s, x0);
          const producer::SequentialResult seq = producer::run_itg_sequential(s, x0);
          if (seq.y != oracle) c.failures.push_back("sequential y = " + seq.y.str());

          const RunReport run = run_split(s, x0, timeout);
          const Emissions em = expected_emissions(s, x0);
          std::vector<Int> want{em.iterations, em.base_arg};
          want.insert(want.end(), em.h_args.begin(), em.h_args.end());
          if (run.emissions != want) c.failures.push_back("emissions differ from oracle");
          if (auto msg = check_probe_alternation(run.channel_log,
                                                 static_cast<std::size_t>(em.iterations) + 2);
              !msg.empty())
            c.failures.push_back(msg);
          if (auto msg = check_inject_protocol(run.channel_log); !msg.empty())
            c.failures.push_back(msg);
          if (run.residuals != expected_split_residuals(x0, delta))
            c.failures.push_back("residuals differ: " + run.residuals.to_text());
        } catch (const DeadlockTimeout& e) {
          report.any_timeout = true;
          c.failures.push_back(e.what());
        } catch (const std::exception& e) {
          c.failures.push_back(e.what());
        }
        report.cases.push_back(std::move(c));
      }
    }
  }
  return report;
}

}  // namespace recsplit::harness
