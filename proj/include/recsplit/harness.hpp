#pragma once

// Runs the producer and consumer as two threads over a channel pair, with a
// watchdog, and bundles the conformance checks used by the CLI and tests.

#include "recsplit/chan.hpp"
#include "recsplit/producer.hpp"
#include "recsplit/revir.hpp"
#include "recsplit/scheme.hpp"

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace recsplit::harness {

using namespace std::chrono_literals;

inline constexpr std::chrono::milliseconds kDefaultTimeout = 5s;

struct RunReport {
  Value y;
  Value oracle_y;
  std::vector<Int> emissions;
  Int inject_final = 0;
  producer::ResidualReport residuals;
  std::vector<chan::ChannelEvent> channel_log;
  std::chrono::nanoseconds wall_time{0};
};

/// At least one agent was still running at the deadline.
class DeadlockTimeout : public std::runtime_error {
 public:
  DeadlockTimeout(std::optional<std::string> producer_blocked_in,
                  std::optional<std::string> consumer_blocked_in);
  /// Channel operation each agent was waiting in; nullopt if it had finished
  /// or was not inside a channel operation.
  const std::optional<std::string>& producer_blocked_in() const { return producer_; }
  const std::optional<std::string>& consumer_blocked_in() const { return consumer_; }

 private:
  std::optional<std::string> producer_;
  std::optional<std::string> consumer_;
};

class ResultMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiles the producer for s, runs both agents and checks y against eval_recursive.
RunReport run_split(const RecursionScheme& s, Int x0,
                    std::chrono::milliseconds timeout = kDefaultTimeout);

/// Same, with an explicit producer program (for fault injection).
RunReport run_split_with(const ir::RevProgram& producer_program, const RecursionScheme& s, Int x0,
                         std::chrono::milliseconds timeout = kDefaultTimeout);

struct Preload {
  ir::Store store;
  std::map<ir::CellId, Int> cells;
};

struct ReversibilityCase {
  std::size_t index = 0;
  bool restored = false;
  std::string error;  // empty unless the forward or inverse run threw
};

struct ReversibilityReport {
  std::vector<ReversibilityCase> cases;
  bool all_restored() const;
  std::size_t failures() const;
};

/// Forward with a recording sink, then the inverse with a discarding sink,
/// comparing store and cells against the preload.
ReversibilityReport check_reversibility(const ir::RevProgram& p, const std::vector<Preload>& preloads);

/// Residuals a compiled producer leaves after a split run on x0.
producer::ResidualReport expected_split_residuals(Int x0, Int delta);

/// Empty when the probe events strictly alternate put/get starting with put
/// and number exactly `handshakes` pairs; otherwise a description.
std::string check_probe_alternation(const std::vector<chan::ChannelEvent>& log,
                                    std::size_t handshakes);

/// Empty when inject events are exactly put, swapIn, swapOut in that order.
std::string check_inject_protocol(const std::vector<chan::ChannelEvent>& log);

/// {"seq":..,"agent":..,"op":..,"value":..} per line.
void write_trace_jsonl(std::ostream& out, const std::vector<chan::ChannelEvent>& log);

struct NamedScheme {
  std::string name;
  std::string base;
  std::string step;
};

struct SweepCase {
  std::string scheme;
  Int delta = 0;
  Int x0 = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct SweepReport {
  std::vector<SweepCase> cases;
  std::size_t passed() const;
  std::size_t failed() const;
  bool all_passed() const { return failed() == 0; }
  bool any_timeout = false;
  /// One row per (scheme, delta): runs, passes, failures.
  std::string to_table() const;
};

struct IntRange {
  Int lo = 0;
  Int hi = -1;  // inclusive; lo > hi is empty
};

SweepReport sweep(IntRange x_range, IntRange delta_range, const std::vector<NamedScheme>& schemes,
                  std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace recsplit::harness
