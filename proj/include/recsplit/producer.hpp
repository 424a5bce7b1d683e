#pragma once

// Reversible producer: compilation of a recursion scheme's predecessor into
// the counting/ascending IR program, the sequential monolithic executor used
// as a cross-check, and the closed-form counter relations of the counting phase.

#include "recsplit/revir.hpp"
#include "recsplit/scheme.hpp"

#include <map>
#include <optional>
#include <string>

namespace recsplit::producer {

namespace regs {
inline const ir::RegisterId x = "x";
inline const ir::RegisterId s = "s";  // visits below zero
inline const ir::RegisterId e = "e";  // visits at zero
inline const ir::RegisterId g = "g";  // visits above zero
inline const ir::RegisterId w = "w";  // input copy, loop bound
inline const ir::RegisterId pred_div_x = "predDivX";
inline const ir::RegisterId pred_not_div_x = "predNotDivX";
inline const ir::RegisterId t_count = "t0";      // counting phase bound
inline const ir::RegisterId t_divisible = "t1";  // ascent when delta | x0
inline const ir::RegisterId t_remainder = "t2";  // ascent otherwise
}  // namespace regs

inline const ir::PortId kProbePort = "probe";
inline const ir::CellId kInjectCell = "inject";

struct PhaseACounters {
  Int g = 0;
  Int e = 0;
  Int s = 0;
  Int x_final = 0;
  bool operator==(const PhaseACounters&) const = default;
};

/// Closed form of the counters after the counting phase: the x0 + 1 visited
/// values x0, x0 + delta, ..., x0 + x0 * delta classified by sign.
PhaseACounters phase_a_counters(Int x0, Int delta);

struct ResidualReport {
  Int s = 0;
  Int e = 0;
  Int g = 0;
  Int w = 0;
  Int x = 0;
  Int pred_div_x = 0;
  Int pred_not_div_x = 0;
  std::map<std::string, Int> temps;
  std::optional<Int> z;            // sequential executor only
  std::optional<Int> inject_cell;  // compiled/split runs only
  bool divisible = false;

  bool operator==(const ResidualReport&) const = default;

  /// `key = value` lines in a fixed order.
  std::string to_text() const;
};

/// Reads the producer registers out of a store.
ResidualReport residuals_from_store(const ir::Store& store, std::optional<Int> inject_cell,
                                    bool divisible);

struct SequentialResult {
  Value y;
  ResidualReport residuals;
};

/// Single-threaded iterative evaluation with b and h inlined and the z
/// register choosing between them; leaves its bookkeeping registers as is.
SequentialResult run_itg_sequential(const RecursionScheme& s, Int x0);

/// Counting prologue only: fetch x from the cell, copy it into w, classify.
ir::RevProgram compile_phase_a(const PredecessorSpec& p);

/// Full producer. Only the predecessor is used; b and h belong to the consumer.
ir::RevProgram compile_producer(const PredecessorSpec& p);
inline ir::RevProgram compile_producer(const RecursionScheme& s) { return compile_producer(s.pred); }

}  // namespace recsplit::producer
