#pragma once

// Recursion schemes f(x) = x <= 0 ? b(x) : h(x, f(x + delta)) and their
// reference evaluators.

#include "recsplit/checked.hpp"
#include "recsplit/expression.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recsplit {

class NegativeInput : public std::invalid_argument {
 public:
  explicit NegativeInput(Int x);
};

/// Constant predecessor p(x) = x + delta with delta <= -1.
class PredecessorSpec {
 public:
  explicit PredecessorSpec(Int delta);

  Int delta() const { return delta_; }
  /// Step size d = -delta.
  Int stride() const { return -delta_; }

  Int pred(Int x) const { return checked_add(x, delta_); }
  Int pred_inv(Int x) const { return checked_sub(x, delta_); }

  bool operator==(const PredecessorSpec&) const = default;

 private:
  Int delta_;
};

struct RecursionScheme {
  RecursionScheme(PredecessorSpec pred, Expression base, Expression step);

  PredecessorSpec pred;
  Expression base;  // over {x}
  Expression step;  // over {x, y}
};

/// Parses base over {x} and step over {x, y}.
RecursionScheme make_scheme(Int delta, std::string_view base, std::string_view step);

/// Reference semantics of the recursion, computed as a descent then an ascending fold.
Value eval_recursive(const RecursionScheme& s, Int x);

struct Emissions {
  Int iterations = 0;
  Int base_arg = 0;
  std::vector<Int> h_args;  // ascending

  bool operator==(const Emissions&) const = default;
};

/// Arguments a producer must hand over, in order, to reconstruct f(x) for x >= 0.
Emissions expected_emissions(const RecursionScheme& s, Int x);

/// Folds b over base_arg then h over h_args left to right.
Value fold_emissions(const RecursionScheme& s, const Emissions& em);

class SchemeFileError : public std::runtime_error {
 public:
  SchemeFileError(const std::string& msg, int line);
  int line() const { return line_; }

 private:
  int line_;
};

/// Partially specified scheme as read from a file or flags; all three are
/// required before make_scheme.
struct SchemeFields {
  std::optional<Int> delta;
  std::optional<std::string> base;
  std::optional<std::string> step;
};

/// `key = value` per line, keys delta/base/step, '#' starts a comment.
SchemeFields parse_scheme_text(std::string_view text);
SchemeFields read_scheme_file(const std::filesystem::path& path);

}  // namespace recsplit
