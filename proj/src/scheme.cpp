#include "recsplit/scheme.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace recsplit {

NegativeInput::NegativeInput(Int x)
    : std::invalid_argument("input must be non-negative, got " + std::to_string(x)) {}

PredecessorSpec::PredecessorSpec(Int delta) : delta_(delta) {
  if (delta > -1)
    throw std::invalid_argument("predecessor displacement must be <= -1, got " +
                                std::to_string(delta));
  if (delta == std::numeric_limits<Int>::min())
    throw std::invalid_argument("predecessor displacement out of range");
}

RecursionScheme::RecursionScheme(PredecessorSpec p, Expression b, Expression h)
    : pred(p), base(std::move(b)), step(std::move(h)) {
  if (base.free_vars().contains(Var::Y))
    throw std::invalid_argument("base expression may only mention x");
}

RecursionScheme make_scheme(Int delta, std::string_view base, std::string_view step) {
  return RecursionScheme(PredecessorSpec(delta), parse_expr(base, {Var::X}),
                         parse_expr(step, {Var::X, Var::Y}));
}

Value eval_recursive(const RecursionScheme& s, Int x) {
  std::vector<Int> pending;
  while (x > 0) {
    pending.push_back(x);
    x = s.pred.pred(x);
  }
  Value y = eval_expr(s.base, Env{Value(x), std::nullopt});
  for (auto it = pending.rbegin(); it != pending.rend(); ++it)
    y = eval_expr(s.step, Env{Value(*it), y});
  return y;
}

Emissions expected_emissions(const RecursionScheme& s, Int x) {
  if (x < 0) throw NegativeInput(x);
  const Int d = s.pred.stride();
  Emissions em;
  em.iterations = x / d + (x % d != 0 ? 1 : 0);
  em.base_arg = x - em.iterations * d;
  em.h_args.reserve(static_cast<std::size_t>(em.iterations));
  for (Int k = em.iterations - 1; k >= 0; --k) em.h_args.push_back(x - k * d);
  return em;
}

Value fold_emissions(const RecursionScheme& s, const Emissions& em) {
  Value y = eval_expr(s.base, Env{Value(em.base_arg), std::nullopt});
  for (Int a : em.h_args) y = eval_expr(s.step, Env{Value(a), y});
  return y;
}

SchemeFileError::SchemeFileError(const std::string& msg, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

SchemeFields parse_scheme_text(std::string_view text) {
  SchemeFields out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SchemeFileError("expected 'key = value'", lineno);
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw SchemeFileError("empty value for '" + std::string(key) + "'", lineno);
    if (key == "delta") {
      Int d = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw SchemeFileError("delta is not an integer", lineno);
      out.delta = d;
    } else if (key == "base") {
      out.base = std::string(value);
    } else if (key == "step") {
      out.step = std::string(value);
    } else {
      throw SchemeFileError("unknown key '" + std::string(key) + "'", lineno);
    }
  }
  return out;
}

SchemeFields read_scheme_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scheme file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scheme_text(buf.str());
}

}  // namespace recsplit
