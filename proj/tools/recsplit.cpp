// recsplit: run, inspect and check producer/consumer splits of a recursion scheme.

#include "recsplit/harness.hpp"
#include "recsplit/producer.hpp"
#include "recsplit/revir.hpp"
#include "recsplit/scheme.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

namespace {

using namespace recsplit;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTimeout = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemeOptions {
  std::string file;
  std::optional<Int> delta;
  std::optional<std::string> base;
  std::optional<std::string> step;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scheme", file, "Scheme file (key = value lines)");
    cmd->add_option("--delta", delta, "Predecessor displacement (<= -1)");
    cmd->add_option("--base", base, "Base expression over x");
    cmd->add_option("--step", step, "Step expression over x and y");
  }

  bool given() const { return !file.empty() || delta || base || step; }

  // Flags override file values.
  SchemeFields fields() const {
    SchemeFields f;
    if (!file.empty()) f = read_scheme_file(file);
    if (delta) f.delta = delta;
    if (base) f.base = base;
    if (step) f.step = step;
    return f;
  }

  RecursionScheme resolve() const {
    SchemeFields f = fields();
    if (!f.delta || !f.base || !f.step)
      throw UsageError("scheme needs delta, base and step (from --scheme or flags)");
    return make_scheme(*f.delta, *f.base, *f.step);
  }
};

std::vector<harness::Preload> random_preloads(std::size_t n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<Int> cell(0, 40);
  std::vector<harness::Preload> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({ir::Store{}, {{producer::kInjectCell, cell(rng)}}});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split recursion schemes into a reversible producer and a classical consumer"};
  app.require_subcommand(1);

  SchemeOptions scheme_opts;
  Int input = 0;
  std::string mode = "split";
  double timeout_s = 5.0;
  std::string trace_path;
  bool verbose = false;

  auto* run_cmd = app.add_subcommand("run", "Evaluate the scheme on one input");
  scheme_opts.attach(run_cmd);
  run_cmd->add_option("--input", input, "Non-negative input x0")->required();
  run_cmd->add_option("--mode", mode, "recursive | sequential | split")
      ->check(CLI::IsMember({"recursive", "sequential", "split"}));
  run_cmd->add_option("--timeout", timeout_s, "Watchdog timeout in seconds");
  run_cmd->add_option("--trace", trace_path, "Write the channel trace as JSON lines");
  run_cmd->add_flag("--verbose,-v", verbose, "Print residual registers");

  auto* ir_cmd = app.add_subcommand("emit-ir", "Print the compiled producer");
  SchemeOptions ir_opts;
  ir_opts.attach(ir_cmd);
  bool phase_a_only = false;
  ir_cmd->add_flag("--phase-a", phase_a_only, "Only the counting prologue");
  bool inverse = false;
  ir_cmd->add_flag("--inverse", inverse, "Print the inverse program");

  auto* check_cmd = app.add_subcommand("check", "Reversibility checks and a default sweep");
  SchemeOptions check_opts;
  check_opts.attach(check_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Cross-check all modes over ranges");
  SchemeOptions sweep_opts;
  sweep_opts.attach(sweep_cmd);
  Int x_min = 0, x_max = 50, d_min = -5, d_max = -1;
  sweep_cmd->add_option("--x-min", x_min);
  sweep_cmd->add_option("--x-max", x_max);
  sweep_cmd->add_option("--delta-min", d_min);
  sweep_cmd->add_option("--delta-max", d_max);
  sweep_cmd->add_option("--timeout", timeout_s, "Per-run watchdog timeout in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto timeout =
      std::chrono::milliseconds(static_cast<std::chrono::milliseconds::rep>(timeout_s * 1000));

  try {
    if (*run_cmd) {
      if (input < 0) throw UsageError("--input must be non-negative");
      if (timeout.count() <= 0) throw UsageError("--timeout must be positive");
      const RecursionScheme s = scheme_opts.resolve();
      if (mode == "recursive") {
        std::cout << "y = " << eval_recursive(s, input) << '\n';
      } else if (mode == "sequential") {
        auto r = producer::run_itg_sequential(s, input);
        std::cout << "y = " << r.y << '\n';
        if (verbose) std::cout << r.residuals.to_text();
      } else {
        auto r = harness::run_split(s, input, timeout);
        std::cout << "y = " << r.y << '\n';
        if (verbose) {
          std::cout << r.residuals.to_text();
          std::cout << "emissions =";
          for (Int v : r.emissions) std::cout << ' ' << v;
          std::cout << '\n';
        }
        if (!trace_path.empty()) {
          std::ofstream out(trace_path);
          if (!out) throw std::runtime_error("cannot write " + trace_path);
          harness::write_trace_jsonl(out, r.channel_log);
        }
      }
      return kExitOk;
    }

    if (*ir_cmd) {
      SchemeFields f = ir_opts.fields();
      if (!f.delta) throw UsageError("emit-ir needs --delta or a scheme file");
      PredecessorSpec p(*f.delta);
      ir::RevProgram prog =
          phase_a_only ? producer::compile_phase_a(p) : producer::compile_producer(p);
      std::cout << ir::dump(inverse ? ir::invert(prog) : prog);
      return kExitOk;
    }

    if (*check_cmd) {
      std::vector<Int> deltas;
      std::vector<harness::NamedScheme> schemes;
      if (check_opts.given()) {
        SchemeFields f = check_opts.fields();
        if (!f.delta || !f.base || !f.step) throw UsageError("scheme needs delta, base and step");
        make_scheme(*f.delta, *f.base, *f.step);
        deltas = {*f.delta};
        schemes = {{"user", *f.base, *f.step}};
      } else {
        deltas = {-5, -4, -3, -2, -1};
        schemes = {{"x+y", "x", "x+y"}};
      }
      bool ok = true;
      for (Int d : deltas) {
        PredecessorSpec p(d);
        for (const auto& [label, prog] :
             {std::pair{"phase-a", producer::compile_phase_a(p)},
              std::pair{"producer", producer::compile_producer(p)}}) {
          auto rep = harness::check_reversibility(prog, random_preloads(100, 7));
          std::cout << "reversibility " << label << " delta=" << d << ": "
                    << (rep.all_restored() ? "ok" : "FAILED") << " (" << rep.cases.size()
                    << " preloads)\n";
          ok = ok && rep.all_restored();
        }
      }
      auto rep = harness::sweep({0, 50}, {deltas.front(), deltas.back()}, schemes);
      std::cout << rep.to_table();
      if (rep.any_timeout) return kExitTimeout;
      return ok && rep.all_passed() ? kExitOk : kExitCheckFailed;
    }

    if (*sweep_cmd) {
      std::vector<harness::NamedScheme> schemes;
      if (sweep_opts.given()) {
        SchemeFields f = sweep_opts.fields();
        if (!f.base || !f.step) throw UsageError("sweep needs base and step");
        schemes = {{"user", *f.base, *f.step}};
      } else {
        schemes = {{"x+y", "x", "x+y"}, {"x*y+1", "x+1", "x*y+1"}};
      }
      if (x_min < 0) throw UsageError("--x-min must be non-negative");
      if (d_max > -1) throw UsageError("--delta-max must be <= -1");
      if (timeout.count() <= 0) throw UsageError("--timeout must be positive");
      auto rep = harness::sweep({x_min, x_max}, {d_min, d_max}, schemes, timeout);
      std::cout << rep.to_table();
      if (rep.any_timeout) return kExitTimeout;
      return rep.all_passed() ? kExitOk : kExitCheckFailed;
    }
  } catch (const harness::DeadlockTimeout& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTimeout;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NegativeInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ExprSyntaxError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UndeclaredVariable& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemeFileError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}
