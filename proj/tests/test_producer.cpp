#include "oracles.hpp"
#include "recsplit/harness.hpp"
#include "recsplit/producer.hpp"

#include <doctest.h>

#include <random>

using namespace recsplit;
using namespace recsplit::producer;

namespace {

ir::Store run_with_cell(const ir::RevProgram& p, Int cell, ir::LocalIo& io) {
  io = ir::LocalIo({{kInjectCell, cell}});
  return ir::run(p, ir::Store{}, io);
}

std::size_t count_emits_of(const ir::Block& b, const ir::RegisterId& reg) {
  std::size_t n = 0;
  for (const auto& ins : b) {
    if (auto* e = std::get_if<ir::Emit>(&ins.op); e && e->reg == reg) ++n;
    if (auto* f = std::get_if<ir::For>(&ins.op)) n += count_emits_of(f->body, reg);
    if (auto* i = std::get_if<ir::IfSign>(&ins.op))
      n += count_emits_of(i->pos, reg) + count_emits_of(i->zero, reg) + count_emits_of(i->neg, reg);
  }
  return n;
}

}  // namespace

TEST_CASE("phase_a_counters examples") {
  CHECK(phase_a_counters(3, -1) == PhaseACounters{3, 1, 0, -1});
  CHECK(phase_a_counters(3, -2) == PhaseACounters{2, 0, 2, -5});
  for (Int k = 1; k <= 7; ++k) CHECK(phase_a_counters(0, -k) == PhaseACounters{0, 1, 0, -k});
  CHECK_THROWS_AS(phase_a_counters(-1, -1), NegativeInput);
}

TEST_CASE("phase_a_counters agree with the brute-force loop and the compiled prologue") {
  for (Int d = -7; d <= -1; ++d) {
    ir::RevProgram prologue = compile_phase_a(PredecessorSpec(d));
    for (Int x0 = 0; x0 <= 200; ++x0) {
      PhaseACounters c = phase_a_counters(x0, d);
      oracle::Counters b = oracle::brute_phase_a(x0, d);
      CHECK(c == PhaseACounters{b.g, b.e, b.s, b.x});
      CHECK((c.e == 1) == (x0 % d == 0));

      ir::LocalIo io;
      ir::Store st = run_with_cell(prologue, x0, io);
      CHECK(st.get(regs::g) == c.g);
      CHECK(st.get(regs::e) == c.e);
      CHECK(st.get(regs::s) == c.s);
      CHECK(st.get(regs::x) == c.x_final);
      CHECK(st.get(regs::w) == x0);
      CHECK(st.get(regs::t_count) == 0);
    }
  }
}

TEST_CASE("sequential executor examples") {
  SequentialResult a = run_itg_sequential(make_scheme(-1, "x", "x+y"), 3);
  CHECK(a.y == 6);
  CHECK(a.residuals.s == 0);
  CHECK(a.residuals.e == 0);
  CHECK(a.residuals.g == 0);
  CHECK(a.residuals.w == 0);
  CHECK(a.residuals.x == 3);
  CHECK(a.residuals.z == 0);
  CHECK(a.residuals.pred_div_x == 1);
  CHECK(a.residuals.pred_not_div_x == 0);

  SequentialResult b = run_itg_sequential(make_scheme(-2, "x", "x+y"), 3);
  CHECK(b.y == 3);
  CHECK(b.residuals.s == 0);
  CHECK(b.residuals.e == 0);
  CHECK(b.residuals.g == -1);
  CHECK(b.residuals.w == -2);
  CHECK(b.residuals.x == 5);
  CHECK(b.residuals.z == 0);
  CHECK(b.residuals.pred_div_x == 0);
  CHECK(b.residuals.pred_not_div_x == 1);

  SequentialResult c = run_itg_sequential(make_scheme(-3, "x*5+2", "x+y"), 0);
  CHECK(c.y == 2);
  CHECK(c.residuals.divisible);
  CHECK(c.residuals.x == 0);
  CHECK(c.residuals.pred_div_x == 1);

  CHECK_THROWS_AS(run_itg_sequential(make_scheme(-1, "x", "x+y"), -2), NegativeInput);
}

TEST_CASE("sequential executor equals the recursion") {
  for (const char* step : {"x+y", "x*y+1"}) {
    for (Int d = -7; d <= -1; ++d) {
      RecursionScheme s = make_scheme(d, "x+1", step);
      for (Int x0 = 0; x0 <= 200; ++x0) CHECK(run_itg_sequential(s, x0).y == eval_recursive(s, x0));
    }
  }
}

TEST_CASE("compiled producer structure") {
  for (Int d = -7; d <= -1; ++d) {
    ir::RevProgram p = compile_producer(PredecessorSpec(d));
    CHECK(count_emits_of(p.body(), regs::g) == 2);
    CHECK(p.ports() == std::set<ir::PortId>{kProbePort});
    CHECK(p.cells() == std::set<ir::CellId>{kInjectCell});
    CHECK(p.registers() == std::set<ir::RegisterId>{regs::x, regs::s, regs::e, regs::g, regs::w,
                                                    regs::pred_div_x, regs::pred_not_div_x,
                                                    regs::t_count, regs::t_divisible,
                                                    regs::t_remainder});
  }
}

TEST_CASE("compiled producer emissions") {
  ir::LocalIo io;
  run_with_cell(compile_producer(PredecessorSpec(-1)), 3, io);
  CHECK(io.emitted(kProbePort) == std::vector<Int>{3, 0, 1, 2, 3});
  run_with_cell(compile_producer(PredecessorSpec(-2)), 3, io);
  CHECK(io.emitted(kProbePort) == std::vector<Int>{2, -1, 1, 3});
}

// Residual constants are first established by the plain transcription, then
// the compiled program is held to both.
TEST_CASE("brute-force residual oracle confirms the residual constants") {
  for (Int d = -7; d <= -1; ++d) {
    for (Int x0 = 0; x0 <= 200; ++x0) {
      oracle::ProducerTrace t = oracle::brute_producer(x0, d);
      CAPTURE(d);
      CAPTURE(x0);
      CHECK(t.s == 0);
      CHECK(t.e == 0);
      CHECK(t.x == 0);
      if (x0 % d == 0) {
        CHECK(t.g == 0);
        CHECK(t.w == 0);
        CHECK(t.pred_div_x == 1);
        CHECK(t.pred_not_div_x == 0);
        CHECK(t.cell == x0);
      } else {
        CHECK(t.g == -1);
        CHECK(t.w == d);
        CHECK(t.pred_div_x == 0);
        CHECK(t.pred_not_div_x == 1);
        CHECK(t.cell == x0 - d);
      }
    }
  }
}

TEST_CASE("compiled producer matches the transcription: emissions and residuals") {
  for (Int d = -7; d <= -1; ++d) {
    ir::RevProgram p = compile_producer(PredecessorSpec(d));
    RecursionScheme s = make_scheme(d, "x", "x+y");
    for (Int x0 = 0; x0 <= 200; ++x0) {
      ir::LocalIo io;
      ir::Store st = run_with_cell(p, x0, io);
      oracle::ProducerTrace t = oracle::brute_producer(x0, d);
      CHECK(io.emitted(kProbePort) == t.emitted);

      Emissions em = expected_emissions(s, x0);
      std::vector<Int> want{em.iterations, em.base_arg};
      want.insert(want.end(), em.h_args.begin(), em.h_args.end());
      CHECK(io.emitted(kProbePort) == want);

      ResidualReport r = residuals_from_store(st, io.cell(kInjectCell), x0 % d == 0);
      CHECK(r.s == t.s);
      CHECK(r.e == t.e);
      CHECK(r.g == t.g);
      CHECK(r.w == t.w);
      CHECK(r.x == t.x);
      CHECK(r.pred_div_x == t.pred_div_x);
      CHECK(r.pred_not_div_x == t.pred_not_div_x);
      CHECK(r.inject_cell == t.cell);
      CHECK(r == harness::expected_split_residuals(x0, d));
    }
  }
}

TEST_CASE("phase A prologue is reversible on random preloads") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<Int> small(-3, 3);
  std::uniform_int_distribution<Int> cell(-30, 60);
  for (Int d = -7; d <= -1; ++d) {
    ir::RevProgram p = compile_phase_a(PredecessorSpec(d));
    std::vector<harness::Preload> preloads;
    for (int i = 0; i < 100; ++i) {
      ir::Store st;
      for (const auto& r : p.registers()) st.set(r, small(rng));
      preloads.push_back({st, {{kInjectCell, cell(rng)}}});
    }
    CHECK(harness::check_reversibility(p, preloads).all_restored());
  }
}

TEST_CASE("full producer is reversible") {
  for (Int d = -7; d <= -1; ++d) {
    ir::RevProgram p = compile_producer(PredecessorSpec(d));
    CHECK(ir::invert(ir::invert(p)) == p);
    auto rep = harness::check_reversibility(p, {{ir::Store{}, {{kInjectCell, 7}}}});
    CHECK(rep.all_restored());
  }
}

TEST_CASE("residual report text") {
  ResidualReport r = harness::expected_split_residuals(3, -2);
  CHECK(r.to_text() ==
        "divisible = false\n"
        "s = 0\n"
        "e = 0\n"
        "g = -1\n"
        "w = -2\n"
        "x = 0\n"
        "predDivX = 0\n"
        "predNotDivX = 1\n"
        "t0 = 0\n"
        "t1 = 0\n"
        "t2 = 0\n"
        "inject = 5\n");
}
