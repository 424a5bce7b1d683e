#include "recsplit/revir.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace recsplit;
using namespace recsplit::ir;

namespace {

const std::vector<RegisterId> kData{"r0", "r1", "r2", "r3"};
const std::vector<RegisterId> kCounts{"n0", "n1"};

// Random programs that always run to completion: loop counts come from
// registers nothing writes, and branches never write their discriminator.
Block random_block(std::mt19937& rng, int depth, const std::vector<RegisterId>& frozen) {
  std::vector<RegisterId> writable;
  for (const auto& r : kData)
    if (std::find(frozen.begin(), frozen.end(), r) == frozen.end()) writable.push_back(r);
  auto any = [&](const std::vector<RegisterId>& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
  };
  std::uniform_int_distribution<int> len(0, 4);
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 6 : 4);
  std::uniform_int_distribution<Int> k(-5, 5);
  Block b;
  for (int n = len(rng); n > 0; --n) {
    if (writable.empty()) break;
    switch (kind(rng)) {
      case 0:
        b.push_back(add_const(any(writable), k(rng)));
        break;
      case 1: {
        RegisterId d = any(writable), s = any(kData);
        if (d == s) s = any(kCounts);
        b.push_back(add_reg(d, s, k(rng) < 0 ? Sign::Minus : Sign::Plus));
        break;
      }
      case 2: {
        RegisterId d = any(writable), s = any(kData);
        if (d == s) s = any(kCounts);
        b.push_back(sub_from(d, s));
        break;
      }
      case 3:
        b.push_back(emit("out", any(kData)));
        break;
      case 4:
        b.push_back(swap_cell("c", any(writable)));
        break;
      case 5:
        b.push_back(for_loop(any(kCounts), random_block(rng, depth - 1, frozen)));
        break;
      default: {
        RegisterId r = any(kData);
        std::vector<RegisterId> f = frozen;
        f.push_back(r);
        b.push_back(if_sign(r, random_block(rng, depth - 1, f), random_block(rng, depth - 1, f),
                            random_block(rng, depth - 1, f)));
      }
    }
  }
  return b;
}

RevProgram random_program(std::mt19937& rng) {
  Block b = random_block(rng, 2, {});
  std::set<RegisterId> regs(kData.begin(), kData.end());
  regs.insert(kCounts.begin(), kCounts.end());
  return RevProgram(std::move(b), regs, {"out"}, {"c"});
}

Store random_store(std::mt19937& rng) {
  std::uniform_int_distribution<Int> v(-4, 4);
  Store s;
  for (const auto& r : kData) s.set(r, v(rng));
  for (const auto& r : kCounts) s.set(r, v(rng));
  return s;
}

Block strip_emits(const Block& b) {
  Block out;
  for (const Instruction& ins : b) {
    if (std::holds_alternative<Emit>(ins.op)) continue;
    if (auto* f = std::get_if<For>(&ins.op)) {
      out.push_back(for_loop(f->count, strip_emits(f->body)));
    } else if (auto* i = std::get_if<IfSign>(&ins.op)) {
      out.push_back(if_sign(i->reg, strip_emits(i->pos), strip_emits(i->zero), strip_emits(i->neg)));
    } else {
      out.push_back(ins);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(add_reg("a", "a"), IrError);
  CHECK_THROWS_AS(sub_from("a", "a"), IrError);
  CHECK_THROWS_AS(RevProgram({add_const("a", 1)}, {"b"}), IrError);
  CHECK_THROWS_AS(RevProgram({emit("p", "a")}, {"a"}), IrError);
  CHECK_THROWS_AS(RevProgram({swap_cell("c", "a")}, {"a"}, {}, {}), IrError);
  CHECK_NOTHROW(RevProgram({for_loop("n", {add_reg("a", "b")})}, {"a", "b", "n"}));
  RevProgram p = RevProgram::from_body({emit("p", "a"), swap_cell("c", "b")});
  CHECK(p.registers() == std::set<RegisterId>{"a", "b"});
  CHECK(p.ports() == std::set<PortId>{"p"});
  CHECK(p.cells() == std::set<CellId>{"c"});
}

TEST_CASE("invert") {
  CHECK(invert(Block{add_const("x", -1)}) == Block{add_const("x", 1)});
  CHECK(invert(Block{for_loop("n", {add_const("x", -2)})}) ==
        Block{for_loop("n", {add_const("x", 2)})});
  CHECK(invert(Block{add_const("a", 1), add_reg("b", "a"), sub_from("c", "b")}) ==
        Block{sub_from("c", "b"), add_reg("b", "a", Sign::Minus), add_const("a", -1)});
  CHECK(invert(Block{emit("p", "a"), swap_cell("c", "a")}) ==
        Block{swap_cell("c", "a"), emit("p", "a")});
}

TEST_CASE("run basics") {
  LocalIo io;
  CHECK(run(RevProgram::from_body({add_const("x", 5)}), {}, io) == Store{{"x", 5}});
  Store s = run(RevProgram::from_body({add_const("n", 3), for_loop("n", {add_const("y", 2)})}), {}, io);
  CHECK(s.get("y") == 6);
  CHECK(s.get("n") == 3);
  s = run(RevProgram::from_body({add_const("n", -2), for_loop("n", {add_const("y", 1)})}), {}, io);
  CHECK(s.get("y") == -2);
  CHECK(s.get("untouched") == 0);

  s = run(RevProgram::from_body({add_const("a", 7), add_const("b", 3), sub_from("b", "a")}), {}, io);
  CHECK(s.get("b") == 4);

  LocalIo cells({{"c", 9}});
  s = run(RevProgram::from_body({add_const("a", 2), swap_cell("c", "a"), emit("p", "a")}), {}, cells);
  CHECK(s.get("a") == 9);
  CHECK(cells.cell("c") == 2);
  CHECK(cells.emitted("p") == std::vector<Int>{9});
}

TEST_CASE("ifsign dispatch") {
  Block b{if_sign("r", {add_const("o", 1)}, {add_const("o", 2)}, {add_const("o", 3)})};
  for (auto [r, o] : {std::pair<Int, Int>{5, 1}, {0, 2}, {-5, 3}}) {
    LocalIo io;
    CHECK(run(RevProgram::from_body(b), Store{{"r", r}}, io).get("o") == o);
  }
  // Temporarily crossing zero is allowed as long as the sign is restored.
  LocalIo io;
  Block dip{if_sign("x", {add_const("x", -3), emit("p", "x"), add_const("x", 3)}, {}, {})};
  CHECK(run(RevProgram::from_body(dip), Store{{"x", 1}}, io).get("x") == 1);
  CHECK(io.emitted("p") == std::vector<Int>{-2});
}

TEST_CASE("discipline violations") {
  LocalIo io;
  Block flips{if_sign("x", {add_const("x", -5)}, {}, {})};
  CHECK_THROWS_AS(run(RevProgram::from_body(flips), Store{{"x", 2}}, io), BranchSignViolation);
  Block zero_to_pos{if_sign("x", {}, {add_const("x", 1)}, {})};
  CHECK_THROWS_AS(run(RevProgram::from_body(zero_to_pos), {}, io), BranchSignViolation);
  Block writes_count{for_loop("n", {add_const("n", 1)})};
  CHECK_THROWS_AS(run(RevProgram::from_body(writes_count), Store{{"n", 2}}, io), LoopCountMutation);
  Block swaps_count{for_loop("n", {swap_cell("c", "n")})};
  LocalIo cells({{"c", 4}});
  CHECK_THROWS_AS(run(RevProgram::from_body(swaps_count), Store{{"n", 1}}, cells), LoopCountMutation);
  CHECK_THROWS_AS(run(RevProgram::from_body({add_const("a", std::numeric_limits<Int>::max()),
                                             add_const("a", 1)}),
                      {}, io),
                  OverflowError);
}

TEST_CASE("for-negation duality") {
  Block body{add_const("y", 3), add_reg("z", "y")};
  for (Int k = 0; k <= 6; ++k) {
    LocalIo io;
    Store neg = run(RevProgram::from_body({for_loop("n", body)}), Store{{"n", -k}, {"y", 1}}, io);
    Store pos = run(RevProgram::from_body({for_loop("m", invert(body))}), Store{{"m", k}, {"y", 1}}, io);
    neg.set("n", 0);
    pos.set("m", 0);
    CHECK(neg == pos);
  }
}

TEST_CASE("random programs: involution, reversibility, emit neutrality") {
  std::mt19937 rng(2024);
  int completed = 0;
  for (int i = 0; i < 300; ++i) {
    RevProgram p = random_program(rng);
    CHECK(invert(invert(p)) == p);
    RevProgram inv = invert(p);
    RevProgram silent(strip_emits(p.body()), p.registers(), p.ports(), p.cells());
    for (int j = 0; j < 5; ++j) {
      Store start = random_store(rng);
      Int c0 = std::uniform_int_distribution<Int>(-4, 4)(rng);
      LocalIo io({{"c", c0}});
      Store mid = run(p, start, io);
      Int mid_cell = io.cell("c");
      io.set_sink(LocalIo::Sink::Discard);
      Store back = run(inv, mid, io);
      CHECK(back == start);
      CHECK(io.cell("c") == c0);

      LocalIo quiet({{"c", c0}});
      CHECK(run(silent, start, quiet) == mid);
      CHECK(quiet.cell("c") == mid_cell);
      ++completed;
    }
  }
  CHECK(completed == 1500);
}

TEST_CASE("loop inversion on random stores") {
  std::mt19937 rng(7);
  RevProgram p = RevProgram::from_body({for_loop("n", {add_const("x", -2)})});
  RevProgram inv = invert(p);
  for (int i = 0; i < 100; ++i) {
    Store s{{"n", std::uniform_int_distribution<Int>(-20, 20)(rng)},
            {"x", std::uniform_int_distribution<Int>(-100, 100)(rng)}};
    LocalIo io;
    CHECK(run(inv, run(p, s, io), io) == s);
  }
}

TEST_CASE("dump format") {
  RevProgram p = RevProgram::from_body({
      add_const("x", -1),
      add_reg("w", "x", Sign::Minus),
      for_loop("t", {if_sign("x", {emit("probe", "g")}, {}, {sub_from("a", "b")})}),
      swap_cell("inject", "x"),
  });
  CHECK(dump(p) ==
        "add x, -1\n"
        "addreg w, -x\n"
        "for t {\n"
        "  ifsign x {\n"
        "    pos {\n"
        "      emit probe, g\n"
        "    }\n"
        "    zero {}\n"
        "    neg {\n"
        "      subfrom a, b\n"
        "    }\n"
        "  }\n"
        "}\n"
        "swapcell inject, x\n");
}
