#include "recsplit/producer.hpp"

#include <sstream>

namespace recsplit::producer {

using namespace ir;

PhaseACounters phase_a_counters(Int x0, Int delta) {
  if (x0 < 0) throw NegativeInput(x0);
  PredecessorSpec p(delta);  // validates delta
  PhaseACounters c;
  const Int visits = checked_add(x0, 1);
  c.x_final = checked_add(x0, checked_mul(visits, delta));
  if (x0 % delta == 0) {
    c.e = 1;
    c.g = -(x0 / delta);
  } else {
    c.e = 0;
    c.g = -floor_div(x0, delta);
  }
  c.s = visits - c.g - c.e;
  return c;
}

std::string ResidualReport::to_text() const {
  std::ostringstream out;
  out << "divisible = " << (divisible ? "true" : "false") << '\n';
  out << "s = " << s << '\n';
  out << "e = " << e << '\n';
  out << "g = " << g << '\n';
  out << "w = " << w << '\n';
  out << "x = " << x << '\n';
  out << "predDivX = " << pred_div_x << '\n';
  out << "predNotDivX = " << pred_not_div_x << '\n';
  for (const auto& [name, v] : temps) out << name << " = " << v << '\n';
  if (z) out << "z = " << *z << '\n';
  if (inject_cell) out << "inject = " << *inject_cell << '\n';
  return out.str();
}

ResidualReport residuals_from_store(const Store& store, std::optional<Int> inject_cell,
                                    bool divisible) {
  ResidualReport r;
  r.s = store.get(regs::s);
  r.e = store.get(regs::e);
  r.g = store.get(regs::g);
  r.w = store.get(regs::w);
  r.x = store.get(regs::x);
  r.pred_div_x = store.get(regs::pred_div_x);
  r.pred_not_div_x = store.get(regs::pred_not_div_x);
  for (const auto* t : {&regs::t_count, &regs::t_divisible, &regs::t_remainder})
    r.temps[*t] = store.get(*t);
  r.inject_cell = inject_cell;
  r.divisible = divisible;
  return r;
}

SequentialResult run_itg_sequential(const RecursionScheme& sch, Int x0) {
  if (x0 < 0) throw NegativeInput(x0);
  const PredecessorSpec& p = sch.pred;
  auto b = [&](Int x) { return eval_expr(sch.base, Env{Value(x), std::nullopt}); };
  auto h = [&](Int x, const Value& y) { return eval_expr(sch.step, Env{Value(x), y}); };

  Int s = 0, e = 0, g = 0, w = 0;
  Int z = 0, pred_div_x = 0, pred_not_div_x = 1;
  Int x = x0;
  Value y = 0;

  w = checked_add(w, x);
  for (Int i = 0; i <= w; ++i) {
    if (x > 0)
      ++g;
    else if (x == 0)
      ++e;
    else
      ++s;
    x = p.pred(x);
  }

  for (Int i = 0; i < e; ++i) {
    pred_div_x = checked_add(pred_div_x, pred_not_div_x);
    pred_not_div_x = checked_sub(pred_div_x, pred_not_div_x);
  }

  for (Int j = 0; j < pred_div_x; ++j) {
    for (Int i = 0; i <= w; ++i) {
      x = p.pred_inv(x);
      if (x > 0) {
        --g;
        y = h(x, y);
      } else if (x == 0) {
        --e;
        y = b(x);
      } else {
        --s;
      }
    }
  }

  for (Int j = 0; j < pred_not_div_x; ++j) {
    ++w;
    for (Int i = 0; i <= w; ++i) {
      x = p.pred_inv(x);
      if (x > 0) {
        --g;
        x = p.pred(x);
        if (z < 0) {
        } else if (z == 0) {
          y = b(x);
          ++z;
        } else {
          y = h(x, y);
        }
        x = p.pred_inv(x);
      } else if (x == 0) {
        --e;
      } else {
        --s;
      }
    }
    --w;
  }
  for (Int i = 0; i < pred_not_div_x; ++i) --z;
  w = checked_sub(w, x);

  SequentialResult out;
  out.y = std::move(y);
  ResidualReport& r = out.residuals;
  r.s = s;
  r.e = e;
  r.g = g;
  r.w = w;
  r.x = x;
  r.pred_div_x = pred_div_x;
  r.pred_not_div_x = pred_not_div_x;
  r.z = z;
  r.divisible = x0 % p.delta() == 0;
  return out;
}

namespace {

// for (i = 0; i <= w; i++) body, with the w + 1 bound held in temp.
Block upto_w_inclusive(const RegisterId& temp, Block body) {
  return {
      add_reg(temp, regs::w, Sign::Plus),
      add_const(temp, 1),
      for_loop(temp, std::move(body)),
      add_const(temp, -1),
      add_reg(temp, regs::w, Sign::Minus),
  };
}

void append(Block& dst, Block src) {
  for (Instruction& i : src) dst.push_back(std::move(i));
}

Block counting_phase(const PredecessorSpec& p) {
  Block out{
      swap_cell(kInjectCell, regs::x),  // read x from the consumer
      add_reg(regs::w, regs::x, Sign::Plus),
  };
  append(out, upto_w_inclusive(regs::t_count,
                               {
                                   if_sign(regs::x, {add_const(regs::g, 1)},
                                           {add_const(regs::e, 1)}, {add_const(regs::s, 1)}),
                                   add_const(regs::x, p.delta()),
                               }));
  return out;
}

}  // namespace

RevProgram compile_phase_a(const PredecessorSpec& p) { return RevProgram::from_body(counting_phase(p)); }

RevProgram compile_producer(const PredecessorSpec& p) {
  const Int delta = p.delta();
  const Int stride = p.stride();

  Block body{add_const(regs::pred_not_div_x, 1)};
  append(body, counting_phase(p));

  // e == 1 exactly when delta divides x0: (0, 1) -> (1, 0).
  body.push_back(for_loop(regs::e, {
                                       add_reg(regs::pred_div_x, regs::pred_not_div_x, Sign::Plus),
                                       sub_from(regs::pred_not_div_x, regs::pred_div_x),
                                   }));

  Block divisible{emit(kProbePort, regs::g)};
  append(divisible,
         upto_w_inclusive(regs::t_divisible,
                          {
                              add_const(regs::x, stride),
                              if_sign(regs::x, {add_const(regs::g, -1), emit(kProbePort, regs::x)},
                                      {add_const(regs::e, -1), emit(kProbePort, regs::x)},
                                      {add_const(regs::s, -1)}),
                          }));
  body.push_back(for_loop(regs::pred_div_x, std::move(divisible)));

  // x is one step ahead on the first positive value, so step back to emit.
  Block remainder{emit(kProbePort, regs::g), add_const(regs::w, 1)};
  append(remainder, upto_w_inclusive(regs::t_remainder,
                                     {
                                         add_const(regs::x, stride),
                                         if_sign(regs::x,
                                                 {
                                                     add_const(regs::g, -1),
                                                     add_const(regs::x, delta),
                                                     emit(kProbePort, regs::x),
                                                     add_const(regs::x, stride),
                                                 },
                                                 {add_const(regs::e, -1)}, {add_const(regs::s, -1)}),
                                     }));
  remainder.push_back(add_const(regs::w, -1));
  body.push_back(for_loop(regs::pred_not_div_x, std::move(remainder)));

  body.push_back(add_reg(regs::w, regs::x, Sign::Minus));
  body.push_back(swap_cell(kInjectCell, regs::x));  // restore initial x

  return RevProgram::from_body(std::move(body));
}

}  // namespace recsplit::producer
