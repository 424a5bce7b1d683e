#include "recsplit/consumer.hpp"

#include "recsplit/scheme.hpp"

namespace recsplit {

ConsumerConfig::ConsumerConfig(Expression b, Expression h, Int x0)
    : base(std::move(b)), step(std::move(h)), input(x0) {
  if (x0 < 0) throw NegativeInput(x0);
  if (base.free_vars().contains(Var::Y))
    throw std::invalid_argument("base expression may only mention x");
}

}  // namespace recsplit
