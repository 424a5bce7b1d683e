#include "recsplit/revir.hpp"

#include <sstream>

namespace recsplit::ir {

bool For::operator==(const For& o) const { return count == o.count && body == o.body; }

bool IfSign::operator==(const IfSign& o) const {
  return reg == o.reg && pos == o.pos && zero == o.zero && neg == o.neg;
}

Instruction add_const(RegisterId r, Int k) { return {AddConst{std::move(r), k}}; }

Instruction add_reg(RegisterId dst, RegisterId src, Sign sign) {
  if (dst == src) throw IrError("add_reg: destination and source must differ (" + dst + ")");
  return {AddReg{std::move(dst), std::move(src), sign}};
}

Instruction sub_from(RegisterId dst, RegisterId src) {
  if (dst == src) throw IrError("sub_from: destination and source must differ (" + dst + ")");
  return {SubFrom{std::move(dst), std::move(src)}};
}

Instruction for_loop(RegisterId count, Block body) {
  return {For{std::move(count), std::move(body)}};
}

Instruction if_sign(RegisterId reg, Block pos, Block zero, Block neg) {
  return {IfSign{std::move(reg), std::move(pos), std::move(zero), std::move(neg)}};
}

Instruction emit(PortId port, RegisterId reg) { return {Emit{std::move(port), std::move(reg)}}; }

Instruction swap_cell(CellId cell, RegisterId reg) {
  return {SwapCell{std::move(cell), std::move(reg)}};
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Names {
  std::set<RegisterId> registers;
  std::set<PortId> ports;
  std::set<CellId> cells;
};

void collect(const Block& b, Names& n) {
  for (const Instruction& ins : b) {
    std::visit(overloaded{
                   [&](const AddConst& i) { n.registers.insert(i.reg); },
                   [&](const AddReg& i) {
                     n.registers.insert(i.dst);
                     n.registers.insert(i.src);
                   },
                   [&](const SubFrom& i) {
                     n.registers.insert(i.dst);
                     n.registers.insert(i.src);
                   },
                   [&](const For& i) {
                     n.registers.insert(i.count);
                     collect(i.body, n);
                   },
                   [&](const IfSign& i) {
                     n.registers.insert(i.reg);
                     collect(i.pos, n);
                     collect(i.zero, n);
                     collect(i.neg, n);
                   },
                   [&](const Emit& i) {
                     n.ports.insert(i.port);
                     n.registers.insert(i.reg);
                   },
                   [&](const SwapCell& i) {
                     n.cells.insert(i.cell);
                     n.registers.insert(i.reg);
                   },
               },
               ins.op);
  }
}

template <class Set>
void require_subset(const Set& used, const Set& declared, const char* what) {
  for (const auto& name : used)
    if (!declared.contains(name)) throw IrError(std::string("undeclared ") + what + " '" + name + "'");
}

}  // namespace

RevProgram::RevProgram(Block body, std::set<RegisterId> registers, std::set<PortId> ports,
                       std::set<CellId> cells)
    : body_(std::move(body)),
      registers_(std::move(registers)),
      ports_(std::move(ports)),
      cells_(std::move(cells)) {
  Names used;
  collect(body_, used);
  require_subset(used.registers, registers_, "register");
  require_subset(used.ports, ports_, "port");
  require_subset(used.cells, cells_, "cell");
}

RevProgram RevProgram::from_body(Block body) {
  Names used;
  collect(body, used);
  return RevProgram(std::move(body), std::move(used.registers), std::move(used.ports),
                    std::move(used.cells));
}

namespace {

Instruction invert_one(const Instruction& ins) {
  return std::visit(
      overloaded{
          [](const AddConst& i) -> Instruction { return {AddConst{i.reg, checked_neg(i.k)}}; },
          [](const AddReg& i) -> Instruction {
            return {AddReg{i.dst, i.src, i.sign == Sign::Plus ? Sign::Minus : Sign::Plus}};
          },
          [](const SubFrom& i) -> Instruction { return {i}; },
          [](const For& i) -> Instruction { return {For{i.count, invert(i.body)}}; },
          [](const IfSign& i) -> Instruction {
            return {IfSign{i.reg, invert(i.pos), invert(i.zero), invert(i.neg)}};
          },
          [](const Emit& i) -> Instruction { return {i}; },
          [](const SwapCell& i) -> Instruction { return {i}; },
      },
      ins.op);
}

}  // namespace

Block invert(const Block& b) {
  Block out;
  out.reserve(b.size());
  for (auto it = b.rbegin(); it != b.rend(); ++it) out.push_back(invert_one(*it));
  return out;
}

RevProgram invert(const RevProgram& p) {
  return RevProgram(invert(p.body()), p.registers(), p.ports(), p.cells());
}

Store::Store(std::initializer_list<std::pair<const RegisterId, Int>> init) : values_(init) {}

Int Store::get(const RegisterId& r) const {
  auto it = values_.find(r);
  return it == values_.end() ? 0 : it->second;
}

void Store::set(const RegisterId& r, Int v) { values_[r] = v; }

std::map<RegisterId, Int> Store::nonzero() const {
  std::map<RegisterId, Int> out;
  for (const auto& [k, v] : values_)
    if (v != 0) out.emplace(k, v);
  return out;
}

bool operator==(const Store& a, const Store& b) { return a.nonzero() == b.nonzero(); }

void LocalIo::emit(const PortId& port, Int value) {
  if (sink_ == Sink::Record) emitted_[port].push_back(value);
}

Int LocalIo::swap(const CellId& cell, Int value) {
  Int& slot = cells_[cell];
  Int old = slot;
  slot = value;
  return old;
}

Int LocalIo::cell(const CellId& c) const {
  auto it = cells_.find(c);
  return it == cells_.end() ? 0 : it->second;
}

const std::vector<Int>& LocalIo::emitted(const PortId& port) const {
  static const std::vector<Int> empty;
  auto it = emitted_.find(port);
  return it == emitted_.end() ? empty : it->second;
}

LoopCountMutation::LoopCountMutation(const RegisterId& r)
    : RunError("loop body modified its count register '" + r + "'") {}

BranchSignViolation::BranchSignViolation(const RegisterId& r, Int before, Int after)
    : RunError("branch changed the sign of '" + r + "' from " + std::to_string(before) + " to " +
               std::to_string(after)) {}

namespace {

int sign_of(Int v) { return (v > 0) - (v < 0); }

void exec(const Instruction& ins, Store& s, IoBinding& io) {
  std::visit(overloaded{
                 [&](const AddConst& i) { s.set(i.reg, checked_add(s.get(i.reg), i.k)); },
                 [&](const AddReg& i) {
                   Int d = s.get(i.dst), v = s.get(i.src);
                   s.set(i.dst, i.sign == Sign::Plus ? checked_add(d, v) : checked_sub(d, v));
                 },
                 [&](const SubFrom& i) {
                   s.set(i.dst, checked_sub(s.get(i.src), s.get(i.dst)));
                 },
                 [&](const For& i) {
                   const Int n = s.get(i.count);
                   if (n == 0) return;
                   Block inverted;
                   const Block& body = n > 0 ? i.body : (inverted = invert(i.body));
                   const Int times = n > 0 ? n : checked_neg(n);
                   for (Int k = 0; k < times; ++k) {
                     run_block(body, s, io);
                     if (s.get(i.count) != n) throw LoopCountMutation(i.count);
                   }
                 },
                 [&](const IfSign& i) {
                   const Int before = s.get(i.reg);
                   const int sg = sign_of(before);
                   run_block(sg > 0 ? i.pos : sg == 0 ? i.zero : i.neg, s, io);
                   const Int after = s.get(i.reg);
                   if (sign_of(after) != sg) throw BranchSignViolation(i.reg, before, after);
                 },
                 [&](const Emit& i) { io.emit(i.port, s.get(i.reg)); },
                 [&](const SwapCell& i) { s.set(i.reg, io.swap(i.cell, s.get(i.reg))); },
             },
             ins.op);
}

void dump_block(const Block& b, int depth, std::ostringstream& out);

void line(std::ostringstream& out, int depth, const std::string& text) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << text << '\n';
}

void dump_one(const Instruction& ins, int depth, std::ostringstream& out) {
  std::visit(overloaded{
                 [&](const AddConst& i) { line(out, depth, "add " + i.reg + ", " + std::to_string(i.k)); },
                 [&](const AddReg& i) {
                   line(out, depth,
                        "addreg " + i.dst + ", " + (i.sign == Sign::Plus ? "+" : "-") + i.src);
                 },
                 [&](const SubFrom& i) { line(out, depth, "subfrom " + i.dst + ", " + i.src); },
                 [&](const For& i) {
                   line(out, depth, "for " + i.count + " {");
                   dump_block(i.body, depth + 1, out);
                   line(out, depth, "}");
                 },
                 [&](const IfSign& i) {
                   line(out, depth, "ifsign " + i.reg + " {");
                   const std::pair<const char*, const Block*> arms[] = {
                       {"pos", &i.pos}, {"zero", &i.zero}, {"neg", &i.neg}};
                   for (const auto& [name, blk] : arms) {
                     if (blk->empty()) {
                       line(out, depth + 1, std::string(name) + " {}");
                       continue;
                     }
                     line(out, depth + 1, std::string(name) + " {");
                     dump_block(*blk, depth + 2, out);
                     line(out, depth + 1, "}");
                   }
                   line(out, depth, "}");
                 },
                 [&](const Emit& i) { line(out, depth, "emit " + i.port + ", " + i.reg); },
                 [&](const SwapCell& i) { line(out, depth, "swapcell " + i.cell + ", " + i.reg); },
             },
             ins.op);
}

void dump_block(const Block& b, int depth, std::ostringstream& out) {
  for (const Instruction& ins : b) dump_one(ins, depth, out);
}

}  // namespace

void run_block(const Block& b, Store& s, IoBinding& io) {
  for (const Instruction& ins : b) exec(ins, s, io);
}

Store run(const RevProgram& p, Store s, IoBinding& io) {
  run_block(p.body(), s, io);
  return s;
}

std::string dump(const Block& b) {
  std::ostringstream out;
  dump_block(b, 0, out);
  return out.str();
}

std::string dump(const RevProgram& p) { return dump(p.body()); }

}  // namespace recsplit::ir
