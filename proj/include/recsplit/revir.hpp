#pragma once

// A small SRL/RPP-flavoured reversible IR: constant and register increments,
// value-driven loops, sign dispatch, plus two effect instructions (Emit to a
// port, SwapCell with an external cell).

#include "recsplit/checked.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace recsplit::ir {

using RegisterId = std::string;
using PortId = std::string;
using CellId = std::string;

struct Instruction;
using Block = std::vector<Instruction>;

enum class Sign { Plus, Minus };

/// r := r + k
struct AddConst {
  RegisterId reg;
  Int k;
  bool operator==(const AddConst&) const = default;
};

/// dst := dst +/- src, dst != src
struct AddReg {
  RegisterId dst;
  RegisterId src;
  Sign sign;
  bool operator==(const AddReg&) const = default;
};

/// dst := src - dst, dst != src; self-inverse
struct SubFrom {
  RegisterId dst;
  RegisterId src;
  bool operator==(const SubFrom&) const = default;
};

/// Runs body value(count) times, or invert(body) |value(count)| times when
/// negative. The count is read once; the body must leave it unchanged.
struct For {
  RegisterId count;
  Block body;
  bool operator==(const For&) const;
};

/// Three-way dispatch on the sign of reg; the branch taken must leave the sign unchanged.
struct IfSign {
  RegisterId reg;
  Block pos;
  Block zero;
  Block neg;
  bool operator==(const IfSign&) const;
};

struct Emit {
  PortId port;
  RegisterId reg;
  bool operator==(const Emit&) const = default;
};

struct SwapCell {
  CellId cell;
  RegisterId reg;
  bool operator==(const SwapCell&) const = default;
};

struct Instruction {
  std::variant<AddConst, AddReg, SubFrom, For, IfSign, Emit, SwapCell> op;
  bool operator==(const Instruction&) const = default;
};

class IrError : public std::logic_error {
 public:
  explicit IrError(const std::string& msg) : std::logic_error(msg) {}
};

// Constructors; add_reg and sub_from reject dst == src.
Instruction add_const(RegisterId r, Int k);
Instruction add_reg(RegisterId dst, RegisterId src, Sign sign = Sign::Plus);
Instruction sub_from(RegisterId dst, RegisterId src);
Instruction for_loop(RegisterId count, Block body);
Instruction if_sign(RegisterId reg, Block pos, Block zero, Block neg);
Instruction emit(PortId port, RegisterId reg);
Instruction swap_cell(CellId cell, RegisterId reg);

/// Well-formed program: every referenced register, port and cell is declared.
class RevProgram {
 public:
  RevProgram(Block body, std::set<RegisterId> registers, std::set<PortId> ports = {},
             std::set<CellId> cells = {});

  /// Declares exactly the names the body references.
  static RevProgram from_body(Block body);

  const Block& body() const { return body_; }
  const std::set<RegisterId>& registers() const { return registers_; }
  const std::set<PortId>& ports() const { return ports_; }
  const std::set<CellId>& cells() const { return cells_; }

  bool operator==(const RevProgram&) const = default;

 private:
  Block body_;
  std::set<RegisterId> registers_;
  std::set<PortId> ports_;
  std::set<CellId> cells_;
};

Block invert(const Block& b);
RevProgram invert(const RevProgram& p);

/// Total register state; unset registers read as 0.
class Store {
 public:
  Store() = default;
  Store(std::initializer_list<std::pair<const RegisterId, Int>> init);

  Int get(const RegisterId& r) const;
  void set(const RegisterId& r, Int v);

  /// Equality ignores the difference between absent and explicit 0.
  friend bool operator==(const Store& a, const Store& b);

  /// Non-zero entries, sorted by name.
  std::map<RegisterId, Int> nonzero() const;

 private:
  std::map<RegisterId, Int> values_;
};

/// Effects the interpreter cannot perform on its own store.
class IoBinding {
 public:
  virtual ~IoBinding() = default;
  virtual void emit(const PortId& port, Int value) = 0;
  /// Exchanges value with the cell; returns the cell's previous content.
  virtual Int swap(const CellId& cell, Int value) = 0;
};

/// In-memory cells with an optional recording sink.
class LocalIo final : public IoBinding {
 public:
  enum class Sink { Record, Discard };

  explicit LocalIo(std::map<CellId, Int> cells = {}, Sink sink = Sink::Record)
      : cells_(std::move(cells)), sink_(sink) {}

  void emit(const PortId& port, Int value) override;
  Int swap(const CellId& cell, Int value) override;

  void set_sink(Sink s) { sink_ = s; }
  const std::map<CellId, Int>& cells() const { return cells_; }
  Int cell(const CellId& c) const;
  /// Values emitted on port, in program order.
  const std::vector<Int>& emitted(const PortId& port) const;

 private:
  std::map<CellId, Int> cells_;
  std::map<PortId, std::vector<Int>> emitted_;
  Sink sink_;
};

class RunError : public std::runtime_error {
 public:
  explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

class LoopCountMutation : public RunError {
 public:
  explicit LoopCountMutation(const RegisterId& r);
};

class BranchSignViolation : public RunError {
 public:
  BranchSignViolation(const RegisterId& r, Int before, Int after);
};

/// Executes p on s. Throws LoopCountMutation, BranchSignViolation or OverflowError.
Store run(const RevProgram& p, Store s, IoBinding& io);
void run_block(const Block& b, Store& s, IoBinding& io);

/// One instruction per line, nested blocks indented by two spaces.
std::string dump(const RevProgram& p);
std::string dump(const Block& b);

}  // namespace recsplit::ir
