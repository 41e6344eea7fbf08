#pragma once

#include "rlp/logkb.hpp"
#include "rlp/rlp_ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace rlp::grounder {

struct GroundError : std::runtime_error {
  explicit GroundError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sparse affine expression over LP columns; zero coefficients are dropped.
struct LinExpr {
  Rational constant;
  std::map<int, Rational> coeffs;

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  void scale(const Rational& k);
  bool is_constant() const { return coeffs.empty(); }
};

struct Row {
  LinExpr expr;        // lhs - rhs with the constant moved to the right
  lang::RelOp rel;
  Rational rhs;
  std::string provenance;  // constraint label plus the index substitution
};

struct SizeReport {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t nonzeros = 0;  // coefficient entries over all rows
};

struct GroundLp {
  bool maximize = false;
  std::vector<Atom> var_names;            // column order = first occurrence
  std::vector<Rational> c;                // objective coefficients
  Rational objective_offset;              // constant part of the objective
  std::vector<Row> rows;
  std::vector<std::string> warnings;

  SizeReport stats() const;
  int column(const Atom& name) const;  // -1 when absent
  std::string to_json() const;         // exact rational strings, stable order
};

// Expands a validated, definition-free (or prenex) model against a
// materialized KB. Columns are created at first mention during a fixed
// traversal: objective first, then constraints in source order, query
// results in their deterministic order.
GroundLp ground(const lang::RlpModel& model, const logkb::MaterializedKb& kb);

}  // namespace rlp::grounder
