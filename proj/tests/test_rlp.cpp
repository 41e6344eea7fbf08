#include "rlp/rlp_ast.hpp"
#include "rlp/ground_lp.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <random>

using namespace rlp;
using namespace rlp::lang;

TEST_CASE("flow model parses into the expected shape") {
  auto m = parse_rlp(read_model("flow.rlp"));
  REQUIRE(m.var_decls.size() == 1);
  CHECK(m.var_decls[0].predicate == "flow");
  CHECK(m.var_decls[0].arity == 2);
  REQUIRE(m.definitions.size() == 2);
  CHECK(m.definitions[0].head.predicate == "outflow");
  CHECK(m.definitions[1].head.predicate == "inflow");
  CHECK(m.objective.maximize);
  REQUIRE(m.constraints.size() == 3);
  CHECK(m.constraints[0].rel == RelOp::Eq);
  CHECK(m.constraints[1].rel == RelOp::Ge);
  CHECK(m.constraints[2].rel == RelOp::Ge);
  CHECK(m.constraints[0].index_query.size() == 3);

  CHECK(m.role("flow", 2) == Role::LpVar);
  CHECK(m.role("outflow", 1) == Role::Defined);
  CHECK(m.role("cap", 2) == Role::Parameter);
}

TEST_CASE("chained double bound expands into two templates") {
  auto m = parse_rlp(
      "var weight/1;\n"
      "minimize: sum {attribute(_, J)} weight(J);\n"
      "subject to {attribute(_, J)}: -1 <= weight(J) <= 1;\n");
  REQUIRE(m.constraints.size() == 2);
  CHECK(m.constraints[0].rel == RelOp::Le);
  CHECK(m.constraints[1].rel == RelOp::Le);
  CHECK(print_expr(m.constraints[0].rhs) == print_expr(m.constraints[1].lhs));
}

TEST_CASE("multiple objectives are rejected") {
  CHECK_THROWS_AS(parse_rlp("maximize: x; maximize: x;"), RlpError);
  CHECK_THROWS_AS(parse_rlp("var p/1;"), RlpError);  // none at all
}

TEST_CASE("duplicate var declarations are rejected") {
  CHECK_THROWS_AS(parse_rlp("var p/1; var p/1; minimize: sum {q(X)} p(X);"),
                  RlpError);
}

TEST_CASE("maximise and maximize are synonyms") {
  auto a = parse_rlp("var p/0;\nmaximize: p;");
  auto b = parse_rlp("var p/0;\nmaximise: p;");
  CHECK(a.objective.maximize);
  CHECK(a == b);
}

TEST_CASE("parse-print-parse is the identity") {
  for (const char* name : {"flow.rlp", "toy.rlp"}) {
    auto m1 = parse_rlp(read_model(name));
    auto m2 = parse_rlp(print_rlp(m1));
    CHECK(m1 == m2);
    CHECK(print_rlp(m1) == print_rlp(m2));
  }
  // multiset sums and nested arithmetic
  const char* tricky =
      "var w/1;\n"
      "deg(I) = sum <sim_edge(I, _)> 1;\n"
      "minimize: sum {node(I)} (w(I) * (deg(I) - 1) / 2);\n"
      "subject to {node(I), deg2(I) >= 2}: w(I) >= 0;\n";
  auto m1 = parse_rlp(tricky);
  auto m2 = parse_rlp(print_rlp(m1));
  CHECK(m1 == m2);
}

TEST_CASE("validate accepts the flow model against its fixture") {
  auto model = parse_rlp(read_model("flow.rlp"));
  auto prog = logkb::parse_logkb(read_model("flow_fig4.lkb"));
  auto report = validate(model, prog);
  CHECK(report.ok());
  CHECK(report.str() == "");
}

TEST_CASE("objective variables must be sum-bound") {
  auto model = parse_rlp("var value/1;\nmaximize: value(S);");
  auto prog = logkb::parse_logkb("state(s0).");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("not bound") != std::string::npos);
}

TEST_CASE("recursive definitions are rejected") {
  auto model = parse_rlp(
      "var x/1;\n"
      "f(X) = f(X) + 1;\n"
      "minimize: sum {q(X)} (x(X) * f(X));\n");
  auto prog = logkb::parse_logkb("q(a).");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("recursive") != std::string::npos);
}

TEST_CASE("unresolvable parameters are reported") {
  auto model = parse_rlp(
      "var x/1;\n"
      "minimize: sum {q(X)} (cost(X) * x(X));\n");
  auto prog = logkb::parse_logkb("q(a).");  // no cost/1 anywhere
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("cost/1") != std::string::npos);
}

TEST_CASE("declared variables cannot appear in queries") {
  auto model = parse_rlp(
      "var x/1;\n"
      "minimize: sum {x(X)} x(X);\n");
  auto prog = logkb::parse_logkb("q(a).");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
}

TEST_CASE("constraint variables must come from the index query or sums") {
  auto model = parse_rlp(
      "var v/1;\n"
      "maximize: sum {state(S)} v(S);\n"
      "subject to {state(S)}: v(S) <= reward(S, A);\n");
  auto prog = logkb::parse_logkb("state(s0). reward(s0, up) = 1.");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("A") != std::string::npos);
}

TEST_CASE("unsafe index queries are reported") {
  auto model = parse_rlp(
      "var v/1;\n"
      "maximize: sum {state(S)} v(S);\n"
      "subject to {not state(S)}: 1 <= 2;\n");
  auto prog = logkb::parse_logkb("state(s0).");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
}

TEST_CASE("scalar factors are pushed inside sums") {
  auto model = parse_rlp(
      "var p/1;\n"
      "minimize: 2 * sum {q(X)} p(X);\n");
  auto flat = to_prenex(model);
  const ParExpr& e = flat.objective.expr;
  REQUIRE(e.kind == ParExpr::Kind::SumSet);
  REQUIRE(e.kids[0].kind == ParExpr::Kind::Mul);
  CHECK(e.kids[0].kids[0].kind == ParExpr::Kind::Number);
  CHECK(print_expr(e) == "sum {q(X)} (2 * p(X))");
}

TEST_CASE("sums of separate branches stay untouched") {
  auto model = parse_rlp(
      "var p/1; var s/1;\n"
      "minimize: sum {q(X)} p(X) + sum {r(Y)} s(Y);\n");
  auto flat = to_prenex(model);
  CHECK(print_expr(flat.objective.expr) ==
        "sum {q(X)} p(X) + sum {r(Y)} s(Y)");
}

TEST_CASE("negation distributes into sums") {
  auto model = parse_rlp(
      "var p/1;\n"
      "minimize: -sum {q(X)} p(X);\n");
  auto flat = to_prenex(model);
  REQUIRE(flat.objective.expr.kind == ParExpr::Kind::SumSet);
  CHECK(flat.objective.expr.kids[0].kind == ParExpr::Kind::Neg);
}

TEST_CASE("definition inlining yields the nested prenex objective") {
  auto model = parse_rlp(read_model("flow.rlp"));
  auto flat = to_prenex(model);
  const ParExpr& e = flat.objective.expr;
  // sum {source(X)} sum {edge(X, Y')} flow(X, Y')
  REQUIRE(e.kind == ParExpr::Kind::SumSet);
  CHECK(logkb::to_string(e.query[0]) == "source(X)");
  REQUIRE(e.kids[0].kind == ParExpr::Kind::SumSet);
  const ParExpr& inner = e.kids[0];
  CHECK(inner.query.size() == 1);
  CHECK(inner.query[0].atom.predicate == "edge");
  REQUIRE(inner.kids[0].kind == ParExpr::Kind::AtomRef);
  CHECK(inner.kids[0].atom.predicate == "flow");
  // the renamed sum variable matches between query and body
  CHECK(inner.query[0].atom.args[1] == inner.kids[0].atom.args[1]);
  CHECK(inner.query[0].atom.args[1].name != "Y");
  CHECK(flat.definitions.empty());
}

TEST_CASE("correlated variables survive prenexing unrenamed") {
  // the inner sum correlates X with the outer binder rather than
  // shadowing it; distribution must keep that correlation intact
  auto model = parse_rlp(
      "var p/1;\n"
      "minimize: sum {outer(X)} (cost(X) * sum {q(X)} p(X));\n");
  auto flat = to_prenex(model);
  const ParExpr& outer = flat.objective.expr;
  REQUIRE(outer.kind == ParExpr::Kind::SumSet);
  const ParExpr& inner = outer.kids[0];
  REQUIRE(inner.kind == ParExpr::Kind::SumSet);
  CHECK(inner.query[0].atom.args[0].name == "X");
  REQUIRE(inner.kids[0].kind == ParExpr::Kind::Mul);
  CHECK(inner.kids[0].kids[0].atom.args[0].name == "X");  // cost(X) kept

  // grounding the original and the prenex form agrees
  auto prog = logkb::parse_logkb(
      "outer(a). outer(b). q(a).\n"
      "cost(a) = 3. cost(b) = 5.\n");
  auto kb = logkb::evaluate(prog);
  auto g1 = rlp::grounder::ground(expand_definitions(model), kb);
  auto g2 = rlp::grounder::ground(flat, kb);
  REQUIRE(g1.c.size() == g2.c.size());
  for (std::size_t i = 0; i < g1.c.size(); ++i) CHECK(g1.c[i] == g2.c[i]);
  // only q(a) holds: objective is 3 * p(a)
  REQUIRE(g2.var_names.size() >= 1);
  CHECK(to_string(g2.var_names[0]) == "p(a)");
  CHECK(g2.c[0] == 3);
}

TEST_CASE("division by declared variables is rejected") {
  auto model = parse_rlp(
      "var x/1;\n"
      "minimize: sum {q(X)} (1 / x(X));\n");
  auto prog = logkb::parse_logkb("q(a).");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("division") != std::string::npos);
}

TEST_CASE("declared variables may not exist in the knowledge base") {
  auto model = parse_rlp(
      "var p/1;\n"
      "minimize: sum {q(X)} p(X);\n");
  auto prog = logkb::parse_logkb("q(a). p(a) = 1.");
  auto report = validate(model, prog);
  CHECK_FALSE(report.ok());
  CHECK(report.str().find("declared variable") != std::string::npos);
}

TEST_CASE("mutated model sources never crash the parser") {
  std::mt19937 rng(4321);
  std::string base = read_model("tclpsvm.rlp");
  std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
  std::uniform_int_distribution<int> ch(32, 126);
  long outcomes = 0;
  for (int t = 0; t < 300; ++t) {
    std::string s = base;
    for (int edits = 0; edits <= t % 4; ++edits)
      s[pos(rng)] = static_cast<char>(ch(rng));
    try {
      auto m = parse_rlp(s);
      auto again = parse_rlp(print_rlp(m));
      (void)again;
    } catch (const RlpError&) {
    } catch (const logkb::KbError&) {
    }
    ++outcomes;
  }
  CHECK(outcomes == 300);
}
