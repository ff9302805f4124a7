#include <random>

#include "chainsem/expr.hpp"
#include "doctest.h"

using namespace chainsem;

namespace {

/// Runs pure steps until a value, an uncaught raise, or no pure step.
PureStep normalize(ExprPtr e, int* steps = nullptr, int limit = 10000) {
  int n = 0;
  for (;;) {
    PureStep s = step_pure(e);
    if (s.outcome != PureOutcome::Stepped) {
      if (steps) *steps = n;
      if (s.outcome == PureOutcome::NoPureStep) s.next = e;
      return s;
    }
    e = s.next;
    if (++n > limit) FAIL("no normal form");
  }
}

ExprPtr value_of(ExprPtr e) {
  PureStep s = normalize(std::move(e));
  REQUIRE(s.outcome == PureOutcome::NoPureStep);
  return s.next;
}

/// Random closed pure term over integers, booleans, pairs and sums.
ExprPtr random_int_term(std::mt19937_64& rng, int depth) {
  if (depth == 0) return ex::integer(static_cast<std::int64_t>(rng() % 20) - 10);
  switch (rng() % 6) {
    case 0: return ex::add(random_int_term(rng, depth - 1), random_int_term(rng, depth - 1));
    case 1:
      return ex::if_(ex::lt(random_int_term(rng, depth - 1), random_int_term(rng, depth - 1)),
                     random_int_term(rng, depth - 1), random_int_term(rng, depth - 1));
    case 2:
      return ex::app(ex::lam("x", Ty::integer(), ex::add(ex::var("x"), ex::var("x"))),
                     random_int_term(rng, depth - 1));
    case 3:
      return ex::match(ex::left(random_int_term(rng, depth - 1)),
                       {{Pattern::left(Pattern::var("y")), ex::add(ex::var("y"), ex::integer(1))},
                        {Pattern::right(Pattern::wildcard()), ex::integer(0)}});
    case 4:
      return ex::try_(ex::add(random_int_term(rng, depth - 1), ex::raise(ex::error(ErrorKind::Bal))),
                      ex::lam("e", Ty::exception(), random_int_term(rng, depth - 1)));
    default: return ex::integer(static_cast<std::int64_t>(rng() % 5));
  }
}

/// Direct big-step reference evaluator for random_int_term.
std::int64_t reference_eval(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Int: return e->number;
    case ExprKind::Add: return reference_eval(e->kids[0]) + reference_eval(e->kids[1]);
    default: break;
  }
  return value_of(e)->number;
}

}  // namespace

TEST_CASE("decompose examples") {
  auto id = ex::lam("x", Ty::integer(), ex::var("x"));
  auto beta = ex::app(id, ex::integer(1));
  auto d = decompose(beta);
  CHECK(d.kind == RedexKind::Pure);
  CHECK(d.path.empty());

  auto op = ex::transfer(ex::tz(1), ex::puk("puk_a"), ex::puk("puk_b"), ex::unit(), ex::tz(1));
  auto sum = ex::add(ex::integer(1), op);
  d = decompose(sum);
  CHECK(d.kind == RedexKind::BlockchainOp);
  CHECK(d.path == Path{1});
  CHECK(expr_equal(d.redex, op));

  CHECK(decompose(ex::integer(5)).kind == RedexKind::AlreadyValue);
}

TEST_CASE("decompose waits for arguments left to right") {
  auto pending_amount = ex::add(ex::tz(1), ex::tz(2));
  auto op = ex::transfer(pending_amount, ex::puk("puk_a"), ex::puk("puk_b"), ex::unit(), ex::tz(1));
  auto d = decompose(op);
  CHECK(d.kind == RedexKind::Pure);
  CHECK(d.path == Path{0});

  auto q = ex::query(QueryKind::GetStatus, ex::oph("oph_x"));
  CHECK(decompose(q).kind == RedexKind::Query);
  auto down = ex::cast(ex::puh("puh_x"), Ty::puh(), Ty::contract(Ty::unit(), Ty::unit()));
  CHECK(decompose(down).kind == RedexKind::DowncastProbe);
  auto up = ex::cast(ex::puk("puk_a"), Ty::puk(), Ty::addr());
  CHECK(decompose(up).kind == RedexKind::Pure);
}

TEST_CASE("plugging the redex back gives the term") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    auto e = random_int_term(rng, 4);
    auto d = decompose(e);
    if (d.kind == RedexKind::AlreadyValue) continue;
    CHECK(expr_equal(subterm_at(e, d.path), d.redex));
    CHECK(expr_equal(plug(e, d.path, d.redex), e));
  }
}

TEST_CASE("try catches a raise in two steps") {
  auto e = ex::try_(ex::add(ex::integer(1), ex::raise(ex::error(ErrorKind::Bal))),
                    ex::lam("x", Ty::exception(), ex::integer(0)));
  int steps = 0;
  auto s = normalize(e, &steps);
  CHECK(s.outcome == PureOutcome::NoPureStep);
  CHECK(s.next->kind == ExprKind::Int);
  CHECK(s.next->number == 0);
  CHECK(steps == 2);
}

TEST_CASE("a raise crosses any number of frames in one step") {
  ExprPtr body = ex::raise(ex::error(ErrorKind::Count));
  for (int i = 0; i < 6; ++i) body = ex::add(ex::integer(i), body);
  auto e = ex::try_(body, ex::lam("x", Ty::exception(), ex::var("x")));
  auto s = step_pure(e);
  REQUIRE(s.outcome == PureOutcome::Stepped);
  // The handler is applied to errC: one beta step remains.
  auto t = step_pure(s.next);
  REQUIRE(t.outcome == PureOutcome::Stepped);
  CHECK(t.next->kind == ExprKind::Error);
  CHECK(t.next->error == ErrorKind::Count);
}

TEST_CASE("uncaught raise terminates the program") {
  auto e = ex::add(ex::integer(1), ex::raise(ex::error(ErrorKind::Fee)));
  auto s = step_pure(e);
  CHECK(s.outcome == PureOutcome::Uncaught);
  REQUIRE(s.exception);
  CHECK(s.exception->error == ErrorKind::Fee);
}

TEST_CASE("a raise inside a handler reaches the outer try") {
  auto inner = ex::try_(ex::raise(ex::error(ErrorKind::Bal)),
                        ex::lam("e", Ty::exception(), ex::raise(ex::error(ErrorKind::Arg))));
  auto outer = ex::try_(inner, ex::lam("e", Ty::exception(), ex::var("e")));
  auto v = value_of(outer);
  CHECK(v->kind == ExprKind::Error);
  CHECK(v->error == ErrorKind::Arg);
}

TEST_CASE("match on a sum") {
  auto e = ex::match(ex::left(ex::integer(3)),
                     {{Pattern::left(Pattern::var("x")), ex::add(ex::var("x"), ex::integer(1))},
                      {Pattern::right(Pattern::var("y")), ex::integer(0)}});
  auto s1 = step_pure(e);
  REQUIRE(s1.outcome == PureOutcome::Stepped);
  CHECK(expr_equal(s1.next, ex::add(ex::integer(3), ex::integer(1))));
  CHECK(value_of(e)->number == 4);
  auto r = ex::match(ex::right(ex::integer(3)),
                     {{Pattern::left(Pattern::var("x")), ex::add(ex::var("x"), ex::integer(1))},
                      {Pattern::right(Pattern::var("y")), ex::integer(0)}});
  CHECK(value_of(r)->number == 0);
}

TEST_CASE("first matching arm wins, and no arm raises the match fault") {
  auto e = ex::match(ex::integer(2), {{Pattern::var("a"), ex::integer(10)}, {Pattern::wildcard(), ex::integer(20)}});
  CHECK(value_of(e)->number == 10);
  auto none = ex::match(ex::integer(2), {{Pattern::constant(ex::integer(3)), ex::integer(1)}});
  auto s = normalize(none);
  CHECK(s.outcome == PureOutcome::Uncaught);
  CHECK(s.exception->error == ErrorKind::Match);
}

TEST_CASE("match_pattern examples") {
  auto b = match_pattern(Pattern::cons(Pattern::var("x"), Pattern::var("y")), ex::cons(ex::integer(1), ex::nil()));
  REQUIRE(b);
  REQUIRE(b->size() == 2);
  CHECK((*b)[0].first == "x");
  CHECK(expr_equal((*b)[0].second, ex::integer(1)));
  CHECK((*b)[1].first == "y");
  CHECK(expr_equal((*b)[1].second, ex::nil()));

  CHECK_FALSE(match_pattern(Pattern::constant(ex::pending()), ex::included(ex::integer(3))));

  auto storage = ex::pair(ex::boolean(true), ex::pair(ex::puk("puk_a"), ex::puk("puk_b")));
  auto p = Pattern::pair(Pattern::var("x"), Pattern::pair(Pattern::var("y"), Pattern::var("z")));
  auto m = match_pattern(p, storage);
  REQUIRE(m);
  CHECK(m->size() == 3);
  CHECK(expr_equal((*m)[1].second, ex::puk("puk_a")));
  CHECK(expr_equal((*m)[2].second, ex::puk("puk_b")));

  auto inc = match_pattern(Pattern::included(Pattern::var("t")), ex::included(ex::integer(7)));
  REQUIRE(inc);
  CHECK((*inc)[0].second->number == 7);
}

TEST_CASE("substitution examples") {
  auto a = substitute(ex::lam("y", Ty::integer(), ex::var("x")), "x", ex::integer(5));
  CHECK(expr_equal(a, ex::lam("y", Ty::integer(), ex::integer(5))));
  auto shadow = ex::lam("x", Ty::integer(), ex::var("x"));
  CHECK(expr_equal(substitute(shadow, "x", ex::integer(5)), shadow));
  auto twice = substitute(ex::add(ex::var("x"), ex::var("x")), "x", ex::integer(2));
  CHECK(expr_equal(twice, ex::add(ex::integer(2), ex::integer(2))));
  auto arm = ex::match(ex::var("x"), {{Pattern::var("x"), ex::var("x")}, {Pattern::wildcard(), ex::var("x")}});
  auto sub = substitute(arm, "x", ex::integer(1));
  CHECK(sub->kids[0]->number == 1);
  CHECK(sub->arms[0].body->kind == ExprKind::Var);
  CHECK(sub->arms[1].body->number == 1);
}

TEST_CASE("fix unrolls to a recursive function") {
  // sum n = if n < 1 then 0 else n + sum (n - 1)
  auto body = ex::if_(ex::lt(ex::var("n"), ex::integer(1)), ex::integer(0),
                      ex::add(ex::var("n"), ex::app(ex::var("sum"), ex::add(ex::var("n"), ex::integer(-1)))));
  auto sum = ex::rec("sum", "n", Ty::integer(), Ty::integer(), body);
  CHECK(value_of(ex::app(sum, ex::integer(10)))->number == 55);
}

TEST_CASE("overflow raises a catchable fault") {
  auto big = ex::add(ex::integer(INT64_MAX), ex::integer(1));
  auto s = normalize(big);
  CHECK(s.outcome == PureOutcome::Uncaught);
  CHECK(s.exception->error == ErrorKind::Overflow);
}

TEST_CASE("pure reduction is deterministic and agrees with a reference evaluator") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    auto e = random_int_term(rng, 4);
    auto a = step_pure(e);
    auto b = step_pure(e);
    CHECK(a.outcome == b.outcome);
    if (a.outcome == PureOutcome::Stepped) CHECK(expr_equal(a.next, b.next));
    CHECK(value_of(e)->number == reference_eval(e));
  }
}

TEST_CASE("upcast erases, downcast is left to the node") {
  auto up = ex::cast(ex::puk("puk_a"), Ty::puk(), Ty::addr());
  auto s = step_pure(up);
  REQUIRE(s.outcome == PureOutcome::Stepped);
  CHECK(expr_equal(s.next, ex::puk("puk_a")));
  auto down = ex::cast(ex::puk("puk_a"), Ty::addr(), Ty::puk());
  CHECK(step_pure(down).outcome == PureOutcome::NoPureStep);
}

TEST_CASE("sleep is the identity on unit") {
  CHECK(value_of(ex::app(ex::sleep(), ex::unit()))->kind == ExprKind::Unit);
}

TEST_CASE("JSON encoding round-trips and rejects unknown tags") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    auto e = random_int_term(rng, 4);
    CHECK(expr_equal(expr_from_json(expr_to_json(e)), e));
  }
  auto op = ex::originate(ex::tz(0), ex::puk("puk_a"), ex::code("parameter int; storage int; code counter;"),
                          ex::integer(0), ex::tz(1));
  auto q = ex::query(QueryKind::GetContract, op);
  CHECK(expr_equal(expr_from_json(expr_to_json(q)), q));
  auto cast = ex::cast(ex::puh("puh_x"), Ty::puh(), Ty::contract(Ty::integer(), Ty::integer()));
  CHECK(expr_equal(expr_from_json(expr_to_json(cast)), cast));
  CHECK_THROWS(expr_from_json(nlohmann::json{{"tag", "Spawn"}}));
  CHECK_THROWS(expr_from_json(nlohmann::json::array({"Frobnicate", 1})));
}

TEST_CASE("closedness") {
  CHECK(is_closed(ex::lam("x", Ty::integer(), ex::var("x"))));
  CHECK_FALSE(is_closed(ex::lam("x", Ty::integer(), ex::var("y"))));
  CHECK(free_vars(ex::add(ex::var("a"), ex::var("b"))).size() == 2);
}
