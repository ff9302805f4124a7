#include "chainsem/bundled.hpp"

#include <cstdio>
#include <stdexcept>

#include "chainsem/contracts.hpp"
#include "chainsem/expr.hpp"

namespace chainsem {

using nlohmann::json;

namespace {

const Ty kUnit = Ty::unit();
const Ty kAuctionParam = Ty::sum(Ty::unit(), Ty::unit());
const Ty kAuctionStorage = Ty::pair(Ty::boolean(), Ty::pair(Ty::addr(), Ty::addr()));
const Ty kAuction = Ty::contract(kAuctionParam, kAuctionStorage);

ExprPtr me(const std::string& name) { return ex::puk("@" + name); }

ExprPtr ignore_errors(ExprPtr body) {
  return ex::try_(std::move(body), ex::lam("e", Ty::exception(), ex::unit()));
}

/// Polls the status of `op` until it is no longer pending.
ExprPtr wait_for(ExprPtr op) {
  auto body = ex::match(ex::query(QueryKind::GetStatus, std::move(op)),
                        {{Pattern::constant(ex::pending()), ex::app(ex::var("wait"), ex::unit())},
                         {Pattern::wildcard(), ex::unit()}});
  return ex::app(ex::rec("wait", "u", kUnit, kUnit, body), ex::unit());
}

/// `let op = <transfer> in wait op`
ExprPtr send_and_wait(ExprPtr transfer) {
  return ex::let("op", Ty::oph_transfer(), std::move(transfer), wait_for(ex::var("op")));
}

ExprPtr auction_handle() { return ex::cast(ex::puh("@auction"), Ty::puh(), kAuction); }

ExprPtr owner_program(long long countdown, long long fee) {
  auto count = ex::rec("count", "n", Ty::integer(), kUnit,
                       ex::if_(ex::lt(ex::var("n"), ex::integer(1)), ex::unit(),
                               ex::app(ex::var("count"), ex::add(ex::var("n"), ex::integer(-1)))));
  // Close, and try again if the close timed out.
  auto attempt = ex::let(
      "op", Ty::oph_transfer(),
      ex::transfer(ex::tz(0), me("owner"), ex::var("c"), ex::left(ex::unit()), ex::tz(fee)),
      ex::seq(kUnit, wait_for(ex::var("op")),
              ex::match(ex::query(QueryKind::GetStatus, ex::var("op")),
                        {{Pattern::constant(ex::timeout()), ex::app(ex::var("close"), ex::unit())},
                         {Pattern::wildcard(), ex::unit()}})));
  auto close = ex::rec("close", "u", kUnit, kUnit, ignore_errors(attempt));
  return ex::let("c", kAuction, auction_handle(),
                 ex::seq(kUnit, ex::app(count, ex::integer(countdown)),
                         ex::app(close, ex::unit())));
}

/// The polling bidder: while bidding is open and the high bid is below the
/// limit, outbid unless already the highest bidder, then poll again.
ExprPtr bidder_program(const BidderSpec& b, long long fee) {
  auto high = ex::var("high");
  auto raised = ex::add(high, ex::tz(b.step));
  auto amount = ex::if_(ex::lt(ex::tz(b.limit), raised), ex::tz(b.limit), raised);
  auto bid = ignore_errors(send_and_wait(
      ex::transfer(amount, me(b.name), ex::var("c"), ex::right(ex::unit()), ex::tz(fee))));
  auto round = ex::seq(kUnit, ex::if_(ex::eq(ex::var("highest"), ex::var("me")), ex::unit(), bid),
                       ex::seq(kUnit, ex::app(ex::sleep(), ex::unit()),
                               ex::app(ex::var("poll"), ex::unit())));
  auto balance = ex::query(QueryKind::GetBalance,
                           ex::cast(ex::cast(ex::var("c"), kAuction, Ty::puh()), Ty::puh(), Ty::addr()));
  auto body = ex::match(
      ex::query(QueryKind::GetStorage, ex::var("c")),
      {{Pattern::pair(Pattern::var("bidding"), Pattern::pair(Pattern::wildcard(), Pattern::var("highest"))),
        ex::let("high", Ty::tz(), balance,
                ex::if_(ex::and_(ex::var("bidding"), ex::lt(high, ex::tz(b.limit))), round,
                        ex::unit()))}});
  auto poll = ex::rec("poll", "u", kUnit, kUnit, body);
  return ex::let("c", kAuction, auction_handle(),
                 ex::let("me", Ty::addr(), ex::cast(me(b.name), Ty::puk(), Ty::addr()),
                         ex::app(poll, ex::unit())));
}

json node(std::vector<std::string> accounts, std::vector<ExprPtr> programs) {
  json p = json::array();
  for (const auto& e : programs) p.push_back(expr_to_json(e));
  return json{{"accounts", accounts}, {"programs", p}};
}

json auction(const std::string& name, long long countdown) {
  json managers = {{"owner", 100}};
  json nodes = json::array({node({"owner"}, {owner_program(countdown, 1)})});
  for (const auto& b : auction_bidders(name)) {
    managers[b.name] = b.balance;
    nodes.push_back(node({b.name}, {bidder_program(b, 1)}));
  }
  return json{{"name", name},
              {"time", 1},
              {"managers", managers},
              {"contracts", json::array({{{"name", "auction"},
                                          {"stub", "auction"},
                                          {"init", "(true,(@owner,@owner))"},
                                          {"balance", 0},
                                          {"time", 0}}})},
              {"nodes", nodes},
              {"seed", 7},
              {"policy", "uniform"},
              {"max_steps", 2000},
              {"asserts", "all"}};
}

ExprPtr pay(const std::string& from, const std::string& to, long long amount, long long fee) {
  return send_and_wait(ex::transfer(ex::tz(amount), me(from), me(to), ex::unit(), ex::tz(fee)));
}

json transfer_scenario() {
  return json{{"name", "transfer"},
              {"managers", {{"alice", 100}, {"bob", 100}}},
              {"nodes", json::array({node({"alice"}, {pay("alice", "bob", 10, 1)}), node({"bob"}, {})})},
              {"max_steps", 200}};
}

/// Two opposite payments, neither sender waiting for inclusion.
json two_transfers_scenario() {
  auto fire = [](const std::string& from, const std::string& to, long long amount, long long fee) {
    return ex::seq(Ty::oph_transfer(),
                   ex::transfer(ex::tz(amount), me(from), me(to), ex::unit(), ex::tz(fee)), ex::unit());
  };
  return json{{"name", "two_transfers"},
              {"managers", {{"alice", 100}, {"bob", 100}}},
              {"nodes", json::array({node({"alice"}, {fire("alice", "bob", 10, 1)}),
                                     node({"bob"}, {fire("bob", "alice", 5, 2)})})},
              {"max_steps", 200}};
}

json originate_scenario() {
  const Ty counter = Ty::contract(Ty::integer(), Ty::integer());
  const std::string script = make_script(Ty::integer(), Ty::integer(), "counter");
  auto call = send_and_wait(ex::transfer(ex::tz(0), me("alice"), ex::var("c"), ex::integer(5), ex::tz(1)));
  auto program = ignore_errors(ex::let(
      "o", Ty::oph(Ty::integer(), Ty::integer()),
      ex::originate(ex::tz(0), me("alice"), ex::code(script), ex::integer(0), ex::tz(1)),
      ex::let("c", counter, ex::query(QueryKind::GetContract, ex::var("o")), call)));
  return json{{"name", "originate"},
              {"managers", {{"alice", 100}}},
              {"nodes", json::array({node({"alice"}, {program})})},
              {"max_steps", 200}};
}

/// A victim operation sits in the pool with sixty-two younger transfers from
/// accounts no node controls. Accepting the younger ones advances time past
/// the victim's window; the victim then resends after a timeout.
json timeout_scenario() {
  json managers = {{"victim", 50}, {"sink", 0}};
  json pending = json::array(
      {{{"name", "v"}, {"sender", "victim"}, {"target", "sink"}, {"amount", 1}, {"fee", 1}, {"time", 0}}});
  for (int i = 0; i < 62; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "s%02d", i);
    managers[buf] = 10;
    pending.push_back(
        {{"name", std::string("op_") + buf}, {"sender", buf}, {"target", "sink"}, {"amount", 1}, {"fee", 1}, {"time", 1}});
  }
  auto resend = ignore_errors(pay("victim", "sink", 1, 2));
  auto program = ex::seq(kUnit, wait_for(ex::oph("@v")),
                         ex::match(ex::query(QueryKind::GetStatus, ex::oph("@v")),
                                   {{Pattern::constant(ex::timeout()), resend},
                                    {Pattern::wildcard(), ex::unit()}}));
  return json{{"name", "timeout"},
              {"time", 1},
              {"managers", managers},
              {"pending", pending},
              {"nodes", json::array({node({"victim"}, {program})})},
              {"policy", "timeout-forcing"},
              {"max_steps", 400}};
}

/// Every rejection path a typed program can reach, each caught.
json failures_scenario() {
  const Ty counter = Ty::contract(Ty::integer(), Ty::integer());
  auto step = [](ExprPtr e, const Ty& t) { return ignore_errors(ex::seq(t, std::move(e), ex::unit())); };
  auto on_failwith = ex::lam(
      "e", Ty::exception(),
      ex::match(ex::var("e"), {{Pattern::failwith(Pattern::var("m")), ex::unit()},
                               {Pattern::wildcard(), ex::unit()}}));
  const Ty unit_contract = Ty::contract(Ty::unit(), Ty::unit());
  std::vector<ExprPtr> steps = {
      // errB: more than the balance.
      step(ex::transfer(ex::tz(5000), me("alice"), me("bob"), ex::unit(), ex::tz(1)), Ty::oph_transfer()),
      // FAILWITH from the dry run.
      ex::try_(send_and_wait(ex::transfer(ex::tz(1), me("alice"),
                                          ex::cast(ex::puh("@rejector"), Ty::puh(), unit_contract),
                                          ex::unit(), ex::tz(1))),
               on_failwith),
      // errC: a second operation while the first is in flight.
      ignore_errors(ex::let("op", Ty::oph_transfer(),
                            ex::transfer(ex::tz(1), me("alice"), me("bob"), ex::unit(), ex::tz(1)),
                            ex::seq(kUnit,
                                    step(ex::transfer(ex::tz(1), me("alice"), me("bob"), ex::unit(), ex::tz(1)),
                                         Ty::oph_transfer()),
                                    wait_for(ex::var("op"))))),
      // errP: the header parses, but no stub takes (int, string).
      step(ex::originate(ex::tz(0), me("alice"), ex::code(make_script(Ty::integer(), Ty::string(), "counter")),
                         ex::str("x"), ex::tz(1)),
           Ty::oph(Ty::integer(), Ty::string())),
      // Downcast to the wrong contract type.
      step(ex::cast(ex::puh("@rejector"), Ty::puh(), counter), counter),
      // Downcast of a contract address to an implicit account.
      step(ex::cast(ex::cast(ex::puh("@counter"), Ty::puh(), Ty::addr()), Ty::addr(), Ty::puk()), Ty::puk()),
      // Downcast of an implicit account to a contract hash.
      step(ex::cast(ex::cast(me("bob"), Ty::puk(), Ty::addr()), Ty::addr(), Ty::puh()), Ty::puh()),
      // A call that goes through.
      ignore_errors(send_and_wait(ex::transfer(ex::tz(0), me("alice"),
                                               ex::cast(ex::puh("@counter"), Ty::puh(), counter),
                                               ex::integer(5), ex::tz(1)))),
  };
  ExprPtr alice = ex::unit();
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) alice = ex::seq(kUnit, *it, alice);
  // errF: below the minimum fee.
  auto poor = step(ex::transfer(ex::tz(1), me("poor"), me("bob"), ex::unit(), ex::tz(0)), Ty::oph_transfer());
  return json{
      {"name", "failures"},
      {"managers", {{"alice", 1000}, {"bob", 100}, {"poor", 1}}},
      {"contracts",
       json::array({{{"name", "rejector"}, {"stub", "reject"}, {"param", "Unit"}, {"storage", "Unit"}, {"init", "()"}},
                    {{"name", "counter"}, {"stub", "counter"}, {"param", "Int"}, {"storage", "Int"}, {"init", "0"}}})},
      {"nodes", json::array({node({"alice", "poor"}, {alice, poor}), node({"bob"}, {})})},
      {"max_steps", 400}};
}

}  // namespace

std::vector<std::string> bundled_names() {
  return {"auction", "auction1", "transfer", "two_transfers", "originate", "timeout", "failures"};
}

std::vector<BidderSpec> auction_bidders(const std::string& scenario) {
  if (scenario == "auction1") return {{"alice", 50, 50, 100}};
  return {{"alice", 300, 40, 1000}, {"bob", 500, 70, 1000}};
}

json bundled_scenario(const std::string& name) {
  if (name == "auction") return auction("auction", 20);
  if (name == "auction1") {
    json j = auction("auction1", 0);
    j["max_steps"] = 400;
    return j;
  }
  if (name == "transfer") return transfer_scenario();
  if (name == "two_transfers") return two_transfers_scenario();
  if (name == "originate") return originate_scenario();
  if (name == "timeout") return timeout_scenario();
  if (name == "failures") return failures_scenario();
  throw std::out_of_range("no bundled scenario named '" + name + "'");
}

}  // namespace chainsem
