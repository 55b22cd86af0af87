#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vfm/fol/enumeration.hpp"
#include "vfm/fol/parser.hpp"
#include "vfm/market/market.hpp"

using namespace vfm;
using namespace vfm::fol;
using namespace vfm::market;

namespace {

Sentence S(const std::string& text) { return parse_sentence(text); }

Rat Q(const std::string& text) { return *rat_from_string(text); }

DemandSchedule random_schedule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(0, 3);
  int n = nd(rng);
  std::vector<SchedulePiece> pieces;
  // descending quantities over ascending random uppers
  std::vector<Rat> ups;
  for (int i = 0; i < n; ++i) ups.push_back(Rat(1 + rng() % 19, 20));
  std::sort(ups.begin(), ups.end());
  ups.erase(std::unique(ups.begin(), ups.end()), ups.end());
  Rat q = Rat(rng() % 5) - Rat(rng() % 2);
  for (const Rat& u : ups) {
    pieces.push_back({u, q});
    q -= Rat(rng() % 3);
  }
  pieces.push_back({Rat(1), q});
  return DemandSchedule::from_pieces(pieces);
}

AgentSpec simple_buyer(const std::string& id, const Sentence& target, const Rat& limit,
                       const Rat& qty, const Rat& endow,
                       bool once = false) {
  AgentSpec a;
  a.id = id;
  a.endowment = endow;
  std::string k = sentence_key(target);
  a.trader = [k, limit, qty, once](std::uint64_t t, const Sentence& s, const Rat&,
                                   const Inventory&) {
    if (sentence_key(s) != k) return DemandSchedule();
    if (once && t > 0) return DemandSchedule();
    return DemandSchedule::buy_below(limit, qty);
  };
  return a;
}

}  // namespace

TEST_CASE("schedule: shape, value, summary statistics") {
  DemandSchedule z;
  CHECK(z.is_zero());
  CHECK(z.value(Q("1/3")) == 0);

  DemandSchedule b = DemandSchedule::buy_below(Q("3/5"), Rat(2));
  CHECK(b.value(Q("3/5")) == 2);
  CHECK(b.value(Q("3/5") + Q("1/100")) == 0);
  CHECK(b.max_sell() == 0);
  CHECK(b.worst_cost() == Q("6/5"));

  DemandSchedule s = DemandSchedule::sell_above(Q("1/2"), Rat(3));
  CHECK(s.value(Q("1/2")) == 0);
  CHECK(s.value(Q("2/3")) == -3);
  CHECK(s.max_sell() == 3);
  CHECK(s.worst_cost() == 0);

  DemandSchedule both = b + s;
  CHECK(both.value(Q("1/4")) == 2);
  CHECK(both.value(Q("11/20")) == -3 + 2);
  CHECK(both.value(Q("9/10")) == -3);

  CHECK_THROWS(DemandSchedule::from_pieces({{Q("1/2"), Rat(0)}, {Rat(1), Rat(1)}}));
  CHECK_THROWS(DemandSchedule::from_pieces({{Rat(1), Rat(1)}, {Q("1/2"), Rat(0)}}));
  CHECK_THROWS(DemandSchedule::from_pieces({{Q("1/2"), Rat(1)}}));
}

TEST_CASE("equilibrium_price: pinned cases") {
  DemandSchedule dP = DemandSchedule::buy_below(Q("3/5"), Rat(1));
  DemandSchedule dN = DemandSchedule::buy_below(Q("1/2"), Rat(1));
  CHECK(equilibrium_price(dP, dN, Q("1/2")) == Q("11/20"));

  CHECK(equilibrium_price(DemandSchedule(), DemandSchedule(), Q("1/2")) == Q("1/2"));
  CHECK(equilibrium_price(DemandSchedule(), DemandSchedule(), Q("7/9")) == Q("7/9"));

  DemandSchedule d2 = DemandSchedule::buy_below(Q("1/2"), Rat(2));
  DemandSchedule d1 = DemandSchedule::buy_below(Q("1/2"), Rat(1));
  CHECK(equilibrium_price(d2, d1, Q("1/2")) == Q("1/2"));

  // one-sided demand pushes the price to the boundary midpoint
  DemandSchedule onlyP = DemandSchedule::buy_below(Q("99/100"), Rat(1));
  CHECK(equilibrium_price(onlyP, DemandSchedule(), Q("1/2")) == Q("199/200"));
  CHECK(equilibrium_price(DemandSchedule(), onlyP, Q("1/2")) == Q("1/200"));

  // all-positive and all-negative clamp
  CHECK(equilibrium_price(DemandSchedule::buy_below(Rat(1), Rat(1)), DemandSchedule(),
                          Q("1/2")) == 1);
  CHECK(equilibrium_price(DemandSchedule(), DemandSchedule::buy_below(Rat(1), Rat(1)),
                          Q("1/2")) == 0);
}

TEST_CASE("equilibrium_price: random schedules satisfy the crossing condition") {
  std::mt19937_64 rng(8080);
  for (int i = 0; i < 500; ++i) {
    DemandSchedule dP = random_schedule(rng);
    DemandSchedule dN = random_schedule(rng);
    Rat p = equilibrium_price(dP, dN, Q("1/2"));
    REQUIRE(p >= 0);
    REQUIRE(p <= 1);
    auto f = [&](const Rat& x) -> Rat { return dP.value(x) - dN.value(1 - x); };
    bool ok = f(p) == 0;
    if (!ok && p > 0 && p < 1) {
      // sign change across p
      Rat eps(1, 1000000000);
      ok = f(p - eps) > 0 && f(p + eps) < 0;
      ok = ok || (f(p) > 0 && f(p + eps) < 0) || (f(p - eps) > 0 && f(p) < 0);
    }
    if (!ok && p == 0) ok = f(Rat(0)) <= 0;
    if (!ok && p == 1) ok = f(Rat(1)) >= 0;
    CHECK(ok);
  }
}

TEST_CASE("budget_check") {
  Inventory inv;
  inv.entries[kCash] = Rat(5);
  inv.entries["X"] = Rat(1);

  std::map<std::string, DemandSchedule> sell2{
      {"X", DemandSchedule::sell_above(Q("1/2"), Rat(2))}};
  CHECK_FALSE(budget_check(sell2, inv));

  std::map<std::string, DemandSchedule> sell1{
      {"X", DemandSchedule::sell_above(Q("1/2"), Rat(1))}};
  CHECK(budget_check(sell1, inv));

  std::map<std::string, DemandSchedule> buy5{
      {"Y", DemandSchedule::buy_below(Rat(1), Rat(5))}};
  CHECK(budget_check(buy5, inv));  // worth exactly 5, cash 5

  Inventory poorer = inv;
  poorer.entries[kCash] = Q("499/100");
  CHECK_FALSE(budget_check(buy5, poorer));
}

TEST_CASE("aggregate_demand gates failing agents") {
  Inventory rich;
  rich.entries[kCash] = Rat(10);
  Inventory broke;
  broke.entries[kCash] = Rat(0);
  std::map<std::string, DemandSchedule> orders{
      {"X", DemandSchedule::buy_below(Q("3/5"), Rat(1))}};
  std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>> props = {
      {orders, rich}, {orders, rich}, {orders, broke}};
  DemandSchedule agg = aggregate_demand(props, "X");
  CHECK(agg.value(Q("3/5")) == 2);
  CHECK(agg.value(Q("7/10")) == 0);
  CHECK(aggregate_demand({}, "X").is_zero());
}

TEST_CASE("labeled partitions") {
  CHECK(whole_holding(Rat(3), "*").valid_for(Rat(3)));
  CHECK(whole_holding(Rat(0), "*").valid_for(Rat(0)));
  LabeledPartition two{{{Rat(0), Q("1/2"), "a"}, {Q("1/2"), Rat(1), "b"}}};
  CHECK(two.valid_for(Rat(1)));
  CHECK_FALSE(two.valid_for(Rat(2)));
  LabeledPartition overlap{{{Rat(0), Rat(1), "a"}, {Q("1/2"), Rat(2), "b"}}};
  CHECK_FALSE(overlap.valid_for(Q("5/2")));
}

TEST_CASE("empirical reality: arithmetic schedule") {
  EmpiricalReality r = EmpiricalReality::arithmetic();
  Sentence t = S("1=1");
  Nat code = canonical_code(t);
  Nat ncode = canonical_code(negate(t));
  std::uint64_t reveal = (code < ncode ? code : ncode).get_ui();
  if (reveal > 0) CHECK_FALSE(r.truth_at(reveal - 1, t).has_value());
  REQUIRE(r.truth_at(reveal, t).has_value());
  CHECK(*r.truth_at(reveal, t));
  CHECK_FALSE(*r.truth_at(reveal + 5, negate(t)));  // negation-consistent
  CHECK_FALSE(r.truth_at(1000, S("E x. x=0")).has_value());
}

TEST_CASE("empirical reality: scripted") {
  Sentence d = S("2*2=4");
  EmpiricalReality r = EmpiricalReality::scripted({{3, d, true}});
  CHECK_FALSE(r.truth_at(2, d).has_value());
  CHECK(*r.truth_at(3, d));
  CHECK_FALSE(*r.truth_at(3, negate(d)));
  CHECK_THROWS_AS(EmpiricalReality::scripted({{3, d, true}, {3, d, false}}), MarketError);
  CHECK_THROWS_AS(EmpiricalReality::scripted({{1, d, true}, {1, negate(d), true}}),
                  MarketError);
  CHECK_THROWS_AS(EmpiricalReality::scripted({{1, S("E x. x=0"), true}}), MarketError);
}

TEST_CASE("market: minting a matched pair") {
  Sentence P = S("E x. x*x=4");
  std::vector<AgentSpec> roster = {
      simple_buyer("a", P, Q("11/20"), Rat(1), Rat(10)),
      simple_buyer("b", negate(P), Q("9/20"), Rat(1), Rat(10))};
  MarketState m(roster, {P}, EmpiricalReality::scripted({}));
  m.step();
  CHECK(m.price(P) == Q("11/20"));
  REQUIRE(m.ledger().size() == 1);
  CHECK(m.ledger()[0].quantity == 1);
  CHECK(m.cash("a") == Rat(10) - Q("11/20"));
  CHECK(m.cash("b") == Rat(10) - Q("9/20"));
  CHECK(m.inventory("a").get(sentence_key(P)) == 1);
  CHECK(m.inventory("b").get(sentence_key(negate(P))) == 1);
}

TEST_CASE("market: cross trade transfers a ledger side without minting") {
  Sentence P = S("E x. x*x=4");
  std::string kP = sentence_key(P);
  AgentSpec a = simple_buyer("a", P, Q("11/20"), Rat(1), Rat(10), true);
  AgentSpec b = simple_buyer("b", negate(P), Q("9/20"), Rat(1), Rat(10), true);
  // c buys P from a at t=1; a sells its holding above 1/4.
  AgentSpec c;
  c.id = "c";
  c.endowment = Rat(10);
  c.trader = [kP](std::uint64_t t, const Sentence& s, const Rat&, const Inventory&) {
    if (t == 1 && sentence_key(s) == kP)
      return DemandSchedule::buy_below(Q("1/2"), Rat(1));
    return DemandSchedule();
  };
  AgentSpec seller = a;
  seller.trader = [kP, inner = a.trader](std::uint64_t t, const Sentence& s, const Rat& p,
                                         const Inventory& inv) {
    if (t >= 1 && sentence_key(s) == kP && inv.get(kP) > 0)
      return DemandSchedule::sell_above(Q("1/4"), inv.get(kP));
    return inner(t, s, p, inv);
  };
  MarketState m({seller, b, c}, {P}, EmpiricalReality::scripted({}));
  m.step();  // mint 1 pair between a and b at 11/20
  REQUIRE(m.ledger().size() == 1);
  m.step();  // c buys a's side
  REQUIRE(m.ledger().size() == 1);
  CHECK(m.ledger()[0].verifier.agent == "c");
  CHECK(m.inventory("c").get(kP) == 1);
  CHECK(m.inventory("a").get(kP) == 0);
  // a: paid 11/20 at t0, received price at t1
  Rat p1 = m.price(P);
  CHECK(m.cash("a") == Rat(10) - Q("11/20") + p1);
  CHECK(m.cash("c") == Rat(10) - p1);
}

TEST_CASE("market: pro-rata rationing on the long side") {
  Sentence P = S("E x. x*x=4");
  std::vector<AgentSpec> roster = {
      simple_buyer("a1", P, Q("1/2"), Rat(2), Rat(10)),
      simple_buyer("a2", P, Q("1/2"), Rat(2), Rat(10)),
      simple_buyer("b", negate(P), Q("1/2"), Rat(1), Rat(10))};
  MarketState m(roster, {P}, EmpiricalReality::scripted({}));
  m.step();
  // dP = 4 for p <= 1/2, dN = 1 for q <= 1/2: jump at 1/2, mint min(4,1) = 1
  CHECK(m.price(P) == Q("1/2"));
  Rat qa1 = m.inventory("a1").get(sentence_key(P));
  Rat qa2 = m.inventory("a2").get(sentence_key(P));
  CHECK(qa1 == Q("1/2"));
  CHECK(qa2 == Q("1/2"));
  CHECK(m.inventory("b").get(sentence_key(negate(P))) == 1);
}

TEST_CASE("market: sigma move, counterpart sync, settlement") {
  Sentence P = S("E x. x*x=4");
  Sentence played = play_set(P, Move::witnesses({2}));  // ((2*2)=4)
  AgentSpec a = simple_buyer("a", P, Q("11/20"), Rat(1), Rat(10), true);
  a.player = [](std::uint64_t, const Sentence& s, const std::string&) {
    return classify(s).kind == ClassKind::Sigma ? Move::witnesses({2}) : Move::pass();
  };
  AgentSpec b = simple_buyer("b", negate(P), Q("9/20"), Rat(1), Rat(10), true);
  MarketState m({a, b}, {P}, EmpiricalReality::scripted({{0, played, true}}));
  m.step();
  REQUIRE(m.ledger().size() == 1);
  CHECK(alpha_equal(m.ledger()[0].verifier.sentence, played));
  CHECK(alpha_equal(m.ledger()[0].falsifier.sentence, negate(played)));
  m.step();  // settle: a wins escrow, b's side voided
  CHECK(m.ledger().empty());
  CHECK(m.cash("a") == Rat(10) - Q("11/20") + 1);
  CHECK(m.cash("b") == Rat(10) - Q("9/20"));
  CHECK(m.inventory("b").get(kVoid) == 1);
}

TEST_CASE("market: split labels play different moves") {
  Sentence P = S("E x. x*x=4");
  std::string kP = sentence_key(P);
  AgentSpec a = simple_buyer("a", P, Q("11/20"), Rat(1), Rat(10), true);
  a.labeler = [](std::uint64_t, const Sentence&, const Rat& h) {
    LabeledPartition part;
    if (h > 0) {
      part.pieces.push_back({Rat(0), h / 2, "go"});
      part.pieces.push_back({h / 2, h, "hold"});
    }
    return part;
  };
  a.player = [](std::uint64_t, const Sentence& s, const std::string& label) {
    if (label == "go" && classify(s).kind == ClassKind::Sigma)
      return Move::witnesses({2});
    return Move::pass();
  };
  AgentSpec b = simple_buyer("b", negate(P), Q("9/20"), Rat(1), Rat(10), true);
  MarketState m({a, b}, {P}, EmpiricalReality::scripted({}));
  m.step();
  REQUIRE(m.ledger().size() == 2);
  Rat moved = 0, kept = 0;
  for (const auto& pr : m.ledger()) {
    if (alpha_equal(pr.verifier.sentence, P)) kept += pr.quantity;
    else moved += pr.quantity;
  }
  CHECK(kept == Q("1/2"));
  CHECK(moved == Q("1/2"));
}

TEST_CASE("market: conservation and non-negativity over a long mixed run") {
  Sentence P = S("E x. A y. x>=y");
  AgentSpec a = simple_buyer("a", P, Q("99/100"), Rat(1), Rat(20));
  a.player = [](std::uint64_t t, const Sentence& s, const std::string&) {
    return t == 7 && classify(s).kind == ClassKind::Sigma ? Move::witnesses({3})
                                                          : Move::pass();
  };
  AgentSpec b = simple_buyer("b", negate(P), Q("99/100"), Rat(1), Rat(100));
  b.player = [](std::uint64_t, const Sentence& s, const std::string&) {
    return classify(s).kind == ClassKind::Sigma
               ? Move::witnesses({max_constant(s) + 1})
               : Move::pass();
  };
  AgentSpec late = simple_buyer("late", P, Q("3/4"), Rat(2), Rat(15));
  late.birthday = 25;
  MarketState m({a, b, late}, {P}, EmpiricalReality::arithmetic());
  for (int t = 0; t < 120; ++t) {
    m.step();  // step() itself asserts conservation and non-negativity
    Rat total = m.cash("a") + m.cash("b") + m.cash("late");
    for (const auto& pr : m.ledger()) total += pr.quantity;
    CHECK(total == m.injected());
  }
  // the audit log replays to the final cash positions
  std::map<std::string, Rat> replay;
  for (const auto& e : m.audit()) replay[e.agent] += e.dcash;
  for (const std::string id : {"a", "b", "late"}) CHECK(replay[id] == m.cash(id));
}

TEST_CASE("market: deterministic reruns") {
  auto build = [] {
    Sentence P = S("E x. A y. x>=y");
    AgentSpec a = simple_buyer("a", P, Q("9/10"), Rat(1), Rat(12));
    AgentSpec b = simple_buyer("b", negate(P), Q("9/10"), Rat(1), Rat(12));
    return MarketState({a, b}, {P}, EmpiricalReality::arithmetic());
  };
  MarketState m1 = build(), m2 = build();
  for (int t = 0; t < 40; ++t) {
    m1.step();
    m2.step();
  }
  CHECK(m1.price_csv() == m2.price_csv());
  CHECK(m1.audit_log() == m2.audit_log());
  CHECK(m1.ledger_dump() == m2.ledger_dump());
}

TEST_CASE("detect_exploitation") {
  std::vector<Rat> flat(10, Rat(5));
  CHECK_FALSE(detect_exploitation(flat, Rat(0), Rat(100)).flagged);

  std::vector<Rat> rising;
  for (int i = 0; i < 20; ++i) rising.push_back(Rat(i * i));
  ExploitReport r = detect_exploitation(rising, Rat(0), Rat(100));
  CHECK(r.flagged);
  CHECK(r.min == 0);
  CHECK(r.max == 361);

  std::vector<Rat> dipping = rising;
  dipping.push_back(Rat(-1));
  CHECK_FALSE(detect_exploitation(dipping, Rat(0), Rat(100)).flagged);
}
