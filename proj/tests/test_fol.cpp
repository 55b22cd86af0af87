#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "vfm/fol/ast.hpp"
#include "vfm/fol/enumeration.hpp"
#include "vfm/fol/parser.hpp"

using namespace vfm;
using namespace vfm::fol;

namespace {

Sentence S(const std::string& text) { return parse_sentence(text); }

// Two-valued bounded-domain evaluation: every prefix variable ranges over
// 0..B. Used as the semantic oracle for play_set.
bool bounded_eval(const Sentence& s, std::uint64_t B) {
  if (s.prefix.empty()) return eval_delta0(s);
  bool exists = s.prefix.front().first == Quant::Exists;
  for (std::uint64_t n = 0; n <= B; ++n) {
    bool v = bounded_eval(substitute_leading(s, n), B);
    if (exists && v) return true;
    if (!exists && !v) return false;
  }
  return !exists;
}

// Random sentence generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::uint64_t pick(std::uint64_t n) { return rng() % n; }

  TermPtr term(int depth, const std::vector<std::string>& vars) {
    if (depth == 0 || pick(3) == 0) {
      if (!vars.empty() && pick(2) == 0) return mk_var(vars[pick(vars.size())]);
      return mk_const(pick(11));
    }
    TermKind k = static_cast<TermKind>(2 + pick(3));
    return mk_term(k, term(depth - 1, vars), term(depth - 1, vars));
  }

  MatrixPtr matrix(int depth, std::vector<std::string> vars) {
    std::uint64_t choice = depth == 0 ? 0 : pick(6);
    switch (choice) {
      default:
      case 0:
        return mk_atom(static_cast<CmpOp>(pick(6)), term(2, vars), term(2, vars));
      case 1: return mk_not(matrix(depth - 1, vars));
      case 2: return mk_and(matrix(depth - 1, vars), matrix(depth - 1, vars));
      case 3: return mk_or(matrix(depth - 1, vars), matrix(depth - 1, vars));
      case 4:
      case 5: {
        std::string v = "b" + std::to_string(vars.size());
        TermPtr bound = mk_const(pick(6));
        auto kind = choice == 4 ? MatrixKind::BoundedExists : MatrixKind::BoundedForall;
        vars.push_back(v);
        MatrixPtr body = matrix(depth - 1, vars);
        return mk_bounded(kind, v, bound, body);
      }
    }
  }

  Sentence sentence(std::size_t max_prefix, int depth) {
    Sentence s;
    std::vector<std::string> vars;
    std::size_t k = pick(max_prefix + 1);
    for (std::size_t i = 0; i < k; ++i) {
      std::string v = "q" + std::to_string(i);
      s.prefix.emplace_back(pick(2) ? Quant::Forall : Quant::Exists, v);
      vars.push_back(v);
    }
    s.matrix = matrix(depth, vars);
    return s;
  }
};

}  // namespace

TEST_CASE("parse: grammar instances") {
  Sentence s = S("E x. x+1=2");
  REQUIRE(s.prefix.size() == 1);
  CHECK(s.prefix[0].first == Quant::Exists);
  CHECK(s.prefix[0].second == "x");
  CHECK(print(s) == "E x. ((x+1)=2)");

  Sentence sig2 = S("E x. A y. x>=y");
  auto c = classify(sig2);
  CHECK(c.kind == ClassKind::Sigma);
  CHECK(c.level == 2);
}

TEST_CASE("parse: errors") {
  CHECK_THROWS_AS(S("E x"), ParseError);
  CHECK_THROWS_AS(S("E x. y=1"), ParseError);          // unbound variable
  CHECK_THROWS_AS(S("E x. E x. x=1"), ParseError);     // duplicate prefix var
  CHECK_THROWS_AS(S("x=1"), ParseError);               // unbound (no prefix)
  CHECK_THROWS_AS(S("E x. x="), ParseError);
  CHECK_THROWS_AS(S(""), ParseError);
  CHECK_THROWS_AS(S("1+1=2 ("), ParseError);
  // Unbounded quantifier inside the matrix is not prenex.
  CHECK_THROWS_AS(S("1=1 & E x. x=1"), ParseError);
}

TEST_CASE("parse: line/column reporting") {
  try {
    S("E x.\n  x @ 1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 5);
  }
}

TEST_CASE("parse . print = identity on ASTs") {
  Gen g(1234);
  for (int i = 0; i < 300; ++i) {
    Sentence s = g.sentence(3, 3);
    std::string p = print(s);
    Sentence back = parse_sentence(p);
    CHECK(print(back) == p);
    CHECK(matrix_equal(back.matrix, s.matrix));
  }
}

TEST_CASE("classify") {
  CHECK(classify(S("1+1=2")).kind == ClassKind::Delta0);
  CHECK(classify(S("1+1=2")).level == 0);
  auto pi2 = classify(S("A y1. A y2. E z. z=y1+y2"));
  CHECK(pi2.kind == ClassKind::Pi);
  CHECK(pi2.level == 2);
  auto sig1 = classify(S("E x. x=0"));
  CHECK(sig1.kind == ClassKind::Sigma);
  CHECK(sig1.level == 1);
}

TEST_CASE("eval_delta0") {
  CHECK(eval_delta0(S("1+1=2")));
  CHECK(eval_delta0(S("E x<=3. x*x=4")));
  CHECK(eval_delta0(S("E x<=8. A y<=8. x>=y")));
  CHECK_FALSE(eval_delta0(S("A x<=3. x<3")));
  CHECK(eval_delta0(S("2-5=0")));  // truncated difference clamps at 0
  CHECK_THROWS_AS(eval_delta0(S("E x. x=0")), FolError);
}

TEST_CASE("substitute_leading") {
  CHECK(print(substitute_leading(S("E x. x+1=2"), 1)) == "((1+1)=2)");
  CHECK(print(substitute_leading(S("E x. A y. x>=y"), 3)) == "A y. (3>=y)");
  CHECK(print(substitute_leading(S("A y. 3>=y"), 5)) == "(3>=5)");
  CHECK_THROWS_AS(substitute_leading(S("1=1"), 0), FolError);
  // Substitution also reaches bounds of bounded quantifiers.
  CHECK(print(substitute_leading(S("E x. A y<=x. y<=x"), 2)) == "(A y<=2. (y<=2))");
}

TEST_CASE("substitution respects shadowing") {
  Sentence s = S("E x. E x<=3. x=1");
  CHECK(print(substitute_leading(s, 9)) == "(E x<=3. (x=1))");
}

TEST_CASE("play_set: pass and basic instantiation") {
  Sentence s = S("E x. x+1=2");
  CHECK(alpha_equal(play_set(s, Move::pass()), s));
  Sentence played = play_set(s, Move::witnesses({0, 1}));
  CHECK(is_delta0(played));
  CHECK(eval_delta0(played));
  CHECK(print(played) == "(((0+1)=2) | ((1+1)=2))");
}

TEST_CASE("play_set: prefixes renamed apart and concatenated") {
  Sentence s = S("E x. A y. x+0>=y");
  Sentence played = play_set(s, Move::witnesses({1, 2}));
  CHECK(played.prefix.size() == 2);
  CHECK(played.prefix[0].first == Quant::Forall);
  CHECK(played.prefix[1].first == Quant::Forall);
  CHECK(print(played) == "A y1. A y2. (((1+0)>=y1) | ((2+0)>=y2))");
}

TEST_CASE("play_set: errors") {
  CHECK_THROWS_AS(Move::witnesses({}), FolError);
  CHECK_THROWS_AS(play_set(S("1=1"), Move::witnesses({1})), FolError);
}

TEST_CASE("play_set semantic soundness (bounded oracle, B=6)") {
  Gen g(77);
  int done = 0;
  while (done < 200) {
    Sentence s = g.sentence(3, 2);
    if (s.prefix.empty()) continue;
    ++done;
    std::vector<std::uint64_t> ns;
    std::size_t count = 1 + g.pick(3);
    for (std::size_t i = 0; i < count; ++i) ns.push_back(g.pick(7));
    Move m = Move::witnesses(ns);
    Sentence played = play_set(s, m);
    bool sigma = s.prefix.front().first == Quant::Exists;
    bool expected = !sigma;
    for (std::uint64_t n : m.values()) {
      bool inst = bounded_eval(substitute_leading(s, n), 6);
      expected = sigma ? (expected || inst) : (expected && inst);
    }
    CHECK(bounded_eval(played, 6) == expected);
  }
}

TEST_CASE("negate: examples and involution") {
  CHECK(print(negate(S("A x. x>=0"))) == "E x. (x<0)");
  CHECK(print(negate(S("E x. A y. x>=y"))) == "A x. E y. (x<y)");
  Sentence d = S("1+1=2");
  CHECK_FALSE(eval_delta0(negate(d)));

  Gen g(99);
  for (int i = 0; i < 200; ++i) {
    Sentence s = g.sentence(3, 3);
    CHECK(alpha_equal(negate(negate(s)), s));
    if (s.prefix.empty()) CHECK(eval_delta0(negate(s)) == !eval_delta0(s));
  }
}

TEST_CASE("classify after substitute_leading") {
  Gen g(4242);
  for (int i = 0; i < 200; ++i) {
    Sentence s = g.sentence(3, 2);
    if (s.prefix.empty()) continue;
    auto before = classify(s);
    auto after = classify(substitute_leading(s, g.pick(5)));
    CHECK((after.level == before.level || after.level + 1 == before.level));
    if (after.level == before.level) CHECK(after.kind == before.kind);
    else if (after.kind != ClassKind::Delta0) CHECK(after.kind != before.kind);
  }
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_equal(S("E x. x=1"), S("E y. y=1")));
  CHECK_FALSE(alpha_equal(S("E x. x=1"), S("E y. y=2")));
  CHECK(sentence_key(S("A u. E w. u<w")) == sentence_key(S("A a. E b. a<b")));
}

TEST_CASE("canonical_code: round trip and injectivity") {
  Gen g(2024);
  std::set<std::string> keys;
  std::set<std::string> codes;
  for (int i = 0; i < 150; ++i) {
    Sentence s = g.sentence(2, 2);
    Nat code = canonical_code(s);
    Sentence back = enumerate_sentence(code);
    CHECK(sentence_key(back) == sentence_key(s));
    CHECK(canonical_code(parse_sentence(print(s))) == code);
    bool new_key = keys.insert(sentence_key(s)).second;
    bool new_code = codes.insert(code.get_str()).second;
    CHECK(new_key == new_code);
  }
}

TEST_CASE("canonical_code: alpha-invariant, enumeration is dense from 0") {
  CHECK(canonical_code(S("E x. x=1")) == canonical_code(S("E zz. zz=1")));
  // The first few codes decode, re-encode, and stay size-monotone.
  std::uint64_t prev_size = 0;
  for (int k = 0; k < 200; ++k) {
    Sentence s = enumerate_sentence(k);
    CHECK(canonical_code(s) == k);
    CHECK(sentence_size(s) >= prev_size);
    prev_size = sentence_size(s);
  }
}

TEST_CASE("canonical_code: small sentences get small codes") {
  // The S2 scenario relies on the Fig-2 sentence being enumerated early.
  Nat code = canonical_code(S("E x. A y. x>=y"));
  CHECK(code < 500);
}

TEST_CASE("max_constant") {
  CHECK(max_constant(S("E x. x+3=2*7")) == 7);
  CHECK(max_constant(S("E x. x=x")) == 0);
}
