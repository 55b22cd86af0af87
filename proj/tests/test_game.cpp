#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vfm/fol/parser.hpp"
#include "vfm/game/game.hpp"

using namespace vfm;
using namespace vfm::fol;
using namespace vfm::game;

namespace {

Sentence S(const std::string& text) { return parse_sentence(text); }

InstaPlayer witness(std::uint64_t n) { return InstaPlayer::constant(Move::witnesses({n})); }

// Random sentences with small constants, for the duality property.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::uint64_t pick(std::uint64_t n) { return rng() % n; }

  TermPtr term(int depth, const std::vector<std::string>& vars) {
    if (depth == 0 || pick(3) == 0) {
      if (!vars.empty() && pick(2) == 0) return mk_var(vars[pick(vars.size())]);
      return mk_const(pick(5));
    }
    TermKind k = static_cast<TermKind>(2 + pick(3));
    return mk_term(k, term(depth - 1, vars), term(depth - 1, vars));
  }

  MatrixPtr matrix(int depth, std::vector<std::string> vars) {
    std::uint64_t choice = depth == 0 ? 0 : pick(5);
    switch (choice) {
      default:
      case 0: return mk_atom(static_cast<CmpOp>(pick(6)), term(1, vars), term(1, vars));
      case 1: return mk_and(matrix(depth - 1, vars), matrix(depth - 1, vars));
      case 2: return mk_or(matrix(depth - 1, vars), matrix(depth - 1, vars));
      case 3:
      case 4: {
        std::string v = "b" + std::to_string(vars.size());
        TermPtr bound = mk_const(pick(4));
        auto kind = choice == 3 ? MatrixKind::BoundedExists : MatrixKind::BoundedForall;
        vars.push_back(v);
        return mk_bounded(kind, v, bound, matrix(depth - 1, vars));
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

  InstaPlayer random_player() {
    std::uint64_t a = pick(4), b = pick(4);
    std::uint64_t style = pick(3);
    return InstaPlayer([a, b, style](const Sentence& s) -> InstaPlayer::Answer {
      if (s.prefix.empty()) return std::make_pair(Move::pass(), 1);
      switch (style) {
        case 0: return std::make_pair(Move::witnesses({a}), 1);
        case 1: return std::make_pair(Move::witnesses({a, a + b + 1}), 1);
        default: return std::make_pair(Move::pass(), 1);
      }
    });
  }
};

}  // namespace

TEST_CASE("turn assignment") {
  CHECK(turn(S("E x. x+1=2")) == Turn::Verifier);
  CHECK(turn(S("A y. 3>=y")) == Turn::Falsifier);
  CHECK(turn(S("1+1=2")) == Turn::Resolved);
}

TEST_CASE("playfull: verifier wins a true Sigma1 sentence") {
  GameOutcome g = playfull(S("E x. x*x=4"), witness(2), InstaPlayer::diverge_everywhere(), 100);
  REQUIRE(g.resolved);
  CHECK(g.truth);
  CHECK(print(g.final_sentence) == "((2*2)=4)");
  REQUIRE(g.transcript.size() == 1);
  CHECK(g.transcript[0].mover == 'V');
  CHECK(g.transcript[0].move == Move::witnesses({2}));
}

TEST_CASE("playfull: successor challenge refutes the false Sigma2 sentence") {
  InstaPlayer alpha = witness(7);
  GameOutcome g = playfull(S("E x. A y. x>=y"), alpha,
                           InstaPlayer::successor_challenger(), 100);
  REQUIRE(g.resolved);
  CHECK_FALSE(g.truth);
}

TEST_CASE("playfull: no mover acts -> diverged") {
  GameOutcome g = playfull(S("A x. x>=0"), InstaPlayer::pass_everywhere(),
                           InstaPlayer::diverge_everywhere(), 100);
  CHECK_FALSE(g.resolved);
}

TEST_CASE("playfull: stall rule ends the game") {
  GameOutcome g = playfull(S("A x. x>=0"), InstaPlayer::pass_everywhere(),
                           InstaPlayer::pass_everywhere(), 100);
  CHECK_FALSE(g.resolved);
  CHECK(g.transcript.size() == 2);
}

TEST_CASE("playfull: role enforcement coerces off-role witnesses to Pass") {
  // Alpha tries to "prove" a Pi sentence by instantiating it.
  GameOutcome g = playfull(S("A x. x>=0"), witness(3),
                           InstaPlayer::pass_everywhere(), 100, true);
  CHECK_FALSE(g.resolved);  // alpha coerced to Pass, beta passes, stall
  REQUIRE(!g.transcript.empty());
  CHECK(g.transcript[0].move.is_pass());

  // Literal mode lets the move through.
  GameOutcome lit = playfull(S("A x. x>=0"), witness(3),
                             InstaPlayer::pass_everywhere(), 100, false);
  REQUIRE(lit.resolved);
  CHECK(lit.truth);
}

TEST_CASE("playfull: transcript soundness and determinism") {
  Gen g(31337);
  for (int i = 0; i < 100; ++i) {
    Sentence s = g.sentence(3, 2);
    InstaPlayer a = g.random_player(), b = g.random_player();
    GameOutcome o1 = playfull(s, a, b, 12);
    GameOutcome o2 = playfull(s, a, b, 12);
    CHECK(transcript_to_string(o1) == transcript_to_string(o2));
    CHECK(o1.resolved == o2.resolved);
    Sentence cur = s;
    for (const auto& e : o1.transcript) {
      CHECK(alpha_equal(e.sentence, cur));
      if (!e.move.is_pass()) {
        Turn t = turn(cur);
        CHECK((t == Turn::Verifier) == (e.mover == 'V'));
        cur = play_set(cur, e.move);
      }
    }
    if (o1.resolved) CHECK(alpha_equal(o1.final_sentence, cur));
  }
}

TEST_CASE("playfull: fuel monotonicity") {
  Gen g(555);
  for (int i = 0; i < 60; ++i) {
    Sentence s = g.sentence(3, 2);
    InstaPlayer a = g.random_player(), b = g.random_player();
    GameOutcome low = playfull(s, a, b, 10);
    if (!low.resolved) continue;
    for (std::uint64_t fuel : {11, 20, 100}) {
      GameOutcome hi = playfull(s, a, b, fuel);
      CHECK(hi.resolved);
      CHECK(hi.truth == low.truth);
      CHECK(print(hi.final_sentence) == print(low.final_sentence));
    }
  }
}

TEST_CASE("playfull: duality under negation") {
  Gen g(2718);
  for (int i = 0; i < 150; ++i) {
    Sentence s = g.sentence(3, 2);
    InstaPlayer a = g.random_player(), b = g.random_player();
    GameOutcome fwd = playfull(s, a, b, 12, true);
    GameOutcome dual = playfull(negate(s), b, a, 12, true);
    if (fwd.resolved && dual.resolved) CHECK(fwd.truth == !dual.truth);
  }
}

TEST_CASE("check_alpha_true") {
  std::vector<InstaPlayer> advs = {InstaPlayer::pass_everywhere(),
                                   InstaPlayer::successor_challenger()};
  CheckResult supported = check_alpha_true(S("E x. x*x=4"), witness(2), advs, 100);
  CHECK(supported.verdict == CheckVerdict::Supported);

  CheckResult refuted = check_alpha_true(S("E x. A y. x>=y"), witness(9), advs, 100);
  CHECK(refuted.verdict == CheckVerdict::Refuted);
  CHECK(refuted.refuted_by == 1);

  CheckResult pi_ok = check_alpha_true(S("A x. x>=0"), InstaPlayer::pass_everywhere(),
                                       {witness(3)}, 100);
  CHECK(pi_ok.verdict == CheckVerdict::Supported);

  CheckResult inconclusive = check_alpha_true(
      S("A x. x>=0"), InstaPlayer::pass_everywhere(),
      {InstaPlayer::diverge_everywhere()}, 100);
  CHECK(inconclusive.verdict == CheckVerdict::Inconclusive);
}

TEST_CASE("transcript export format") {
  GameOutcome g = playfull(S("E x. x*x=4"), witness(2),
                           InstaPlayer::pass_everywhere(), 100);
  CHECK(transcript_to_string(g) == "t=0 mover=V move={2} sentence=E x. ((x*x)=4)\n");
}
