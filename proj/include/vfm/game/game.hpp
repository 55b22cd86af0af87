#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vfm/fol/ast.hpp"

namespace vfm::game {

enum class Turn { Verifier, Falsifier, Resolved };

Turn turn(const fol::Sentence& s);

// A deterministic strategy. The underlying function maps a sentence to a move
// plus the computation cost of producing it, or nullopt for divergence; a
// query with insufficient fuel is indistinguishable from divergence.
class InstaPlayer {
 public:
  using Answer = std::optional<std::pair<fol::Move, std::uint64_t>>;
  using Fn = std::function<Answer(const fol::Sentence&)>;

  explicit InstaPlayer(Fn fn) : fn_(std::move(fn)) {}

  // Move if the strategy halts within `fuel` units, nullopt otherwise.
  std::optional<fol::Move> query(const fol::Sentence& s, std::uint64_t fuel) const;

  // The raw answer, including the cost. Nullopt means divergence.
  Answer answer(const fol::Sentence& s) const { return fn_(s); }

  static InstaPlayer constant(fol::Move m, std::uint64_t cost = 1);
  static InstaPlayer pass_everywhere();
  static InstaPlayer diverge_everywhere();
  // Answers {max_constant(s) + 1} on any sentence with a nonempty prefix.
  static InstaPlayer successor_challenger(std::uint64_t cost = 1);

 private:
  Fn fn_;
};

struct TranscriptEntry {
  std::uint64_t t;
  char mover;  // 'V' or 'F'
  fol::Move move;
  fol::Sentence sentence;  // position the move was made on
};

struct GameOutcome {
  bool resolved = false;
  bool truth = false;  // meaningful only when resolved
  fol::Sentence final_sentence;
  std::vector<TranscriptEntry> transcript;
};

// One line per move: t=<k> mover=<V|F> move=<Pass|{n1,n2,...}> sentence=<print>
std::string transcript_to_string(const GameOutcome& outcome);

// Alternates alpha (Verifier side), beta (Falsifier side), starting with
// alpha, applying play_set until the position is Delta0. `fuel` bounds both
// the per-query budget and the number of rounds. When role_enforce is set, a
// witness move made out of turn is coerced to Pass. Two consecutive passes on
// a non-Delta0 position, a divergent query, or fuel exhaustion all yield a
// Diverged outcome.
GameOutcome playfull(const fol::Sentence& s, const InstaPlayer& alpha,
                     const InstaPlayer& beta, std::uint64_t fuel,
                     bool role_enforce = true);

enum class CheckVerdict { Supported, Refuted, Inconclusive };

struct CheckResult {
  CheckVerdict verdict;
  int refuted_by = -1;  // adversary index when Refuted
};

// Semi-check of alpha-truth over a finite adversary family; role enforcement
// is always applied.
CheckResult check_alpha_true(const fol::Sentence& s, const InstaPlayer& alpha,
                             const std::vector<InstaPlayer>& adversaries,
                             std::uint64_t fuel);

}  // namespace vfm::game
