#include "vfm/game/game.hpp"

#include <sstream>

namespace vfm::game {

using fol::Move;
using fol::Sentence;

Turn turn(const Sentence& s) {
  auto c = fol::classify(s);
  switch (c.kind) {
    case fol::ClassKind::Sigma: return Turn::Verifier;
    case fol::ClassKind::Pi: return Turn::Falsifier;
    default: return Turn::Resolved;
  }
}

std::optional<Move> InstaPlayer::query(const Sentence& s, std::uint64_t fuel) const {
  Answer a = fn_(s);
  if (!a || a->second > fuel) return std::nullopt;
  return a->first;
}

InstaPlayer InstaPlayer::constant(Move m, std::uint64_t cost) {
  return InstaPlayer([m, cost](const Sentence&) -> Answer {
    return std::make_pair(m, cost);
  });
}

InstaPlayer InstaPlayer::pass_everywhere() { return constant(Move::pass()); }

InstaPlayer InstaPlayer::diverge_everywhere() {
  return InstaPlayer([](const Sentence&) -> Answer { return std::nullopt; });
}

InstaPlayer InstaPlayer::successor_challenger(std::uint64_t cost) {
  return InstaPlayer([cost](const Sentence& s) -> Answer {
    if (s.prefix.empty()) return std::make_pair(Move::pass(), cost);
    return std::make_pair(Move::witnesses({fol::max_constant(s) + 1}), cost);
  });
}

std::string transcript_to_string(const GameOutcome& outcome) {
  std::ostringstream out;
  for (const auto& e : outcome.transcript) {
    out << "t=" << e.t << " mover=" << e.mover << " move=" << e.move.to_string()
        << " sentence=" << fol::print(e.sentence) << "\n";
  }
  return out.str();
}

GameOutcome playfull(const Sentence& s, const InstaPlayer& alpha,
                     const InstaPlayer& beta, std::uint64_t fuel,
                     bool role_enforce) {
  GameOutcome out;
  Sentence current = s;
  unsigned consecutive_passes = 0;
  for (std::uint64_t k = 0; k < fuel; ++k) {
    if (fol::is_delta0(current)) {
      out.resolved = true;
      out.truth = fol::eval_delta0(current);
      out.final_sentence = current;
      return out;
    }
    bool alpha_turn = k % 2 == 0;
    const InstaPlayer& mover = alpha_turn ? alpha : beta;
    char role = alpha_turn ? 'V' : 'F';
    std::optional<Move> m = mover.query(current, fuel);
    if (!m) {
      out.final_sentence = current;
      return out;  // diverged
    }
    Turn t = turn(current);
    bool on_role = (t == Turn::Verifier) == alpha_turn;
    Move effective = *m;
    if (role_enforce && !effective.is_pass() && !on_role) effective = Move::pass();
    out.transcript.push_back({k, role, effective, current});
    if (effective.is_pass()) {
      if (++consecutive_passes >= 2) {
        out.final_sentence = current;
        return out;  // stalled
      }
    } else {
      consecutive_passes = 0;
      current = fol::play_set(current, effective);
    }
  }
  if (fol::is_delta0(current)) {
    out.resolved = true;
    out.truth = fol::eval_delta0(current);
  }
  out.final_sentence = current;
  return out;
}

CheckResult check_alpha_true(const Sentence& s, const InstaPlayer& alpha,
                             const std::vector<InstaPlayer>& adversaries,
                             std::uint64_t fuel) {
  bool any_diverged = false;
  for (std::size_t i = 0; i < adversaries.size(); ++i) {
    GameOutcome g = playfull(s, alpha, adversaries[i], fuel, true);
    if (g.resolved && !g.truth) return {CheckVerdict::Refuted, static_cast<int>(i)};
    if (!g.resolved) any_diverged = true;
  }
  if (any_diverged) return {CheckVerdict::Inconclusive, -1};
  return {CheckVerdict::Supported, -1};
}

}  // namespace vfm::game
