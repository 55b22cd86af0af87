#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "vfm/fol/ast.hpp"
#include "vfm/game/game.hpp"
#include "vfm/market/market.hpp"
#include "vfm/rational.hpp"

namespace vfm::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-step strategy fuel: c * (t+1)^k, saturating at uint64 max.
struct FuelPolicy {
  std::uint64_t c = 1000;
  std::uint64_t k = 2;
  std::uint64_t at(std::uint64_t t) const;
};

// Strategy spec mini-language, ';'-separated items:
//   pass | diverge | successor | {n,...}        (sets the default answer)
//   <sentence> -> {n,...} | pass | diverge       (table rule)
// Table rules match on alpha-equivalence and win over the default; the last
// default-setting item wins. An empty spec plays Pass everywhere.
game::InstaPlayer parse_player_spec(const std::string& spec);

// Buys `s` whenever the price admits it, demanding cash/limit shares below
// `limit`, and plays `alpha` once through the one-shot lifting.
market::AgentSpec threshold_buyer(std::string id, Rat endowment, std::uint64_t birthday,
                                  const fol::Sentence& s, const Rat& limit,
                                  const game::InstaPlayer& alpha);

// Quotes both orientations of `s`: buys below x - eps and sells holdings
// above x + eps (mirrored at 1 - x for the negation). Buy quantities are
// capped at 1 and at what the cash budget covers across both sides.
market::AgentSpec arbitrageur(std::string id, Rat endowment, std::uint64_t birthday,
                              const fol::Sentence& s, const Rat& x, const Rat& eps);

// Demands `quantity` shares of `s` at any price, once, at its birthday.
market::AgentSpec passive_holder(std::string id, Rat endowment, std::uint64_t birthday,
                                 const fol::Sentence& s, const Rat& quantity);

// Buys `s` below `limit` every step and answers every on-move position with
// `challenge`, queried under the fuel policy.
market::AgentSpec adversary(std::string id, Rat endowment, std::uint64_t birthday,
                            const fol::Sentence& s, const Rat& limit,
                            const game::InstaPlayer& challenge, FuelPolicy fuel);

// Alternates: even steps demand `quantity` of `s` below `limit`, odd steps
// the same for the negation. Never plays.
market::AgentSpec oscillator(std::string id, Rat endowment, std::uint64_t birthday,
                             const fol::Sentence& s, const Rat& limit,
                             const Rat& quantity);

}  // namespace vfm::harness
