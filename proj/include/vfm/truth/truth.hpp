#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "vfm/fol/ast.hpp"
#include "vfm/game/game.hpp"

namespace vfm::truth {

enum class ThreeVal { True, False, Unknown };

// Tarskian truth with every prefix variable restricted to 0..B. An
// existential is True only when a witness <= B exists; a universal is False
// only when a counterexample <= B exists; anything the bound leaves
// undetermined is Unknown.
ThreeVal bounded_tarski(const fol::Sentence& s, std::uint64_t B);

// Market-player signature: (time, sentence, inventory label) -> move.
using PlayerFn =
    std::function<fol::Move(std::uint64_t, const fol::Sentence&, const std::string&)>;

inline const std::string kStarLabel = "*";

// Lifts an offline strategy to a market player: on label "*" it emits
// alpha(P) at exactly one time, the first t with canonical_code(P) <= t and
// alpha halting on P within t fuel units, and passes everywhere else.
PlayerFn construct_player(const game::InstaPlayer& alpha);

}  // namespace vfm::truth
