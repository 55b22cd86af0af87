#include "vfm/truth/truth.hpp"

#include "vfm/fol/enumeration.hpp"

namespace vfm::truth {

using fol::Move;
using fol::Quant;
using fol::Sentence;

ThreeVal bounded_tarski(const Sentence& s, std::uint64_t B) {
  if (s.prefix.empty()) return fol::eval_delta0(s) ? ThreeVal::True : ThreeVal::False;
  bool exists = s.prefix.front().first == Quant::Exists;
  for (std::uint64_t n = 0; n <= B; ++n) {
    ThreeVal v = bounded_tarski(fol::substitute_leading(s, n), B);
    if (exists && v == ThreeVal::True) return ThreeVal::True;
    if (!exists && v == ThreeVal::False) return ThreeVal::False;
  }
  return ThreeVal::Unknown;
}

PlayerFn construct_player(const game::InstaPlayer& alpha) {
  return [alpha](std::uint64_t t, const Sentence& s, const std::string& label) -> Move {
    if (label != kStarLabel) return Move::pass();
    auto a = alpha.answer(s);
    if (!a) return Move::pass();
    Nat fire = fol::canonical_code(s);
    if (fire < a->second) fire = a->second;
    return fire == t ? a->first : Move::pass();
  };
}

}  // namespace vfm::truth
