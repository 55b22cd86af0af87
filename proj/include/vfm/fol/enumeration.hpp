#pragma once

#include "vfm/fol/ast.hpp"
#include "vfm/rational.hpp"

namespace vfm::fol {

// A total order on alpha-equivalence classes of sentences: classes are
// ordered by a structural size measure, then lexicographically by shape.
// canonical_code(s) is the rank of s's class in that order (starting at 0)
// and enumerate_sentence is its inverse, so
//   enumerate_sentence(canonical_code(s)) == alpha_normalize(s).
Nat canonical_code(const Sentence& s);

// Inverse of canonical_code. Throws FolError when the code would require a
// sentence larger than an internal safety cap.
Sentence enumerate_sentence(const Nat& code);

// The size measure underlying the order (constants weigh value+1).
std::uint64_t sentence_size(const Sentence& s);

}  // namespace vfm::fol
