#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vfm::fol {

class FolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Terms: natural-number arithmetic with truncated subtraction.

enum class TermKind { Const, Var, Add, Mul, Monus };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  std::uint64_t value = 0;  // Const
  std::string var;          // Var
  TermPtr lhs, rhs;         // Add / Mul / Monus
};

TermPtr mk_const(std::uint64_t n);
TermPtr mk_var(std::string name);
TermPtr mk_term(TermKind kind, TermPtr lhs, TermPtr rhs);

// ---------------------------------------------------------------------------
// Matrices: the decidable quantifier-free-plus-bounded-quantifier layer.

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

enum class MatrixKind { Atom, And, Or, BoundedExists, BoundedForall };

struct Matrix;
using MatrixPtr = std::shared_ptr<const Matrix>;

struct Matrix {
  MatrixKind kind;
  // Atom
  CmpOp op = CmpOp::Eq;
  TermPtr lhs, rhs;
  // And/Or: a, b; Bounded: body in a
  MatrixPtr a, b;
  // Bounded quantifier
  std::string var;
  TermPtr bound;
};

MatrixPtr mk_atom(CmpOp op, TermPtr lhs, TermPtr rhs);
// Negation is kept pushed to atoms: mk_not returns the negated matrix, so an
// AST never contains a negation node and negation is involutive on the nose.
MatrixPtr mk_not(const MatrixPtr& m);
MatrixPtr mk_and(MatrixPtr a, MatrixPtr b);
MatrixPtr mk_or(MatrixPtr a, MatrixPtr b);
MatrixPtr mk_bounded(MatrixKind kind, std::string var, TermPtr bound, MatrixPtr body);

// ---------------------------------------------------------------------------
// Sentences: prenex prefix over a matrix.

enum class Quant { Exists, Forall };

struct Sentence {
  std::vector<std::pair<Quant, std::string>> prefix;
  MatrixPtr matrix;
};

enum class ClassKind { Delta0, Sigma, Pi };

struct SentenceClass {
  ClassKind kind;
  unsigned level;  // 0 iff Delta0; else number of alternation blocks
};

// A game move: pass, or a nonempty duplicate-free ascending witness set.
class Move {
 public:
  static Move pass() { return Move{}; }
  // Sorts and dedups; throws FolError on an empty set.
  static Move witnesses(std::vector<std::uint64_t> ns);

  bool is_pass() const { return ns_.empty(); }
  const std::vector<std::uint64_t>& values() const { return ns_; }
  std::string to_string() const;  // "Pass" or "{1,2,3}"

  bool operator==(const Move&) const = default;

 private:
  Move() = default;
  std::vector<std::uint64_t> ns_;
};

// ---------------------------------------------------------------------------
// Operations.

std::string print(const TermPtr& t);
std::string print(const MatrixPtr& m);
std::string print(const Sentence& s);

SentenceClass classify(const Sentence& s);

bool is_delta0(const Sentence& s);

// Decides a closed Delta0 sentence by structural recursion; bounded
// quantifiers enumerate 0..bound inclusive. Throws FolError on non-Delta0.
bool eval_delta0(const Sentence& s);

// Drops the first prefix entry and substitutes n for its variable.
Sentence substitute_leading(const Sentence& s, std::uint64_t n);

// play(P, N): Pass leaves s unchanged; a witness set instantiates the leading
// variable at each witness and re-prenexes the disjunction (Sigma) or
// conjunction (Pi), renaming the per-instance prefixes apart.
Sentence play_set(const Sentence& s, const Move& m);

// Dual prefix, negation pushed to atoms. Involutive on the AST.
Sentence negate(const Sentence& s);

// Canonical bound-variable renaming (v0, v1, ... in binder order).
Sentence alpha_normalize(const Sentence& s);

bool alpha_equal(const Sentence& a, const Sentence& b);

// print(alpha_normalize(s)) — the identity notion for sentence map keys.
std::string sentence_key(const Sentence& s);

// Largest constant appearing in the sentence (0 when none).
std::uint64_t max_constant(const Sentence& s);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool matrix_equal(const MatrixPtr& a, const MatrixPtr& b);

}  // namespace vfm::fol
