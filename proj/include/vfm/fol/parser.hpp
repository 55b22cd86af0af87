#pragma once

#include <string>

#include "vfm/fol/ast.hpp"

namespace vfm::fol {

class ParseError : public FolError {
 public:
  ParseError(const std::string& msg, int line, int col)
      : FolError(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
        line(line),
        col(col) {}
  int line, col;
};

// Parses the sentence grammar:
//   sentence := (("E"|"A") var ".")* matrix
//   matrix   := atom | "!" matrix | matrix "&" matrix | matrix "|" matrix
//             | ("E"|"A") var "<=" term "." matrix | "(" matrix ")"
//   atom     := term ("="|"!="|"<"|"<="|">"|">=") term
//   term     := nat | var | term "+" term | term "*" term | term "-" term
// "&" binds tighter than "|"; "*" tighter than "+"/"-"; a bounded quantifier
// body extends maximally to the right. Rejects unbound variables and
// duplicate prefix variables.
Sentence parse_sentence(const std::string& text);

}  // namespace vfm::fol
