#include "vfm/fol/parser.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

namespace vfm::fol {

namespace {

enum class Tok { Ident, Number, Dot, LParen, RParen, Bang, Amp, Pipe, Plus, Star, Minus,
                 Eq, Ne, Lt, Le, Gt, Ge, End };

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t number = 0;
  int line, col;
};

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t, int l, int c) {
    out.push_back({k, std::move(t), 0, l, c});
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    int tl = line, tc = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string digits = text.substr(i, j - i);
      Token t{Tok::Number, digits, 0, tl, tc};
      try {
        t.number = std::stoull(digits);
      } catch (const std::out_of_range&) {
        throw ParseError("numeral too large", tl, tc);
      }
      out.push_back(t);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      push(Tok::Ident, text.substr(i, j - i), tl, tc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = [&](char n) { return i + 1 < text.size() && text[i + 1] == n; };
    switch (c) {
      case '.': push(Tok::Dot, ".", tl, tc); break;
      case '(': push(Tok::LParen, "(", tl, tc); break;
      case ')': push(Tok::RParen, ")", tl, tc); break;
      case '&': push(Tok::Amp, "&", tl, tc); break;
      case '|': push(Tok::Pipe, "|", tl, tc); break;
      case '+': push(Tok::Plus, "+", tl, tc); break;
      case '*': push(Tok::Star, "*", tl, tc); break;
      case '-': push(Tok::Minus, "-", tl, tc); break;
      case '=': push(Tok::Eq, "=", tl, tc); break;
      case '!':
        if (two('=')) {
          push(Tok::Ne, "!=", tl, tc);
          ++i;
          ++col;
        } else {
          push(Tok::Bang, "!", tl, tc);
        }
        break;
      case '<':
        if (two('=')) {
          push(Tok::Le, "<=", tl, tc);
          ++i;
          ++col;
        } else {
          push(Tok::Lt, "<", tl, tc);
        }
        break;
      case '>':
        if (two('=')) {
          push(Tok::Ge, ">=", tl, tc);
          ++i;
          ++col;
        } else {
          push(Tok::Gt, ">", tl, tc);
        }
        break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", 0, line, col});
  return out;
}

bool is_cmp(Tok k) {
  return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
         k == Tok::Ge;
}

CmpOp cmp_of(Tok k) {
  switch (k) {
    case Tok::Eq: return CmpOp::Eq;
    case Tok::Ne: return CmpOp::Ne;
    case Tok::Lt: return CmpOp::Lt;
    case Tok::Le: return CmpOp::Le;
    case Tok::Gt: return CmpOp::Gt;
    default: return CmpOp::Ge;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Sentence sentence() {
    Sentence s;
    // Prefix: ("E"|"A") var "." — distinguished from a bounded quantifier by
    // the "." directly after the variable.
    while (is_quant_ident() && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot) {
      Quant q = cur().text == "E" ? Quant::Exists : Quant::Forall;
      const Token& v = peek(1);
      for (const auto& [pq, pv] : s.prefix)
        if (pv == v.text)
          throw ParseError("duplicate prefix variable '" + v.text + "'", v.line, v.col);
      s.prefix.emplace_back(q, v.text);
      scope_.push_back(v.text);
      advance(3);
    }
    if (cur().kind == Tok::End) throw ParseError("missing matrix", cur().line, cur().col);
    s.matrix = or_expr();
    expect(Tok::End, "end of input");
    return s;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  void advance(std::size_t n = 1) { pos_ += n; }
  void expect(Tok k, const char* what) {
    if (cur().kind != k)
      throw ParseError(std::string("expected ") + what, cur().line, cur().col);
    advance();
  }
  bool is_quant_ident() const {
    return cur().kind == Tok::Ident && (cur().text == "E" || cur().text == "A");
  }

  MatrixPtr or_expr() {
    MatrixPtr m = and_expr();
    while (cur().kind == Tok::Pipe) {
      advance();
      m = mk_or(m, and_expr());
    }
    return m;
  }

  MatrixPtr and_expr() {
    MatrixPtr m = unary();
    while (cur().kind == Tok::Amp) {
      advance();
      m = mk_and(m, unary());
    }
    return m;
  }

  MatrixPtr unary() {
    if (cur().kind == Tok::Bang) {
      advance();
      return mk_not(unary());
    }
    if (is_quant_ident() && peek(1).kind == Tok::Ident) {
      // Bounded quantifier: E/A var "<=" term "." matrix (maximal body).
      MatrixKind kind =
          cur().text == "E" ? MatrixKind::BoundedExists : MatrixKind::BoundedForall;
      const Token& v = peek(1);
      if (peek(2).kind == Tok::Dot)
        throw ParseError("unbounded quantifiers are allowed only in the prefix", v.line,
                         v.col);
      advance(2);
      expect(Tok::Le, "'<=' after bounded-quantifier variable");
      TermPtr bound = term();
      expect(Tok::Dot, "'.' after bound");
      scope_.push_back(v.text);
      MatrixPtr body = or_expr();
      scope_.pop_back();
      return mk_bounded(kind, v.text, bound, body);
    }
    if (cur().kind == Tok::LParen) {
      // Could be a parenthesized matrix or a parenthesized term inside an
      // atom; try the matrix reading first and backtrack.
      std::size_t save = pos_, scope_save = scope_.size();
      try {
        advance();
        MatrixPtr m = or_expr();
        expect(Tok::RParen, "')'");
        Tok next = cur().kind;
        if (!is_cmp(next) && next != Tok::Plus && next != Tok::Star && next != Tok::Minus)
          return m;
      } catch (const ParseError&) {
      }
      pos_ = save;
      scope_.resize(scope_save);
    }
    return atom();
  }

  MatrixPtr atom() {
    TermPtr l = term();
    if (!is_cmp(cur().kind))
      throw ParseError("expected comparison operator", cur().line, cur().col);
    CmpOp op = cmp_of(cur().kind);
    advance();
    TermPtr r = term();
    return mk_atom(op, l, r);
  }

  TermPtr term() {
    TermPtr t = mul();
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      TermKind k = cur().kind == Tok::Plus ? TermKind::Add : TermKind::Monus;
      advance();
      t = mk_term(k, t, mul());
    }
    return t;
  }

  TermPtr mul() {
    TermPtr t = primary();
    while (cur().kind == Tok::Star) {
      advance();
      t = mk_term(TermKind::Mul, t, primary());
    }
    return t;
  }

  TermPtr primary() {
    if (cur().kind == Tok::Number) {
      TermPtr t = mk_const(cur().number);
      advance();
      return t;
    }
    if (cur().kind == Tok::Ident) {
      const Token& v = cur();
      bool bound = false;
      for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
        if (*it == v.text) {
          bound = true;
          break;
        }
      if (!bound) throw ParseError("unbound variable '" + v.text + "'", v.line, v.col);
      advance();
      return mk_var(v.text);
    }
    if (cur().kind == Tok::LParen) {
      advance();
      TermPtr t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    throw ParseError("expected term", cur().line, cur().col);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace

Sentence parse_sentence(const std::string& text) { return Parser(text).sentence(); }

}  // namespace vfm::fol
