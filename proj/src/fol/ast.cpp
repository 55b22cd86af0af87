#include "vfm/fol/ast.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace vfm::fol {

TermPtr mk_const(std::uint64_t n) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Const;
  t->value = n;
  return t;
}

TermPtr mk_var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->var = std::move(name);
  return t;
}

TermPtr mk_term(TermKind kind, TermPtr lhs, TermPtr rhs) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  t->lhs = std::move(lhs);
  t->rhs = std::move(rhs);
  return t;
}

MatrixPtr mk_atom(CmpOp op, TermPtr lhs, TermPtr rhs) {
  auto m = std::make_shared<Matrix>();
  m->kind = MatrixKind::Atom;
  m->op = op;
  m->lhs = std::move(lhs);
  m->rhs = std::move(rhs);
  return m;
}

namespace {

CmpOp flip_op(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
  }
  throw FolError("flip_op: bad op");
}

}  // namespace

MatrixPtr mk_not(const MatrixPtr& m) {
  switch (m->kind) {
    case MatrixKind::Atom: return mk_atom(flip_op(m->op), m->lhs, m->rhs);
    case MatrixKind::And: return mk_or(mk_not(m->a), mk_not(m->b));
    case MatrixKind::Or: return mk_and(mk_not(m->a), mk_not(m->b));
    case MatrixKind::BoundedExists:
      return mk_bounded(MatrixKind::BoundedForall, m->var, m->bound, mk_not(m->a));
    case MatrixKind::BoundedForall:
      return mk_bounded(MatrixKind::BoundedExists, m->var, m->bound, mk_not(m->a));
  }
  throw FolError("mk_not: bad kind");
}

MatrixPtr mk_and(MatrixPtr a, MatrixPtr b) {
  auto m = std::make_shared<Matrix>();
  m->kind = MatrixKind::And;
  m->a = std::move(a);
  m->b = std::move(b);
  return m;
}

MatrixPtr mk_or(MatrixPtr a, MatrixPtr b) {
  auto m = std::make_shared<Matrix>();
  m->kind = MatrixKind::Or;
  m->a = std::move(a);
  m->b = std::move(b);
  return m;
}

MatrixPtr mk_bounded(MatrixKind kind, std::string var, TermPtr bound, MatrixPtr body) {
  if (kind != MatrixKind::BoundedExists && kind != MatrixKind::BoundedForall)
    throw FolError("mk_bounded: not a bounded quantifier kind");
  auto m = std::make_shared<Matrix>();
  m->kind = kind;
  m->var = std::move(var);
  m->bound = std::move(bound);
  m->a = std::move(body);
  return m;
}

Move Move::witnesses(std::vector<std::uint64_t> ns) {
  if (ns.empty()) throw FolError("a witness move must name at least one natural");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  Move m;
  m.ns_ = std::move(ns);
  return m;
}

std::string Move::to_string() const {
  if (is_pass()) return "Pass";
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < ns_.size(); ++i) {
    if (i) os << ',';
    os << ns_[i];
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Printing (fully parenthesized canonical form; parse(print(s)) == s).

namespace {

const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

void print_term(const TermPtr& t, std::ostream& os) {
  switch (t->kind) {
    case TermKind::Const: os << t->value; return;
    case TermKind::Var: os << t->var; return;
    case TermKind::Add:
    case TermKind::Mul:
    case TermKind::Monus: {
      const char* op = t->kind == TermKind::Add ? "+" : t->kind == TermKind::Mul ? "*" : "-";
      os << '(';
      print_term(t->lhs, os);
      os << op;
      print_term(t->rhs, os);
      os << ')';
      return;
    }
  }
}

void print_matrix(const MatrixPtr& m, std::ostream& os) {
  switch (m->kind) {
    case MatrixKind::Atom:
      os << '(';
      print_term(m->lhs, os);
      os << cmp_symbol(m->op);
      print_term(m->rhs, os);
      os << ')';
      return;
    case MatrixKind::And:
    case MatrixKind::Or:
      os << '(';
      print_matrix(m->a, os);
      os << (m->kind == MatrixKind::And ? " & " : " | ");
      print_matrix(m->b, os);
      os << ')';
      return;
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall:
      os << '(' << (m->kind == MatrixKind::BoundedExists ? 'E' : 'A') << ' ' << m->var << "<=";
      print_term(m->bound, os);
      os << ". ";
      print_matrix(m->a, os);
      os << ')';
      return;
  }
}

}  // namespace

std::string print(const TermPtr& t) {
  std::ostringstream os;
  print_term(t, os);
  return os.str();
}

std::string print(const MatrixPtr& m) {
  std::ostringstream os;
  print_matrix(m, os);
  return os.str();
}

std::string print(const Sentence& s) {
  std::ostringstream os;
  for (const auto& [q, v] : s.prefix)
    os << (q == Quant::Exists ? 'E' : 'A') << ' ' << v << ". ";
  print_matrix(s.matrix, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Classification.

SentenceClass classify(const Sentence& s) {
  if (s.prefix.empty()) return {ClassKind::Delta0, 0};
  unsigned blocks = 1;
  for (std::size_t i = 1; i < s.prefix.size(); ++i)
    if (s.prefix[i].first != s.prefix[i - 1].first) ++blocks;
  ClassKind kind = s.prefix.front().first == Quant::Exists ? ClassKind::Sigma : ClassKind::Pi;
  return {kind, blocks};
}

bool is_delta0(const Sentence& s) { return s.prefix.empty(); }

// ---------------------------------------------------------------------------
// Evaluation of closed Delta0 sentences.

namespace {

using Env = std::map<std::string, std::uint64_t>;

std::uint64_t eval_term(const TermPtr& t, const Env& env) {
  switch (t->kind) {
    case TermKind::Const: return t->value;
    case TermKind::Var: {
      auto it = env.find(t->var);
      if (it == env.end()) throw FolError("unbound variable in evaluation: " + t->var);
      return it->second;
    }
    case TermKind::Add: return eval_term(t->lhs, env) + eval_term(t->rhs, env);
    case TermKind::Mul: return eval_term(t->lhs, env) * eval_term(t->rhs, env);
    case TermKind::Monus: {
      std::uint64_t a = eval_term(t->lhs, env), b = eval_term(t->rhs, env);
      return a > b ? a - b : 0;
    }
  }
  throw FolError("eval_term: bad kind");
}

bool eval_matrix(const MatrixPtr& m, Env& env) {
  switch (m->kind) {
    case MatrixKind::Atom: {
      std::uint64_t a = eval_term(m->lhs, env), b = eval_term(m->rhs, env);
      switch (m->op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
      }
      throw FolError("eval_matrix: bad op");
    }
    case MatrixKind::And: return eval_matrix(m->a, env) && eval_matrix(m->b, env);
    case MatrixKind::Or: return eval_matrix(m->a, env) || eval_matrix(m->b, env);
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall: {
      std::uint64_t bound = eval_term(m->bound, env);
      bool exists = m->kind == MatrixKind::BoundedExists;
      auto saved = env.find(m->var) != env.end() ? std::optional<std::uint64_t>(env[m->var])
                                                 : std::nullopt;
      bool result = !exists;
      for (std::uint64_t n = 0; n <= bound; ++n) {
        env[m->var] = n;
        bool v = eval_matrix(m->a, env);
        if (exists && v) {
          result = true;
          break;
        }
        if (!exists && !v) {
          result = false;
          break;
        }
      }
      if (saved)
        env[m->var] = *saved;
      else
        env.erase(m->var);
      return result;
    }
  }
  throw FolError("eval_matrix: bad kind");
}

}  // namespace

bool eval_delta0(const Sentence& s) {
  if (!is_delta0(s)) throw FolError("eval_delta0: sentence has a nonempty prefix");
  Env env;
  return eval_matrix(s.matrix, env);
}

// ---------------------------------------------------------------------------
// Substitution (capture-aware; inner bounded binders shadow).

namespace {

TermPtr subst_term(const TermPtr& t, const std::string& var, std::uint64_t n) {
  switch (t->kind) {
    case TermKind::Const: return t;
    case TermKind::Var: return t->var == var ? mk_const(n) : t;
    default: return mk_term(t->kind, subst_term(t->lhs, var, n), subst_term(t->rhs, var, n));
  }
}

MatrixPtr subst_matrix(const MatrixPtr& m, const std::string& var, std::uint64_t n) {
  switch (m->kind) {
    case MatrixKind::Atom:
      return mk_atom(m->op, subst_term(m->lhs, var, n), subst_term(m->rhs, var, n));
    case MatrixKind::And: return mk_and(subst_matrix(m->a, var, n), subst_matrix(m->b, var, n));
    case MatrixKind::Or: return mk_or(subst_matrix(m->a, var, n), subst_matrix(m->b, var, n));
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall: {
      TermPtr bound = subst_term(m->bound, var, n);
      MatrixPtr body = m->var == var ? m->a : subst_matrix(m->a, var, n);
      return mk_bounded(m->kind, m->var, bound, body);
    }
  }
  throw FolError("subst_matrix: bad kind");
}

}  // namespace

Sentence substitute_leading(const Sentence& s, std::uint64_t n) {
  if (s.prefix.empty()) throw FolError("substitute_leading: Delta0 sentence");
  Sentence out;
  out.prefix.assign(s.prefix.begin() + 1, s.prefix.end());
  out.matrix = subst_matrix(s.matrix, s.prefix.front().second, n);
  return out;
}

// ---------------------------------------------------------------------------
// play(P, N).

namespace {

void collect_names_term(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Var: out.insert(t->var); return;
    case TermKind::Const: return;
    default:
      collect_names_term(t->lhs, out);
      collect_names_term(t->rhs, out);
  }
}

void collect_names_matrix(const MatrixPtr& m, std::set<std::string>& out) {
  switch (m->kind) {
    case MatrixKind::Atom:
      collect_names_term(m->lhs, out);
      collect_names_term(m->rhs, out);
      return;
    case MatrixKind::And:
    case MatrixKind::Or:
      collect_names_matrix(m->a, out);
      collect_names_matrix(m->b, out);
      return;
    default:
      out.insert(m->var);
      collect_names_term(m->bound, out);
      collect_names_matrix(m->a, out);
  }
}

// Renames free occurrences of `from` to `to` (bounded binders may shadow).
TermPtr rename_term(const TermPtr& t, const std::string& from, const std::string& to) {
  switch (t->kind) {
    case TermKind::Const: return t;
    case TermKind::Var: return t->var == from ? mk_var(to) : t;
    default: return mk_term(t->kind, rename_term(t->lhs, from, to), rename_term(t->rhs, from, to));
  }
}

MatrixPtr rename_matrix(const MatrixPtr& m, const std::string& from, const std::string& to) {
  switch (m->kind) {
    case MatrixKind::Atom:
      return mk_atom(m->op, rename_term(m->lhs, from, to), rename_term(m->rhs, from, to));
    case MatrixKind::And:
      return mk_and(rename_matrix(m->a, from, to), rename_matrix(m->b, from, to));
    case MatrixKind::Or: return mk_or(rename_matrix(m->a, from, to), rename_matrix(m->b, from, to));
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall: {
      TermPtr bound = rename_term(m->bound, from, to);
      MatrixPtr body = m->var == from ? m->a : rename_matrix(m->a, from, to);
      return mk_bounded(m->kind, m->var, bound, body);
    }
  }
  throw FolError("rename_matrix: bad kind");
}

}  // namespace

Sentence play_set(const Sentence& s, const Move& m) {
  if (m.is_pass()) return s;
  if (s.prefix.empty()) throw FolError("play_set: witness move on a Delta0 sentence");

  bool sigma = s.prefix.front().first == Quant::Exists;

  std::set<std::string> used;
  for (const auto& [q, v] : s.prefix) used.insert(v);
  collect_names_matrix(s.matrix, used);

  Sentence out;
  MatrixPtr combined;
  std::size_t instance = 0;
  for (std::uint64_t n : m.values()) {
    ++instance;
    Sentence inst = substitute_leading(s, n);
    // Rename the instance's remaining prefix apart: v -> v<i> (suffixing '_'
    // until fresh).
    for (auto& [q, v] : inst.prefix) {
      std::string fresh = v + std::to_string(instance);
      while (used.count(fresh)) fresh += "_";
      used.insert(fresh);
      inst.matrix = rename_matrix(inst.matrix, v, fresh);
      v = fresh;
    }
    out.prefix.insert(out.prefix.end(), inst.prefix.begin(), inst.prefix.end());
    combined = combined ? (sigma ? mk_or(combined, inst.matrix) : mk_and(combined, inst.matrix))
                        : inst.matrix;
  }
  out.matrix = combined;
  return out;
}

// ---------------------------------------------------------------------------
// Negation (involutive; mk_not keeps it pushed to atoms).

Sentence negate(const Sentence& s) {
  Sentence out;
  out.prefix.reserve(s.prefix.size());
  for (const auto& [q, v] : s.prefix)
    out.prefix.emplace_back(q == Quant::Exists ? Quant::Forall : Quant::Exists, v);
  out.matrix = mk_not(s.matrix);
  return out;
}

// ---------------------------------------------------------------------------
// Alpha-normalization: binders renamed v0, v1, ... in binding order (prefix
// first, then bounded quantifiers in pre-order).

namespace {

struct NormCtx {
  std::vector<std::pair<std::string, std::string>> scope;  // (original, canonical)
  unsigned next = 0;

  std::string lookup(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    throw FolError("unbound variable: " + name);
  }
};

TermPtr norm_term(const TermPtr& t, const NormCtx& ctx) {
  switch (t->kind) {
    case TermKind::Const: return t;
    case TermKind::Var: return mk_var(ctx.lookup(t->var));
    default: return mk_term(t->kind, norm_term(t->lhs, ctx), norm_term(t->rhs, ctx));
  }
}

MatrixPtr norm_matrix(const MatrixPtr& m, NormCtx& ctx) {
  switch (m->kind) {
    case MatrixKind::Atom: return mk_atom(m->op, norm_term(m->lhs, ctx), norm_term(m->rhs, ctx));
    case MatrixKind::And: return mk_and(norm_matrix(m->a, ctx), norm_matrix(m->b, ctx));
    case MatrixKind::Or: return mk_or(norm_matrix(m->a, ctx), norm_matrix(m->b, ctx));
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall: {
      TermPtr bound = norm_term(m->bound, ctx);
      std::string fresh = "v" + std::to_string(ctx.next++);
      ctx.scope.emplace_back(m->var, fresh);
      MatrixPtr body = norm_matrix(m->a, ctx);
      ctx.scope.pop_back();
      return mk_bounded(m->kind, fresh, bound, body);
    }
  }
  throw FolError("norm_matrix: bad kind");
}

}  // namespace

Sentence alpha_normalize(const Sentence& s) {
  NormCtx ctx;
  Sentence out;
  out.prefix.reserve(s.prefix.size());
  for (const auto& [q, v] : s.prefix) {
    std::string fresh = "v" + std::to_string(ctx.next++);
    ctx.scope.emplace_back(v, fresh);
    out.prefix.emplace_back(q, fresh);
  }
  out.matrix = norm_matrix(s.matrix, ctx);
  return out;
}

bool alpha_equal(const Sentence& a, const Sentence& b) {
  return sentence_key(a) == sentence_key(b);
}

std::string sentence_key(const Sentence& s) { return print(alpha_normalize(s)); }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t max_const_term(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Const: return t->value;
    case TermKind::Var: return 0;
    default: return std::max(max_const_term(t->lhs), max_const_term(t->rhs));
  }
}

std::uint64_t max_const_matrix(const MatrixPtr& m) {
  switch (m->kind) {
    case MatrixKind::Atom: return std::max(max_const_term(m->lhs), max_const_term(m->rhs));
    case MatrixKind::And:
    case MatrixKind::Or: return std::max(max_const_matrix(m->a), max_const_matrix(m->b));
    default: return std::max(max_const_term(m->bound), max_const_matrix(m->a));
  }
}

}  // namespace

std::uint64_t max_constant(const Sentence& s) { return max_const_matrix(s.matrix); }

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Const: return a->value == b->value;
    case TermKind::Var: return a->var == b->var;
    default: return term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
  }
}

bool matrix_equal(const MatrixPtr& a, const MatrixPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case MatrixKind::Atom:
      return a->op == b->op && term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
    case MatrixKind::And:
    case MatrixKind::Or: return matrix_equal(a->a, b->a) && matrix_equal(a->b, b->b);
    default:
      return a->var == b->var && term_equal(a->bound, b->bound) && matrix_equal(a->a, b->a);
  }
}

}  // namespace vfm::fol
