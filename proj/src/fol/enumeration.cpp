#include "vfm/fol/enumeration.hpp"

#include <cstdint>
#include <map>
#include <utility>

namespace vfm::fol {

namespace {

using U = std::uint64_t;

U term_size(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Const: return t->value + 1;
    case TermKind::Var: return 1;
    default: return 1 + term_size(t->lhs) + term_size(t->rhs);
  }
}

U matrix_size(const MatrixPtr& m) {
  switch (m->kind) {
    case MatrixKind::Atom: return 1 + term_size(m->lhs) + term_size(m->rhs);
    case MatrixKind::And:
    case MatrixKind::Or: return 1 + matrix_size(m->a) + matrix_size(m->b);
    default: return 1 + term_size(m->bound) + matrix_size(m->a);
  }
}

constexpr U kMaxSize = 4096;  // safety cap for enumerate_sentence

// Counting tables, memoized per thread. v = number of variables in scope.
struct Counter {
  std::map<std::pair<U, U>, Nat> ct, cm;

  const Nat& count_terms(U s, U v) {
    auto key = std::make_pair(s, v);
    auto it = ct.find(key);
    if (it != ct.end()) return it->second;
    Nat n = 0;
    if (s >= 1) {
      n = 1;                 // the constant of value s-1
      if (s == 1) n += v;    // variables
      for (U s1 = 1; s1 + 1 < s; ++s1)
        n += 3 * count_terms(s1, v) * count_terms(s - 1 - s1, v);
    }
    return ct.emplace(key, std::move(n)).first->second;
  }

  // Sum over splits of two term children with total size n.
  Nat term_pairs(U n, U v) {
    Nat sum = 0;
    for (U s1 = 1; s1 < n; ++s1) sum += count_terms(s1, v) * count_terms(n - s1, v);
    return sum;
  }

  const Nat& count_matrices(U s, U v) {
    auto key = std::make_pair(s, v);
    auto it = cm.find(key);
    if (it != cm.end()) return it->second;
    Nat n = 0;
    if (s >= 3) n += 6 * term_pairs(s - 1, v);                       // atoms
    for (U s1 = 1; s1 + 1 < s; ++s1)                                 // and / or
      n += 2 * count_matrices(s1, v) * count_matrices(s - 1 - s1, v);
    for (U sb = 1; sb + 1 < s; ++sb)                                 // bounded E / A
      n += 2 * count_terms(sb, v) * count_matrices(s - 1 - sb, v + 1);
    return cm.emplace(key, std::move(n)).first->second;
  }

  Nat matrix_pairs(U n, U v) {
    Nat sum = 0;
    for (U s1 = 1; s1 < n; ++s1) sum += count_matrices(s1, v) * count_matrices(n - s1, v);
    return sum;
  }

  Nat bounded_pairs(U n, U v) {
    Nat sum = 0;
    for (U sb = 1; sb < n; ++sb) sum += count_terms(sb, v) * count_matrices(n - sb, v + 1);
    return sum;
  }

  Nat count_sentences(U s) {
    Nat n = 0;
    for (U k = 0; k + 3 <= s; ++k) n += (Nat(1) << k) * count_matrices(s - k, k);
    return n;
  }
};

thread_local Counter g_counter;

// Binding environment, outermost first; the within-size order of a variable
// is its binder position (a de Bruijn level).
using Env = std::vector<std::string>;

U var_level(const Env& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == name) return i;
  throw FolError("unbound variable: " + name);
}

// --- ranking ---------------------------------------------------------------

Nat rank_term(Counter& c, const TermPtr& t, const Env& env);

// Rank of an ordered child pair among all splits of total size n.
Nat rank_term_pair(Counter& c, const TermPtr& l, const TermPtr& r, const Env& env) {
  U v = env.size();
  U sl = term_size(l), sr = term_size(r), n = sl + sr;
  Nat off = 0;
  for (U s1 = 1; s1 < sl; ++s1) off += c.count_terms(s1, v) * c.count_terms(n - s1, v);
  return off + rank_term(c, l, env) * c.count_terms(sr, v) + rank_term(c, r, env);
}

Nat rank_term(Counter& c, const TermPtr& t, const Env& env) {
  U v = env.size();
  U s = term_size(t);
  switch (t->kind) {
    case TermKind::Const: return 0;
    case TermKind::Var: return 1 + var_level(env, t->var);
    case TermKind::Add:
    case TermKind::Mul:
    case TermKind::Monus: {
      U j = t->kind == TermKind::Add ? 0 : t->kind == TermKind::Mul ? 1 : 2;
      return 1 + Nat(j) * c.term_pairs(s - 1, v) + rank_term_pair(c, t->lhs, t->rhs, env);
    }
  }
  throw FolError("rank_term: bad kind");
}

Nat rank_matrix(Counter& c, const MatrixPtr& m, Env& env);

Nat rank_matrix_pair(Counter& c, const MatrixPtr& a, const MatrixPtr& b, Env& env) {
  U v = env.size();
  U sa = matrix_size(a), sb = matrix_size(b), n = sa + sb;
  Nat off = 0;
  for (U s1 = 1; s1 < sa; ++s1) off += c.count_matrices(s1, v) * c.count_matrices(n - s1, v);
  return off + rank_matrix(c, a, env) * c.count_matrices(sb, v) + rank_matrix(c, b, env);
}

Nat rank_matrix(Counter& c, const MatrixPtr& m, Env& env) {
  U v = env.size();
  U s = matrix_size(m);
  Nat atoms = s >= 3 ? 6 * c.term_pairs(s - 1, v) : Nat(0);
  Nat pairs = c.matrix_pairs(s - 1, v);
  Nat bpairs = c.bounded_pairs(s - 1, v);
  switch (m->kind) {
    case MatrixKind::Atom:
      return Nat(static_cast<unsigned>(m->op)) * c.term_pairs(s - 1, v) +
             rank_term_pair(c, m->lhs, m->rhs, env);
    case MatrixKind::And: return atoms + rank_matrix_pair(c, m->a, m->b, env);
    case MatrixKind::Or: return atoms + pairs + rank_matrix_pair(c, m->a, m->b, env);
    case MatrixKind::BoundedExists:
    case MatrixKind::BoundedForall: {
      Nat off = atoms + 2 * pairs;
      if (m->kind == MatrixKind::BoundedForall) off += bpairs;
      U sb = term_size(m->bound), n = s - 1;
      for (U s1 = 1; s1 < sb; ++s1)
        off += c.count_terms(s1, v) * c.count_matrices(n - s1, v + 1);
      Nat bound_rank = rank_term(c, m->bound, env);
      env.push_back(m->var);
      Nat body_rank = rank_matrix(c, m->a, env);
      env.pop_back();
      return off + bound_rank * c.count_matrices(n - sb, v + 1) + body_rank;
    }
  }
  throw FolError("rank_matrix: bad kind");
}

Nat rank_sentence(Counter& c, const Sentence& s) {
  U size = sentence_size(s);
  U k = s.prefix.size();
  Nat off = 0;
  for (U k2 = 0; k2 < k; ++k2) off += (Nat(1) << k2) * c.count_matrices(size - k2, k2);
  Nat word = 0;
  Env env;
  for (const auto& [q, v] : s.prefix) {
    word = word * 2 + (q == Quant::Forall ? 1 : 0);
    env.push_back(v);
  }
  return off + word * c.count_matrices(size - k, k) + rank_matrix(c, s.matrix, env);
}

// --- unranking ---------------------------------------------------------------

TermPtr unrank_term(Counter& c, U s, U v, Nat idx);

std::pair<TermPtr, TermPtr> unrank_term_pair(Counter& c, U n, U v, Nat idx) {
  for (U s1 = 1; s1 < n; ++s1) {
    Nat block = c.count_terms(s1, v) * c.count_terms(n - s1, v);
    if (idx < block) {
      Nat right = c.count_terms(n - s1, v);
      return {unrank_term(c, s1, v, idx / right), unrank_term(c, n - s1, v, idx % right)};
    }
    idx -= block;
  }
  throw FolError("unrank_term_pair: index out of range");
}

TermPtr unrank_term(Counter& c, U s, U v, Nat idx) {
  if (idx == 0) return mk_const(s - 1);
  idx -= 1;
  if (s == 1) {
    if (idx < v) return mk_var("v" + idx.get_str());
    throw FolError("unrank_term: index out of range");
  }
  Nat block = c.term_pairs(s - 1, v);
  for (U j = 0; j < 3; ++j) {
    if (idx < block) {
      auto [l, r] = unrank_term_pair(c, s - 1, v, idx);
      TermKind k = j == 0 ? TermKind::Add : j == 1 ? TermKind::Mul : TermKind::Monus;
      return mk_term(k, l, r);
    }
    idx -= block;
  }
  throw FolError("unrank_term: index out of range");
}

MatrixPtr unrank_matrix(Counter& c, U s, U v, Nat idx);

std::pair<MatrixPtr, MatrixPtr> unrank_matrix_pair(Counter& c, U n, U v, Nat idx) {
  for (U s1 = 1; s1 < n; ++s1) {
    Nat block = c.count_matrices(s1, v) * c.count_matrices(n - s1, v);
    if (idx < block) {
      Nat right = c.count_matrices(n - s1, v);
      return {unrank_matrix(c, s1, v, idx / right), unrank_matrix(c, n - s1, v, idx % right)};
    }
    idx -= block;
  }
  throw FolError("unrank_matrix_pair: index out of range");
}

MatrixPtr unrank_matrix(Counter& c, U s, U v, Nat idx) {
  if (s >= 3) {
    Nat per_op = c.term_pairs(s - 1, v);
    if (idx < 6 * per_op) {
      unsigned op = static_cast<unsigned>(mpz_class(idx / per_op).get_ui());
      auto [l, r] = unrank_term_pair(c, s - 1, v, idx % per_op);
      return mk_atom(static_cast<CmpOp>(op), l, r);
    }
    idx -= 6 * per_op;
  }
  Nat pairs = c.matrix_pairs(s - 1, v);
  if (idx < pairs) {
    auto [a, b] = unrank_matrix_pair(c, s - 1, v, idx);
    return mk_and(a, b);
  }
  idx -= pairs;
  if (idx < pairs) {
    auto [a, b] = unrank_matrix_pair(c, s - 1, v, idx);
    return mk_or(a, b);
  }
  idx -= pairs;
  Nat bpairs = c.bounded_pairs(s - 1, v);
  for (int which = 0; which < 2; ++which) {
    if (idx < bpairs) {
      U n = s - 1;
      for (U sb = 1; sb < n; ++sb) {
        Nat block = c.count_terms(sb, v) * c.count_matrices(n - sb, v + 1);
        if (idx < block) {
          Nat right = c.count_matrices(n - sb, v + 1);
          TermPtr bound = unrank_term(c, sb, v, idx / right);
          // The bound variable gets the next canonical index.
          MatrixPtr body = unrank_matrix(c, n - sb, v + 1, idx % right);
          MatrixKind k = which == 0 ? MatrixKind::BoundedExists : MatrixKind::BoundedForall;
          return mk_bounded(k, "v" + std::to_string(v), bound, body);
        }
        idx -= block;
      }
      throw FolError("unrank_matrix: bounded index out of range");
    }
    idx -= bpairs;
  }
  throw FolError("unrank_matrix: index out of range");
}

Sentence unrank_sentence(Counter& c, U size, Nat idx) {
  for (U k = 0; k + 3 <= size; ++k) {
    Nat per_word = c.count_matrices(size - k, k);
    Nat block = (Nat(1) << k) * per_word;
    if (idx < block) {
      Nat word = idx / per_word;
      Sentence s;
      s.prefix.resize(k);
      for (U i = 0; i < k; ++i) {
        bool forall = mpz_tstbit(word.get_mpz_t(), k - 1 - i) != 0;
        s.prefix[i] = {forall ? Quant::Forall : Quant::Exists, "v" + std::to_string(i)};
      }
      s.matrix = unrank_matrix(c, size - k, k, idx % per_word);
      return s;
    }
    idx -= block;
  }
  throw FolError("unrank_sentence: index out of range");
}

}  // namespace

std::uint64_t sentence_size(const Sentence& s) {
  return s.prefix.size() + matrix_size(s.matrix);
}

Nat canonical_code(const Sentence& s) {
  Sentence n = alpha_normalize(s);
  U size = sentence_size(n);
  Counter& c = g_counter;
  Nat code = 0;
  for (U s2 = 3; s2 < size; ++s2) code += c.count_sentences(s2);
  return code + rank_sentence(c, n);
}

Sentence enumerate_sentence(const Nat& code) {
  Counter& c = g_counter;
  Nat idx = code;
  for (U size = 3; size <= kMaxSize; ++size) {
    Nat count = c.count_sentences(size);
    if (idx < count) return alpha_normalize(unrank_sentence(c, size, idx));
    idx -= count;
  }
  throw FolError("enumerate_sentence: code exceeds the enumeration cap");
}

}  // namespace vfm::fol
