#include "vfm/garrabrant/garrabrant.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace vfm::garrabrant {

PropPtr p_atom(int index) {
  if (index < 1) throw GarrabrantError("prime index must be >= 1");
  auto s = std::make_shared<PropSentence>();
  s->kind = PKind::Atom;
  s->atom = index;
  return s;
}

PropPtr p_not(PropPtr a) {
  auto s = std::make_shared<PropSentence>();
  s->kind = PKind::Not;
  s->a = std::move(a);
  return s;
}

PropPtr p_and(PropPtr a, PropPtr b) {
  auto s = std::make_shared<PropSentence>();
  s->kind = PKind::And;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

PropPtr p_or(PropPtr a, PropPtr b) {
  auto s = std::make_shared<PropSentence>();
  s->kind = PKind::Or;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

namespace {

struct PropParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit PropParser(const std::string& t) : text(t) {}

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw GarrabrantError(what + " at offset " + std::to_string(pos));
  }

  PropPtr or_expr() {
    PropPtr l = and_expr();
    while (eat('|')) l = p_or(l, and_expr());
    return l;
  }

  PropPtr and_expr() {
    PropPtr l = unary();
    while (eat('&')) l = p_and(l, unary());
    return l;
  }

  PropPtr unary() {
    if (eat('!')) return p_not(unary());
    if (eat('(')) {
      PropPtr e = or_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    skip();
    if (pos < text.size() && text[pos] == 'P') {
      ++pos;
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start) fail("expected prime index after 'P'");
      return p_atom(std::stoi(text.substr(start, pos - start)));
    }
    fail("expected atom, '!' or '('");
  }
};

void collect_primes(const PropPtr& s, std::set<int>& out) {
  switch (s->kind) {
    case PKind::Atom: out.insert(s->atom); return;
    case PKind::Not: collect_primes(s->a, out); return;
    default:
      collect_primes(s->a, out);
      collect_primes(s->b, out);
  }
}

}  // namespace

PropPtr parse_prop(const std::string& text) {
  PropParser p(text);
  PropPtr e = p.or_expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

std::string print_prop(const PropPtr& s) {
  switch (s->kind) {
    case PKind::Atom: return "P" + std::to_string(s->atom);
    case PKind::Not: return "!" + print_prop(s->a);
    case PKind::And: return "(" + print_prop(s->a) + " & " + print_prop(s->b) + ")";
    default: return "(" + print_prop(s->a) + " | " + print_prop(s->b) + ")";
  }
}

bool eval_world(const PropPtr& s, World w) {
  switch (s->kind) {
    case PKind::Atom:
      if (s->atom > 32) throw GarrabrantError("prime index beyond world width");
      return (w >> (s->atom - 1)) & 1;
    case PKind::Not: return !eval_world(s->a, w);
    case PKind::And: return eval_world(s->a, w) && eval_world(s->b, w);
    default: return eval_world(s->a, w) || eval_world(s->b, w);
  }
}

void GInventory::add(const PropPtr& s, const Rat& qty) {
  std::string k = print_prop(s);
  for (auto& [stk, q] : stock) {
    if (print_prop(stk) == k) {
      q += qty;
      return;
    }
  }
  stock.emplace_back(s, qty);
}

Rat GInventory::get(const PropPtr& s) const {
  std::string k = print_prop(s);
  for (const auto& [stk, q] : stock)
    if (print_prop(stk) == k) return q;
  return Rat(0);
}

GInventory operator+(const GInventory& a, const GInventory& b) {
  GInventory out = a;
  out.cash += b.cash;
  for (const auto& [s, q] : b.stock) out.add(s, q);
  return out;
}

std::vector<Rat> pc_valuations(const GInventory& inv,
                               const std::vector<PropPtr>& thms) {
  std::set<int> primes;
  for (const auto& [s, q] : inv.stock) collect_primes(s, primes);
  for (const auto& t : thms) collect_primes(t, primes);
  if (primes.size() > 20) throw GarrabrantError("more than 20 primes mentioned");

  // Remap mentioned primes onto the low bits of a compact world.
  std::vector<int> idx(primes.begin(), primes.end());
  auto expand = [&](World compact) -> World {
    World w = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      if ((compact >> i) & 1) w |= World(1) << (idx[i] - 1);
    return w;
  };

  std::set<Rat> vals;
  World count = World(1) << idx.size();
  for (World c = 0; c < count; ++c) {
    World w = expand(c);
    bool ok = true;
    for (const auto& t : thms)
      if (!eval_world(t, w)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Rat v = inv.cash;
    for (const auto& [s, q] : inv.stock)
      if (eval_world(s, w)) v += q;
    vals.insert(v);
  }
  return {vals.begin(), vals.end()};
}

namespace {

// thms entail s iff no satisfying world falsifies s.
bool entailed(const PropPtr& s, const std::vector<PropPtr>& thms) {
  std::set<int> primes;
  collect_primes(s, primes);
  for (const auto& t : thms) collect_primes(t, primes);
  if (primes.size() > 20) throw GarrabrantError("more than 20 primes mentioned");
  std::vector<int> idx(primes.begin(), primes.end());
  World count = World(1) << idx.size();
  for (World c = 0; c < count; ++c) {
    World w = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      if ((c >> i) & 1) w |= World(1) << (idx[i] - 1);
    bool sat = true;
    for (const auto& t : thms)
      if (!eval_world(t, w)) {
        sat = false;
        break;
      }
    if (sat && !eval_world(s, w)) return false;
  }
  return true;
}

}  // namespace

bool g_inventory_step(GAgent& agent, std::uint64_t t, const GInventory& trade,
                      const std::vector<PropPtr>& thms) {
  if (agent.birthday == t) agent.inv.cash += agent.endowment;

  // resolve proven sentences; refuted stock is worthless in every PC world
  std::vector<std::pair<PropPtr, Rat>> keep;
  for (const auto& [s, q] : agent.inv.stock) {
    if (q == 0) continue;
    if (entailed(s, thms)) {
      agent.inv.cash += q;
    } else if (!entailed(p_not(s), thms)) {
      keep.emplace_back(s, q);
    }
  }
  agent.inv.stock = std::move(keep);

  if (trade.cash == 0 && trade.stock.empty()) return false;
  GInventory after = agent.inv + trade;
  std::vector<Rat> vals = pc_valuations(after, thms);
  if (vals.empty() || vals.front() < 0) return false;
  agent.inv = std::move(after);
  return true;
}

Rat g_equilibrium(const market::DemandSchedule& ds,
                  const market::DemandSchedule& dnots, const Rat& previous) {
  return market::equilibrium_price(ds, dnots, previous);
}

std::vector<std::pair<std::uint64_t, PropPtr>> parse_theorem_stream(
    const std::string& text) {
  std::vector<std::pair<std::uint64_t, PropPtr>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw GarrabrantError("theorem stream line missing tab: " + line);
    std::uint64_t t = std::stoull(line.substr(0, tab));
    out.emplace_back(t, parse_prop(line.substr(tab + 1)));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace vfm::garrabrant
