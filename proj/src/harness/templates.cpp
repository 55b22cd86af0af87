#include "vfm/harness/templates.hpp"

#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "vfm/fol/parser.hpp"
#include "vfm/truth/truth.hpp"

namespace vfm::harness {

using fol::Move;
using fol::Sentence;
using market::AgentSpec;
using market::DemandSchedule;
using market::Inventory;
using market::kCash;

std::uint64_t FuelPolicy::at(std::uint64_t t) const {
  const std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t base = t == kMax ? kMax : t + 1;
  std::uint64_t out = c;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (base != 0 && out > kMax / base) return kMax;
    out *= base;
  }
  return out;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// "{1,2,3}" as a witness move; "pass" / "diverge" handled by the caller.
Move parse_move(const std::string& text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}')
    throw ConfigError("bad move in player spec: " + text);
  std::vector<std::uint64_t> ns;
  std::size_t pos = 1;
  while (pos < text.size() - 1) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos || next > text.size() - 1) next = text.size() - 1;
    std::string item = strip(text.substr(pos, next - pos));
    try {
      std::size_t used = 0;
      std::uint64_t n = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      ns.push_back(n);
    } catch (const std::exception&) {
      throw ConfigError("bad witness in player spec: " + item);
    }
    pos = next + 1;
  }
  if (ns.empty()) throw ConfigError("empty witness set in player spec");
  return Move::witnesses(std::move(ns));
}

enum class DefaultKind { Pass, Diverge, Successor, Constant };

struct SpecRule {
  Sentence pattern;
  bool diverge = false;
  Move move = Move::pass();
};

}  // namespace

game::InstaPlayer parse_player_spec(const std::string& spec) {
  auto rules = std::make_shared<std::vector<SpecRule>>();
  DefaultKind dflt = DefaultKind::Pass;
  Move dflt_move = Move::pass();

  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t next = spec.find(';', pos);
    if (next == std::string::npos) next = spec.size();
    std::string item = strip(spec.substr(pos, next - pos));
    pos = next + 1;
    if (item.empty()) continue;

    std::size_t arrow = item.find("->");
    if (arrow != std::string::npos) {
      SpecRule rule;
      std::string lhs = strip(item.substr(0, arrow));
      std::string rhs = strip(item.substr(arrow + 2));
      try {
        rule.pattern = fol::parse_sentence(lhs);
      } catch (const fol::FolError& e) {
        throw ConfigError("bad pattern in player spec: " + std::string(e.what()));
      }
      if (rhs == "pass") rule.move = Move::pass();
      else if (rhs == "diverge") rule.diverge = true;
      else rule.move = parse_move(rhs);
      rules->push_back(std::move(rule));
    } else if (item == "pass") {
      dflt = DefaultKind::Pass;
    } else if (item == "diverge") {
      dflt = DefaultKind::Diverge;
    } else if (item == "successor") {
      dflt = DefaultKind::Successor;
    } else {
      dflt = DefaultKind::Constant;
      dflt_move = parse_move(item);
    }
  }

  return game::InstaPlayer([rules, dflt, dflt_move](const Sentence& s) -> game::InstaPlayer::Answer {
    for (const SpecRule& r : *rules) {
      if (!fol::alpha_equal(r.pattern, s)) continue;
      if (r.diverge) return std::nullopt;
      return std::make_pair(r.move, std::uint64_t{1});
    }
    switch (dflt) {
      case DefaultKind::Pass: return std::make_pair(Move::pass(), std::uint64_t{1});
      case DefaultKind::Diverge: return std::nullopt;
      case DefaultKind::Successor:
        if (s.prefix.empty()) return std::make_pair(Move::pass(), std::uint64_t{1});
        return std::make_pair(Move::witnesses({fol::max_constant(s) + 1}), std::uint64_t{1});
      case DefaultKind::Constant: return std::make_pair(dflt_move, std::uint64_t{1});
    }
    return std::nullopt;
  });
}

namespace {

// Quotes are rounded down to 1/4096 shares. Cash positions pick up fill
// denominators every step; quoting them back verbatim would compound the
// digit count geometrically, while a fixed grid keeps it linear.
Rat quantize(const Rat& q) {
  const long kScale = 4096;
  if (q <= 0) return Rat(0);
  return Rat(Nat(q.get_num() * kScale / q.get_den())) / kScale;
}

// Demand as much as cash covers below `limit`, on the quote grid; the
// budget gate holds since the worst cost is at most limit * (cash / limit).
DemandSchedule all_in_buy(const Rat& limit, const Rat& cash) {
  if (limit <= 0 || cash <= 0) return DemandSchedule();
  return DemandSchedule::buy_below(limit, quantize(cash / limit));
}

}  // namespace

AgentSpec threshold_buyer(std::string id, Rat endowment, std::uint64_t birthday,
                          const Sentence& s, const Rat& limit,
                          const game::InstaPlayer& alpha) {
  if (limit <= 0 || limit > 1) throw ConfigError("threshold-buyer limit must be in (0,1]");
  AgentSpec spec;
  spec.id = std::move(id);
  spec.endowment = std::move(endowment);
  spec.birthday = birthday;
  std::string key = fol::sentence_key(s);
  spec.trader = [key, limit](std::uint64_t, const Sentence& sent, const Rat&,
                             const Inventory& own) {
    if (fol::sentence_key(sent) != key) return DemandSchedule();
    return all_in_buy(limit, own.get(kCash));
  };
  spec.player = truth::construct_player(alpha);
  return spec;
}

AgentSpec arbitrageur(std::string id, Rat endowment, std::uint64_t birthday,
                      const Sentence& s, const Rat& x, const Rat& eps) {
  if (eps <= 0 || x - eps <= 0 || x + eps >= 1)
    throw ConfigError("arbitrageur band must sit strictly inside (0,1)");
  AgentSpec spec;
  spec.id = std::move(id);
  spec.endowment = std::move(endowment);
  spec.birthday = birthday;
  std::string key_p = fol::sentence_key(s);
  std::string key_n = fol::sentence_key(fol::negate(s));
  spec.trader = [key_p, key_n, x, eps](std::uint64_t, const Sentence& sent, const Rat&,
                                       const Inventory& own) {
    std::string k = fol::sentence_key(sent);
    Rat mid;
    if (k == key_p) mid = x;
    else if (k == key_n) mid = 1 - x;
    else return DemandSchedule();
    Rat lo = mid - eps, hi = mid + eps;
    // both orientations buy every step, so each side gets half the cash
    Rat cap = own.get(kCash) / (2 * lo);
    Rat buy_qty = quantize(cap < 1 ? cap : Rat(1));
    Rat held = own.get(k);
    Rat sell_qty = quantize(held < 1 ? held : Rat(1));
    return DemandSchedule::buy_below(lo, buy_qty) + DemandSchedule::sell_above(hi, sell_qty);
  };
  return spec;
}

AgentSpec passive_holder(std::string id, Rat endowment, std::uint64_t birthday,
                         const Sentence& s, const Rat& quantity) {
  if (quantity <= 0) throw ConfigError("passive-holder quantity must be positive");
  AgentSpec spec;
  spec.id = std::move(id);
  spec.endowment = std::move(endowment);
  spec.birthday = birthday;
  std::string key = fol::sentence_key(s);
  spec.trader = [key, quantity, birthday](std::uint64_t t, const Sentence& sent, const Rat&,
                                          const Inventory&) {
    if (t != birthday || fol::sentence_key(sent) != key) return DemandSchedule();
    return DemandSchedule::buy_below(Rat(1), quantity);
  };
  return spec;
}

AgentSpec adversary(std::string id, Rat endowment, std::uint64_t birthday,
                    const Sentence& s, const Rat& limit,
                    const game::InstaPlayer& challenge, FuelPolicy fuel) {
  if (limit <= 0 || limit > 1) throw ConfigError("adversary limit must be in (0,1]");
  AgentSpec spec;
  spec.id = std::move(id);
  spec.endowment = std::move(endowment);
  spec.birthday = birthday;
  std::string key = fol::sentence_key(s);
  spec.trader = [key, limit](std::uint64_t, const Sentence& sent, const Rat&,
                             const Inventory& own) {
    if (fol::sentence_key(sent) != key) return DemandSchedule();
    return all_in_buy(limit, own.get(kCash));
  };
  spec.player = [challenge, fuel](std::uint64_t t, const Sentence& sent,
                                  const std::string&) {
    if (sent.prefix.empty()) return Move::pass();
    std::optional<Move> m = challenge.query(sent, fuel.at(t));
    return m ? *m : Move::pass();
  };
  return spec;
}

AgentSpec oscillator(std::string id, Rat endowment, std::uint64_t birthday,
                     const Sentence& s, const Rat& limit, const Rat& quantity) {
  if (limit <= 0 || limit > 1) throw ConfigError("oscillator limit must be in (0,1]");
  if (quantity <= 0) throw ConfigError("oscillator quantity must be positive");
  AgentSpec spec;
  spec.id = std::move(id);
  spec.endowment = std::move(endowment);
  spec.birthday = birthday;
  std::string key_p = fol::sentence_key(s);
  std::string key_n = fol::sentence_key(fol::negate(s));
  spec.trader = [key_p, key_n, limit, quantity](std::uint64_t t, const Sentence& sent,
                                                const Rat&, const Inventory&) {
    std::string want = (t % 2 == 0) ? key_p : key_n;
    if (fol::sentence_key(sent) != want) return DemandSchedule();
    return DemandSchedule::buy_below(limit, quantity);
  };
  return spec;
}

}  // namespace vfm::harness
