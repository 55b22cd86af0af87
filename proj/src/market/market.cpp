#include "vfm/market/market.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "vfm/fol/enumeration.hpp"

namespace vfm::market {

using fol::Move;
using fol::Sentence;

namespace {

std::string key_of(const Sentence& s) { return fol::sentence_key(s); }

Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

}  // namespace

// ---------------------------------------------------------------------------
// Inventory and partitions.

Rat Inventory::get(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? Rat(0) : it->second;
}

void Inventory::add(const std::string& key, const Rat& d) {
  Rat v = get(key) + d;
  if (v == 0 && key != kCash) entries.erase(key);
  else entries[key] = v;
}

bool LabeledPartition::valid_for(const Rat& holding) const {
  std::vector<LabeledPiece> sorted = pieces;
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledPiece& a, const LabeledPiece& b) { return a.lo < b.lo; });
  Rat total = 0;
  Rat prev_hi = 0;
  bool first = true;
  for (const auto& pc : sorted) {
    if (pc.lo >= pc.hi || pc.lo < 0) return false;
    if (!first && pc.lo < prev_hi) return false;
    total += pc.hi - pc.lo;
    prev_hi = pc.hi;
    first = false;
  }
  return total == holding;
}

LabeledPartition whole_holding(const Rat& holding, const std::string& label) {
  LabeledPartition p;
  if (holding > 0) p.pieces.push_back({Rat(0), holding, label});
  return p;
}

// ---------------------------------------------------------------------------
// Empirical reality.

EmpiricalReality EmpiricalReality::arithmetic() {
  EmpiricalReality r;
  r.arithmetic_ = true;
  return r;
}

EmpiricalReality EmpiricalReality::scripted(const std::vector<ScriptEntry>& script) {
  EmpiricalReality r;
  r.arithmetic_ = false;
  for (const auto& e : script) {
    if (!fol::is_delta0(e.sentence))
      throw MarketError("scripted reality may only reveal Delta0 sentences");
    std::string k = key_of(e.sentence);
    std::string nk = key_of(fol::negate(e.sentence));
    auto ins = r.script_.emplace(k, std::make_pair(e.t, e.truth));
    if (!ins.second && ins.first->second != std::make_pair(e.t, e.truth))
      throw MarketError("scripted reality is inconsistent at: " + k);
    auto insn = r.script_.emplace(nk, std::make_pair(e.t, !e.truth));
    if (!insn.second && insn.first->second != std::make_pair(e.t, !e.truth))
      throw MarketError("scripted reality is negation-inconsistent at: " + k);
  }
  return r;
}

std::optional<bool> EmpiricalReality::truth_at(std::uint64_t t, const Sentence& s) const {
  if (!fol::is_delta0(s)) return std::nullopt;
  if (arithmetic_) {
    Nat c = fol::canonical_code(s);
    Nat cn = fol::canonical_code(fol::negate(s));
    if (cn < c) c = cn;
    if (c <= t) return fol::eval_delta0(s);
    return std::nullopt;
  }
  auto it = script_.find(key_of(s));
  if (it == script_.end() || t < it->second.first) return std::nullopt;
  return it->second.second;
}

// ---------------------------------------------------------------------------
// Free operations.

std::string AuditEntry::to_line() const {
  std::ostringstream out;
  out << "t=" << t << " op=" << op << " agent=" << agent
      << " sentence=" << sentence << " dcash=" << rat_to_string(dcash)
      << " dstock=" << rat_to_string(dstock);
  if (!note.empty()) out << " note=" << note;
  return out.str();
}

bool budget_check(const std::map<std::string, DemandSchedule>& orders,
                  const Inventory& inv) {
  Rat cost = 0;
  for (const auto& [key, sched] : orders) {
    if (sched.max_sell() > inv.get(key)) return false;
    cost += sched.worst_cost();
  }
  return cost <= inv.get(kCash);
}

DemandSchedule aggregate_demand(
    const std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>>& proposals,
    const std::string& key) {
  DemandSchedule sum;
  for (const auto& [orders, inv] : proposals) {
    if (!budget_check(orders, inv)) continue;
    auto it = orders.find(key);
    if (it != orders.end()) sum = sum + it->second;
  }
  return sum;
}

ExploitReport detect_exploitation(const std::vector<Rat>& cash, const Rat& floor,
                                  const Rat& growth) {
  ExploitReport r{cash.front(), cash.front(), false};
  for (const Rat& v : cash) {
    r.min = rat_min(r.min, v);
    r.max = rat_max(r.max, v);
  }
  r.flagged = r.min >= floor && r.max > growth;
  return r;
}

// ---------------------------------------------------------------------------
// MarketState.

MarketState::MarketState(std::vector<AgentSpec> roster, std::vector<Sentence> universe,
                         EmpiricalReality reality)
    : roster_(std::move(roster)), reality_(std::move(reality)) {
  std::stable_sort(roster_.begin(), roster_.end(),
                   [](const AgentSpec& a, const AgentSpec& b) {
                     return a.birthday != b.birthday ? a.birthday < b.birthday
                                                     : a.id < b.id;
                   });
  std::set<std::string> ids;
  for (const auto& a : roster_) {
    if (!ids.insert(a.id).second) throw MarketError("duplicate agent id: " + a.id);
    if (a.endowment < 0) throw MarketError("negative endowment: " + a.id);
    cash_[a.id] = 0;
  }
  std::set<std::string> seen;
  for (const auto& s : universe) {
    std::string k = key_of(s);
    if (seen.count(k) || seen.count(key_of(fol::negate(s)))) continue;
    seen.insert(k);
    universe_.push_back(s);
    prices_[k] = Rat(1, 2);
    prices_[key_of(fol::negate(s))] = Rat(1, 2);
  }
}

Rat MarketState::cash(const std::string& agent) const {
  auto it = cash_.find(agent);
  if (it == cash_.end()) throw MarketError("unknown agent: " + agent);
  return it->second;
}

Rat MarketState::holding(const std::string& agent, const std::string& key) const {
  Rat h = 0;
  for (const auto& pr : ledger_) {
    if (pr.verifier.agent == agent && key_of(pr.verifier.sentence) == key) h += pr.quantity;
    if (pr.falsifier.agent == agent && key_of(pr.falsifier.sentence) == key) h += pr.quantity;
  }
  return h;
}

Inventory MarketState::inventory(const std::string& agent) const {
  Inventory inv;
  inv.entries[kCash] = cash(agent);
  auto v = void_.find(agent);
  if (v != void_.end() && v->second != 0) inv.entries[kVoid] = v->second;
  for (const auto& pr : ledger_) {
    if (pr.verifier.agent == agent) inv.add(key_of(pr.verifier.sentence), pr.quantity);
    if (pr.falsifier.agent == agent) inv.add(key_of(pr.falsifier.sentence), pr.quantity);
  }
  return inv;
}

Rat MarketState::price(const Sentence& s) const {
  auto it = prices_.find(key_of(s));
  if (it == prices_.end()) throw MarketError("unpriced sentence: " + fol::print(s));
  return it->second;
}

const std::vector<PricePoint>& MarketState::history(const Sentence& s) const {
  static const std::vector<PricePoint> empty;
  auto it = history_.find(key_of(s));
  return it == history_.end() ? empty : it->second;
}

const std::vector<Rat>& MarketState::cash_series(const std::string& agent) const {
  static const std::vector<Rat> empty;
  auto it = cash_series_.find(agent);
  return it == cash_series_.end() ? empty : it->second;
}

void MarketState::inject_endowments() {
  for (const auto& a : roster_) {
    if (a.birthday != t_ || a.endowment == 0) continue;
    cash_[a.id] += a.endowment;
    injected_ += a.endowment;
    audit_.push_back({t_, "endow", a.id, kCash, a.endowment, Rat(0), ""});
  }
}

void MarketState::settle_revealed() {
  std::vector<LedgerPair> keep;
  keep.reserve(ledger_.size());
  for (const auto& pr : ledger_) {
    std::optional<bool> tv = reality_.truth_at(t_, pr.verifier.sentence);
    if (!tv) {
      keep.push_back(pr);
      continue;
    }
    const LedgerSide& winner = *tv ? pr.verifier : pr.falsifier;
    const LedgerSide& loser = *tv ? pr.falsifier : pr.verifier;
    cash_[winner.agent] += pr.quantity;
    void_[loser.agent] += pr.quantity;
    audit_.push_back({t_, "settle", winner.agent, key_of(winner.sentence), pr.quantity,
                      -pr.quantity, "escrow payout"});
    audit_.push_back({t_, "settle", loser.agent, key_of(loser.sentence), Rat(0),
                      -pr.quantity, ""});
    audit_.push_back({t_, "void", loser.agent, kVoid, Rat(0), pr.quantity, ""});
  }
  ledger_ = std::move(keep);
}

void MarketState::mint(const std::string& buyerV, const std::string& buyerF,
                       const Sentence& s, const Rat& qty) {
  ledger_.push_back({next_pair_id_++, qty,
                     {buyerV, "*", s},
                     {buyerF, "*", fol::negate(s)}});
}

void MarketState::transfer_stock(const std::string& from, const std::string& to,
                                 const std::string& key, Rat qty) {
  for (std::size_t i = 0; i < ledger_.size() && qty > 0; ++i) {
    LedgerPair& pr = ledger_[i];
    LedgerSide* side = nullptr;
    if (pr.verifier.agent == from && key_of(pr.verifier.sentence) == key)
      side = &pr.verifier;
    else if (pr.falsifier.agent == from && key_of(pr.falsifier.sentence) == key)
      side = &pr.falsifier;
    if (!side) continue;
    Rat take = rat_min(pr.quantity, qty);
    if (take == pr.quantity) {
      side->agent = to;
      side->label = "*";
    } else {
      pr.quantity -= take;
      LedgerPair split = pr;  // copies both sides
      split.id = next_pair_id_++;
      split.quantity = take;
      bool v = side == &pr.verifier;
      ledger_.push_back(split);
      LedgerSide& moved = v ? ledger_.back().verifier : ledger_.back().falsifier;
      moved.agent = to;
      moved.label = "*";
    }
    qty -= take;
  }
  if (qty > 0) throw InvariantBreach("transfer exceeds holding: " + from + " " + key);
}

void MarketState::execute_orders(
    const std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>>& proposals) {
  for (const Sentence& P : universe_) {
    std::string kP = key_of(P);
    std::string kN = key_of(fol::negate(P));
    Rat p = prices_.at(kP);

    struct Ord {
      std::size_t idx;
      Rat qty;  // filled/residual bookkeeping
    };
    auto collect = [&](const std::string& k, const Rat& at, std::vector<Ord>& buys,
                       std::vector<Ord>& sells) {
      for (std::size_t i = 0; i < proposals.size(); ++i) {
        auto it = proposals[i].first.find(k);
        if (it == proposals[i].first.end()) continue;
        Rat q = it->second.value(at);
        if (q > 0) buys.push_back({i, q});
        else if (q < 0) sells.push_back({i, -q});
      }
    };

    // Cross buys against sells of one orientation at price `at`; returns the
    // residual (unmatched) buys.
    auto cross = [&](const std::string& k, const Rat& at, std::vector<Ord> buys,
                     std::vector<Ord> sells) -> std::vector<Ord> {
      Rat B = 0, S = 0;
      for (const auto& o : buys) B += o.qty;
      for (const auto& o : sells) S += o.qty;
      Rat X = rat_min(B, S);
      if (X > 0) {
        for (const auto& b : buys) {
          Rat fill = b.qty * X / B;
          for (const auto& s : sells) {
            Rat q = fill * s.qty / S;
            if (q == 0) continue;
            const std::string& ba = roster_[b.idx].id;
            const std::string& sa = roster_[s.idx].id;
            cash_[ba] -= at * q;
            cash_[sa] += at * q;
            transfer_stock(sa, ba, k, q);
            audit_.push_back({t_, "cross", ba, k, -(at * q), q, ""});
            audit_.push_back({t_, "cross", sa, k, at * q, -q, ""});
          }
        }
        for (auto& b : buys) b.qty -= b.qty * X / B;
      }
      std::vector<Ord> residual;
      for (const auto& b : buys)
        if (b.qty > 0) residual.push_back(b);
      return residual;
    };

    std::vector<Ord> buyP, sellP, buyN, sellN;
    collect(kP, p, buyP, sellP);
    collect(kN, 1 - p, buyN, sellN);
    std::vector<Ord> resP = cross(kP, p, buyP, sellP);
    std::vector<Ord> resN = cross(kN, 1 - p, buyN, sellN);

    Rat RP = 0, RN = 0;
    for (const auto& o : resP) RP += o.qty;
    for (const auto& o : resN) RN += o.qty;
    Rat M = rat_min(RP, RN);
    if (M > 0) {
      for (const auto& bp : resP) {
        for (const auto& bn : resN) {
          Rat q = bp.qty * bn.qty * M / (RP * RN);
          if (q == 0) continue;
          const std::string& va = roster_[bp.idx].id;
          const std::string& fa = roster_[bn.idx].id;
          cash_[va] -= p * q;
          cash_[fa] -= (1 - p) * q;
          mint(va, fa, P, q);
          audit_.push_back({t_, "mint", va, kP, -(p * q), q, ""});
          audit_.push_back({t_, "mint", fa, kN, -((1 - p) * q), q, ""});
        }
      }
    }
  }
}

void MarketState::apply_sigma_moves() {
  for (const auto& a : roster_) {
    if (!a.player) continue;
    // Sigma-classified holdings of this agent, keyed for stable order.
    std::map<std::string, Sentence> sigma;
    for (const auto& pr : ledger_) {
      for (const LedgerSide* side : {&pr.verifier, &pr.falsifier}) {
        if (side->agent != a.id) continue;
        if (fol::classify(side->sentence).kind != fol::ClassKind::Sigma) continue;
        sigma.emplace(key_of(side->sentence), side->sentence);
      }
    }
    for (const auto& [k, rep] : sigma) {
      Rat h = holding(a.id, k);
      LabeledPartition part =
          a.labeler ? a.labeler(t_, rep, h) : whole_holding(h, "*");
      if (!part.valid_for(h)) {
        audit_.push_back({t_, "flag", a.id, k, Rat(0), Rat(0),
                          "labeler partition mismatch, moves skipped"});
        continue;
      }
      std::vector<LabeledPiece> pieces = part.pieces;
      std::sort(pieces.begin(), pieces.end(),
                [](const LabeledPiece& x, const LabeledPiece& y) { return x.lo < y.lo; });

      // Plan cuts against the current layout, then apply; pieces are
      // disjoint, so each ledger unit is cut at most once.
      struct Cut {
        std::size_t idx;
        bool v_side;
        Rat take;
        Move move;
        std::string label;
      };
      std::vector<Cut> cuts;
      for (const auto& pc : pieces) {
        Move m = a.player(t_, rep, pc.label);
        if (m.is_pass()) continue;
        Rat pos = 0;
        for (std::size_t i = 0; i < ledger_.size(); ++i) {
          const LedgerPair& pr = ledger_[i];
          bool v_side;
          if (pr.verifier.agent == a.id && key_of(pr.verifier.sentence) == k)
            v_side = true;
          else if (pr.falsifier.agent == a.id && key_of(pr.falsifier.sentence) == k)
            v_side = false;
          else
            continue;
          Rat lo = rat_max(pos, pc.lo), hi = rat_min(pos + pr.quantity, pc.hi);
          pos += pr.quantity;
          if (lo < hi) cuts.push_back({i, v_side, hi - lo, m, pc.label});
        }
      }
      for (const auto& c : cuts) {
        LedgerPair& pr = ledger_[c.idx];
        LedgerSide& mine = c.v_side ? pr.verifier : pr.falsifier;
        LedgerSide& other = c.v_side ? pr.falsifier : pr.verifier;
        Sentence played = fol::play_set(mine.sentence, c.move);
        Sentence dual = fol::negate(played);
        std::string old_mine = key_of(mine.sentence);
        std::string old_other = key_of(other.sentence);
        audit_.push_back({t_, "move", mine.agent, old_mine, Rat(0), -c.take,
                          "label " + c.label + " move " + c.move.to_string()});
        audit_.push_back({t_, "move", mine.agent, key_of(played), Rat(0), c.take, ""});
        audit_.push_back({t_, "move", other.agent, old_other, Rat(0), -c.take, "counterpart"});
        audit_.push_back({t_, "move", other.agent, key_of(dual), Rat(0), c.take, ""});
        if (c.take == pr.quantity) {
          mine.sentence = played;
          mine.label = c.label;
          other.sentence = dual;
        } else {
          pr.quantity -= c.take;
          LedgerPair split = pr;
          split.id = next_pair_id_++;
          split.quantity = c.take;
          (c.v_side ? split.verifier : split.falsifier).sentence = played;
          (c.v_side ? split.verifier : split.falsifier).label = c.label;
          (c.v_side ? split.falsifier : split.verifier).sentence = dual;
          ledger_.push_back(split);
        }
      }
    }
  }
}

void MarketState::apply_pi_moves() {
  // Pi-side transformations happen through the counterpart sync above; this
  // pass audits the duality it must have preserved.
  for (const auto& pr : ledger_) {
    if (!fol::alpha_equal(pr.falsifier.sentence, fol::negate(pr.verifier.sentence)))
      throw InvariantBreach("ledger pair " + std::to_string(pr.id) +
                            " lost negation duality");
  }
}

void MarketState::check_invariants() const {
  Rat total = 0;
  for (const auto& [id, c] : cash_) {
    if (c < 0) throw InvariantBreach("negative cash: " + id);
    total += c;
  }
  for (const auto& pr : ledger_) {
    if (pr.quantity <= 0) throw InvariantBreach("non-positive pair quantity");
    total += pr.quantity;
  }
  if (total != injected_)
    throw InvariantBreach("conservation breach: cash+escrow " + rat_to_string(total) +
                          " != injected " + rat_to_string(injected_));
  for (const auto& [k, p] : prices_) {
    if (p < 0 || p > 1) throw InvariantBreach("price out of range for " + k);
  }
}

void MarketState::step() {
  inject_endowments();
  settle_revealed();

  // Per-agent proposed orders against pre-trade inventories.
  std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>> proposals;
  proposals.reserve(roster_.size());
  for (const auto& a : roster_) {
    std::map<std::string, DemandSchedule> orders;
    Inventory inv = inventory(a.id);
    if (a.birthday <= t_ && a.trader) {
      for (const Sentence& P : universe_) {
        const Sentence N = fol::negate(P);
        for (const Sentence* s : {&P, &N}) {
          std::string k = key_of(*s);
          DemandSchedule d = a.trader(t_, *s, prices_.at(k), inv);
          if (!d.is_zero()) orders[k] = d;
        }
      }
    }
    if (!orders.empty() && !budget_check(orders, inv)) {
      audit_.push_back({t_, "flag", a.id, "", Rat(0), Rat(0),
                        "budget check failed, orders dropped"});
      orders.clear();
    }
    proposals.push_back({std::move(orders), std::move(inv)});
  }

  // Equilibrium prices, then trades at those prices.
  for (const Sentence& P : universe_) {
    std::string kP = key_of(P);
    std::string kN = key_of(fol::negate(P));
    DemandSchedule dP = aggregate_demand(proposals, kP);
    DemandSchedule dN = aggregate_demand(proposals, kN);
    Rat p = equilibrium_price(dP, dN, prices_.at(kP));
    prices_[kP] = p;
    prices_[kN] = 1 - p;
  }
  execute_orders(proposals);
  apply_sigma_moves();
  apply_pi_moves();

  for (const Sentence& P : universe_) {
    std::string kP = key_of(P);
    std::string kN = key_of(fol::negate(P));
    history_[kP].push_back({t_, prices_.at(kP)});
    history_[kN].push_back({t_, prices_.at(kN)});
  }
  for (const auto& a : roster_) cash_series_[a.id].push_back(cash_.at(a.id));
  ++t_;
  check_invariants();
}

std::string MarketState::price_csv() const {
  std::ostringstream out;
  out << "t,sentence_code,sentence,price\n";
  if (universe_.empty()) return out.str();
  std::size_t steps = history_.at(key_of(universe_.front())).size();
  for (std::size_t i = 0; i < steps; ++i) {
    for (const Sentence& P : universe_) {
      const PricePoint& pt = history_.at(key_of(P))[i];
      out << pt.t << "," << fol::canonical_code(P).get_str() << ","
          << fol::print(P) << "," << rat_to_string(pt.price) << "\n";
    }
  }
  return out.str();
}

std::string MarketState::ledger_dump() const {
  std::ostringstream out;
  for (const auto& pr : ledger_) {
    out << "pair=" << pr.id << " qty=" << rat_to_string(pr.quantity)
        << " escrow=" << rat_to_string(pr.quantity)
        << " v_agent=" << pr.verifier.agent << " v_label=" << pr.verifier.label
        << " v_sentence=" << fol::print(pr.verifier.sentence)
        << " f_agent=" << pr.falsifier.agent << " f_label=" << pr.falsifier.label
        << " f_sentence=" << fol::print(pr.falsifier.sentence) << "\n";
  }
  return out.str();
}

std::string MarketState::audit_log() const {
  std::ostringstream out;
  for (const auto& e : audit_) out << e.to_line() << "\n";
  return out.str();
}

}  // namespace vfm::market
