#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfm/fol/ast.hpp"
#include "vfm/market/schedule.hpp"
#include "vfm/rational.hpp"
#include "vfm/truth/truth.hpp"

namespace vfm::market {

class MarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised only by internal consistency checks; indicates a bug, not bad input.
class InvariantBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::string kCash = "TOP";
inline const std::string kVoid = "BOT";

// Finite-support holdings keyed by sentence_key, plus the distinguished
// cash (TOP) and void (BOT) keys.
struct Inventory {
  std::map<std::string, Rat> entries;

  Rat get(const std::string& key) const;
  void add(const std::string& key, const Rat& d);
};

// Half-open interval [lo, hi) of an owner's holding, tagged with a label.
struct LabeledPiece {
  Rat lo, hi;
  std::string label;
};

struct LabeledPartition {
  std::vector<LabeledPiece> pieces;
  // Pairwise disjoint and total length equal to `holding`.
  bool valid_for(const Rat& holding) const;
};

LabeledPartition whole_holding(const Rat& holding, const std::string& label);

using PlayerFn = truth::PlayerFn;
using TraderFn = std::function<DemandSchedule(
    std::uint64_t t, const fol::Sentence& s, const Rat& prev_price, const Inventory& own)>;
using LabelerFn = std::function<LabeledPartition(
    std::uint64_t t, const fol::Sentence& s, const Rat& holding)>;

struct AgentSpec {
  std::string id;
  Rat endowment;
  std::uint64_t birthday = 0;
  TraderFn trader;    // null: never trades
  PlayerFn player;    // null: always passes
  LabelerFn labeler;  // null: whole holding under label "*"
};

// One side of a minted share pair.
struct LedgerSide {
  std::string agent;
  std::string label;
  fol::Sentence sentence;
};

// A matched P / not-P pair with $1-per-share escrow.
struct LedgerPair {
  std::uint64_t id;
  Rat quantity;  // > 0; escrow equals quantity
  LedgerSide verifier, falsifier;
};

struct ScriptEntry {
  std::uint64_t t;
  fol::Sentence sentence;  // Delta0
  bool truth;
};

// The monotone revelation process for Delta0 truth.
class EmpiricalReality {
 public:
  // Sentence with canonical code k is revealed at t = k, truth by evaluation.
  static EmpiricalReality arithmetic();
  // Explicit revelation stream; validated monotone and negation-consistent.
  static EmpiricalReality scripted(const std::vector<ScriptEntry>& script);

  // Revealed truth of a Delta0 sentence at time t, nullopt if unrevealed.
  std::optional<bool> truth_at(std::uint64_t t, const fol::Sentence& s) const;

 private:
  EmpiricalReality() = default;
  bool arithmetic_ = true;
  std::map<std::string, std::pair<std::uint64_t, bool>> script_;  // key -> (t, truth)
};

struct AuditEntry {
  std::uint64_t t = 0;
  std::string op;        // endow, cross, mint, move, settle, void, flag
  std::string agent;
  std::string sentence;  // sentence key, or TOP/BOT
  Rat dcash;             // agent cash delta
  Rat dstock;            // agent stock delta at `sentence`
  std::string note;

  std::string to_line() const;
};

struct PricePoint {
  std::uint64_t t;
  Rat price;
};

// True iff the orders respect the owner's holdings (max sell per sentence
// within inventory) and worst-case total cost within cash.
bool budget_check(const std::map<std::string, DemandSchedule>& orders,
                  const Inventory& inv);

// Pointwise sum of per-agent schedules for `key`, dropping every schedule of
// an agent whose full order set fails budget_check.
DemandSchedule aggregate_demand(
    const std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>>& proposals,
    const std::string& key);

struct ExploitReport {
  Rat min, max;
  bool flagged;  // heuristic proxy, not a proof
};

// Flags a cash series that stays at or above `floor` while exceeding `growth`.
ExploitReport detect_exploitation(const std::vector<Rat>& cash, const Rat& floor,
                                  const Rat& growth);

class MarketState {
 public:
  MarketState(std::vector<AgentSpec> roster, std::vector<fol::Sentence> universe,
              EmpiricalReality reality);

  void step();

  std::uint64_t time() const { return t_; }
  const std::vector<AgentSpec>& roster() const { return roster_; }
  const std::vector<LedgerPair>& ledger() const { return ledger_; }
  const std::vector<AuditEntry>& audit() const { return audit_; }
  const Rat& injected() const { return injected_; }

  Rat cash(const std::string& agent) const;
  // Full holdings view: ledger-derived stock plus cash and void.
  Inventory inventory(const std::string& agent) const;

  // Current price of an oriented universe sentence (1/2 before any step).
  Rat price(const fol::Sentence& s) const;
  const std::vector<PricePoint>& history(const fol::Sentence& s) const;
  const std::vector<fol::Sentence>& universe() const { return universe_; }

  // Per-agent cash recorded at the end of every step.
  const std::vector<Rat>& cash_series(const std::string& agent) const;

  std::string price_csv() const;    // t,sentence_code,sentence,price
  std::string ledger_dump() const;  // one pair per line
  std::string audit_log() const;

 private:
  void inject_endowments();
  void settle_revealed();
  void execute_orders(
      const std::vector<std::pair<std::map<std::string, DemandSchedule>, Inventory>>& proposals);
  void apply_sigma_moves();
  void apply_pi_moves();
  void check_invariants() const;

  Rat holding(const std::string& agent, const std::string& key) const;
  void transfer_stock(const std::string& from, const std::string& to,
                      const std::string& key, Rat qty);
  void mint(const std::string& buyerV, const std::string& buyerF,
            const fol::Sentence& s, const Rat& qty);

  std::uint64_t t_ = 0;
  std::uint64_t next_pair_id_ = 0;
  std::vector<AgentSpec> roster_;           // sorted by (birthday, id)
  std::vector<fol::Sentence> universe_;     // oriented, deduped by key
  std::map<std::string, Rat> cash_;
  std::map<std::string, Rat> void_;
  std::vector<LedgerPair> ledger_;
  EmpiricalReality reality_;
  std::map<std::string, Rat> prices_;       // key -> price, complements paired
  std::map<std::string, std::vector<PricePoint>> history_;
  std::map<std::string, std::vector<Rat>> cash_series_;
  std::vector<AuditEntry> audit_;
  Rat injected_ = 0;
};

}  // namespace vfm::market
