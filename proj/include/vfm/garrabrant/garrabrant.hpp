#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfm/market/schedule.hpp"
#include "vfm/rational.hpp"

namespace vfm::garrabrant {

class GarrabrantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Boolean combinations over opaque prime sentences P1, P2, ...
enum class PKind { Atom, Not, And, Or };

struct PropSentence;
using PropPtr = std::shared_ptr<const PropSentence>;

struct PropSentence {
  PKind kind;
  int atom = 0;  // Atom: 1-based prime index
  PropPtr a, b;
};

PropPtr p_atom(int index);
PropPtr p_not(PropPtr a);
PropPtr p_and(PropPtr a, PropPtr b);
PropPtr p_or(PropPtr a, PropPtr b);

// Grammar: atoms P1..Pn, '!', '&', '|', parentheses; '!' binds tightest,
// then '&', then '|'.
PropPtr parse_prop(const std::string& text);
std::string print_prop(const PropPtr& s);

// A world is a total truth assignment on primes, encoded as a bitmask where
// bit i-1 carries the value of Pi.
using World = std::uint32_t;

bool eval_world(const PropPtr& s, World w);

// Finite-support holdings: cash at face value plus stock per sentence.
struct GInventory {
  Rat cash;
  std::vector<std::pair<PropPtr, Rat>> stock;  // deduped by printed form

  void add(const PropPtr& s, const Rat& qty);
  Rat get(const PropPtr& s) const;
};

GInventory operator+(const GInventory& a, const GInventory& b);

// All valuations w . inv over worlds on the mentioned primes that satisfy
// every theorem; sorted, deduplicated. Throws past 20 mentioned primes.
std::vector<Rat> pc_valuations(const GInventory& inv,
                               const std::vector<PropPtr>& thms);

struct GAgent {
  std::string id;
  Rat endowment;
  std::uint64_t birthday = 0;
  GInventory inv;
};

// One step of the inventory algorithm for one agent: credit a birthday
// endowment, convert proven stock to cash (and refuted stock to nothing),
// then accept `trade` iff the worst-case post-trade valuation stays >= 0.
// Returns whether the trade was accepted.
bool g_inventory_step(GAgent& agent, std::uint64_t t, const GInventory& trade,
                      const std::vector<PropPtr>& thms);

// Same contract as market::equilibrium_price, for schedules on s vs not-s.
Rat g_equilibrium(const market::DemandSchedule& ds,
                  const market::DemandSchedule& dnots, const Rat& previous);

// Theorem stream: lines `t <tab> formula`. Returns (t, theorem) sorted by t.
std::vector<std::pair<std::uint64_t, PropPtr>> parse_theorem_stream(
    const std::string& text);

}  // namespace vfm::garrabrant
