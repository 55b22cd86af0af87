#pragma once

#include <vector>

#include "vfm/rational.hpp"

namespace vfm::market {

// One step of a demand curve: the quantity demanded at prices up to `upper`.
struct SchedulePiece {
  Rat upper;
  Rat qty;
};

// A non-increasing, piecewise-constant map from price in [0,1] to net demand
// (negative = supply). Pieces have strictly ascending uppers ending at 1;
// value(p) is the qty of the first piece with p <= upper.
class DemandSchedule {
 public:
  DemandSchedule();  // identically zero

  // qty shares demanded at any price <= limit, zero above.
  static DemandSchedule buy_below(const Rat& limit, const Rat& qty);
  // qty shares offered at any price > limit, zero at or below.
  static DemandSchedule sell_above(const Rat& limit, const Rat& qty);
  // Validates monotonicity and the piece layout.
  static DemandSchedule from_pieces(std::vector<SchedulePiece> pieces);

  Rat value(const Rat& p) const;
  const std::vector<SchedulePiece>& pieces() const { return pieces_; }
  bool is_zero() const;

  Rat max_sell() const;    // max over p of -value(p), never negative
  Rat worst_cost() const;  // max over p of p * value(p), never negative

  friend DemandSchedule operator+(const DemandSchedule& a, const DemandSchedule& b);

 private:
  std::vector<SchedulePiece> pieces_;
};

// Solves dP(p) = dNotP(1-p) for p in [0,1]. With f(p) = dP(p) - dNotP(1-p),
// non-increasing: the midpoint of the zero set when f has zeros, the jump
// point at a sign change, `previous` when f is identically zero, and the
// boundary when f has constant sign.
Rat equilibrium_price(const DemandSchedule& dP, const DemandSchedule& dNotP,
                      const Rat& previous);

}  // namespace vfm::market
