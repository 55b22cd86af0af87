#include "vfm/market/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace vfm::market {

namespace {

void normalize(std::vector<SchedulePiece>& pieces) {
  // merge adjacent pieces with equal qty
  std::vector<SchedulePiece> out;
  for (const auto& pc : pieces) {
    if (!out.empty() && out.back().qty == pc.qty) {
      out.back().upper = pc.upper;
    } else {
      out.push_back(pc);
    }
  }
  pieces = std::move(out);
}

}  // namespace

DemandSchedule::DemandSchedule() : pieces_{{Rat(1), Rat(0)}} {}

DemandSchedule DemandSchedule::buy_below(const Rat& limit, const Rat& qty) {
  if (limit <= 0 || qty == 0) return DemandSchedule();
  if (limit >= 1) return from_pieces({{Rat(1), qty}});
  return from_pieces({{limit, qty}, {Rat(1), Rat(0)}});
}

DemandSchedule DemandSchedule::sell_above(const Rat& limit, const Rat& qty) {
  if (limit >= 1 || qty == 0) return DemandSchedule();
  if (limit <= 0) return from_pieces({{Rat(1), -qty}});
  return from_pieces({{limit, Rat(0)}, {Rat(1), -qty}});
}

DemandSchedule DemandSchedule::from_pieces(std::vector<SchedulePiece> pieces) {
  if (pieces.empty() || pieces.back().upper != 1)
    throw std::invalid_argument("schedule must end at price 1");
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (pieces[i].upper >= pieces[i + 1].upper)
      throw std::invalid_argument("schedule uppers must ascend");
    if (pieces[i].qty < pieces[i + 1].qty)
      throw std::invalid_argument("schedule must be non-increasing");
  }
  if (pieces.front().upper <= 0) throw std::invalid_argument("schedule uppers must be positive");
  normalize(pieces);
  DemandSchedule s;
  s.pieces_ = std::move(pieces);
  return s;
}

Rat DemandSchedule::value(const Rat& p) const {
  for (const auto& pc : pieces_)
    if (p <= pc.upper) return pc.qty;
  return pieces_.back().qty;
}

bool DemandSchedule::is_zero() const {
  return pieces_.size() == 1 && pieces_[0].qty == 0;
}

Rat DemandSchedule::max_sell() const {
  Rat last = pieces_.back().qty;
  return last < 0 ? Rat(-last) : Rat(0);
}

Rat DemandSchedule::worst_cost() const {
  Rat best(0);
  for (const auto& pc : pieces_) {
    if (pc.qty > 0) {
      Rat c = pc.upper * pc.qty;
      if (c > best) best = c;
    }
  }
  return best;
}

DemandSchedule operator+(const DemandSchedule& a, const DemandSchedule& b) {
  std::vector<SchedulePiece> out;
  std::size_t i = 0, j = 0;
  while (i < a.pieces_.size() && j < b.pieces_.size()) {
    const Rat& ua = a.pieces_[i].upper;
    const Rat& ub = b.pieces_[j].upper;
    Rat u = ua < ub ? ua : ub;
    out.push_back({u, a.pieces_[i].qty + b.pieces_[j].qty});
    if (ua <= u) ++i;
    if (ub <= u) ++j;
  }
  normalize(out);
  DemandSchedule s;
  s.pieces_ = std::move(out);
  return s;
}

Rat equilibrium_price(const DemandSchedule& dP, const DemandSchedule& dNotP,
                      const Rat& previous) {
  auto f = [&](const Rat& p) -> Rat { return dP.value(p) - dNotP.value(1 - p); };

  std::vector<Rat> cands = {Rat(0), Rat(1)};
  for (const auto& pc : dP.pieces()) cands.push_back(pc.upper);
  for (const auto& pc : dNotP.pieces()) cands.push_back(1 - pc.upper);
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  cands.erase(std::remove_if(cands.begin(), cands.end(),
                             [](const Rat& p) { return p < 0 || p > 1; }),
              cands.end());

  // Evaluation sites: each candidate point, and the open interval between
  // neighbours (represented by inf/sup; f is constant there).
  struct Site {
    Rat inf, sup;
    int sign;
  };
  std::vector<Site> sites;
  auto push = [&](const Rat& inf, const Rat& sup, const Rat& at) {
    Rat v = f(at);
    sites.push_back({inf, sup, v > 0 ? 1 : v < 0 ? -1 : 0});
  };
  for (std::size_t i = 0; i < cands.size(); ++i) {
    push(cands[i], cands[i], cands[i]);
    if (i + 1 < cands.size())
      push(cands[i], cands[i + 1], (cands[i] + cands[i + 1]) / 2);
  }

  bool any_zero = false, all_zero = true;
  for (const auto& s : sites) {
    if (s.sign == 0) any_zero = true;
    else all_zero = false;
  }
  if (all_zero) return previous;
  if (any_zero) {
    Rat lo, hi;
    bool first = true;
    for (const auto& s : sites) {
      if (s.sign != 0) continue;
      if (first) { lo = s.inf; first = false; }
      hi = s.sup;
    }
    return (lo + hi) / 2;
  }
  // No zero: constant sign or a jump across zero at a candidate point.
  if (sites.front().sign < 0) return Rat(0);
  if (sites.back().sign > 0) return Rat(1);
  for (std::size_t i = 0; i + 1 < sites.size(); ++i) {
    if (sites[i].sign > 0 && sites[i + 1].sign < 0) {
      // one of the two adjacent sites is a candidate point
      return sites[i].inf == sites[i].sup ? sites[i].inf : sites[i + 1].inf;
    }
  }
  return previous;  // unreachable for monotone f
}

}  // namespace vfm::market
