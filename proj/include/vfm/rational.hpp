#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace vfm {

// All quantities, prices and interval endpoints are exact rationals.
using Rat = mpq_class;
using Nat = mpz_class;

// Canonical form "num/den" (den omitted when 1), e.g. "11/20", "3".
std::string rat_to_string(const Rat& r);

// Parses "a", "a/b" or "-a/b"; nullopt on malformed input or zero denominator.
std::optional<Rat> rat_from_string(const std::string& text);

}  // namespace vfm
