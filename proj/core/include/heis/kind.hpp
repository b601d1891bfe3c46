#pragma once

#include <string>
#include <string_view>

namespace heis {

enum class Kind { Type1, Type2, EuclideanSplit };

/// Which of the two aspect regimes a radius pair falls in. On r1 == r2 both
/// regimes give the same values, so either may be used.
enum class Aspect { Tall /* r1 <= r2 */, Wide /* r1 >= r2 */ };

std::string to_string(Kind k);
std::string to_string(Aspect a);

/// Accepts "type1", "type2", "euclidean" (also "euclidean_split"), any case.
Kind parse_kind(std::string_view s);

inline Aspect aspect_of(double r1, double r2) noexcept {
  return r1 <= r2 ? Aspect::Tall : Aspect::Wide;
}

}  // namespace heis
