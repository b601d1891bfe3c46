#include "heis/kind.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace heis {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Type1: return "type1";
    case Kind::Type2: return "type2";
    case Kind::EuclideanSplit: return "euclidean";
  }
  return "?";
}

std::string to_string(Aspect a) { return a == Aspect::Tall ? "tall" : "wide"; }

Kind parse_kind(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "type1" || lower == "1") return Kind::Type1;
  if (lower == "type2" || lower == "2") return Kind::Type2;
  if (lower == "euclidean" || lower == "euclidean_split" || lower == "euclideansplit") {
    return Kind::EuclideanSplit;
  }
  throw std::invalid_argument("unknown rectangle kind '" + std::string(s) + "'");
}

}  // namespace heis
