#include "dnp/dc_balance.hpp"

#include <bit>

namespace dnp {

DcBalanced dc_balance_encode(Word w, int disparity) {
  const int delta = 2 * std::popcount(w) - 32;
  const bool same_sign = (delta > 0 && disparity > 0) || (delta < 0 && disparity < 0);
  if (disparity != 0 && same_sign) {
    return {~w, true, disparity - delta};
  }
  return {w, false, disparity + delta};
}

}  // namespace dnp
