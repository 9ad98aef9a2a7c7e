#pragma once

#include "dnp/types.hpp"

namespace dnp {

struct DcBalanced {
  Word transmitted = 0;
  bool inverted = false;
  int disparity = 0;  // running (ones - zeros) after this word
};

// Invert the word when its own imbalance would push the running disparity
// further in the direction it already leans. Keeps |disparity| <= 32.
DcBalanced dc_balance_encode(Word w, int disparity);

inline Word dc_balance_decode(Word transmitted, bool inverted) {
  return inverted ? ~transmitted : transmitted;
}

// Stateful transmitter side, one per link direction.
class DcBalancer {
 public:
  DcBalanced encode(Word w) {
    auto r = dc_balance_encode(w, disparity_);
    disparity_ = r.disparity;
    return r;
  }
  int disparity() const { return disparity_; }

 private:
  int disparity_ = 0;
};

}  // namespace dnp
