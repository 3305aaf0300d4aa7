#pragma once

// Session metrics from bit-set algebra over a small key universe, as
// unreduced fractions.

#include <bitset>
#include <cstdint>
#include <numeric>

namespace oracle {

using KeySet = std::bitset<16>;

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 0;  // 0 means the undefined 0/0 case
};

struct Metrics {
  std::int64_t tp = 0, fp = 0, fn = 0;
  Fraction precision, recall, f1;
};

/// precision = |A∩G| / |O|, recall = |A∩G| / |G|, F1 = 2·tp / (2·tp + fp + fn), with fp = |O∖G|.
inline Metrics metrics(KeySet applied, KeySet offered, KeySet gold) {
  Metrics m;
  m.tp = static_cast<std::int64_t>((applied & gold).count());
  m.fp = static_cast<std::int64_t>((offered & ~gold).count());
  m.fn = static_cast<std::int64_t>((gold & ~applied).count());
  m.precision = {m.tp, m.tp + m.fp};
  m.recall = {m.tp, m.tp + m.fn};
  m.f1 = {2 * m.tp, 2 * m.tp + m.fp + m.fn};
  return m;
}

/// Same value as `f` and in lowest terms with a positive denominator; 0/0 must read 0/1.
inline bool same_value_lowest_terms(std::int64_t num, std::int64_t den, const Fraction& f) {
  if (den <= 0 || std::gcd(num, den) != 1) return false;
  if (f.den == 0) return num == 0 && den == 1;
  return num * f.den == f.num * den;
}

}  // namespace oracle
