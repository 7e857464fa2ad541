#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>

#include "blinfty/coeff.hpp"

namespace blinfty {

using RatVec = std::map<std::size_t, Rational>;
using IntVec = std::map<std::size_t, mpz_class>;

// Incremental fraction-free row echelon form over Z.  Every stored row keeps
// the integer combination of inserted vectors that produced it, so kernels
// and solutions come back as explicit combinations.  Pivots are the smallest
// nonzero index, which makes all results independent of insertion timing.
class Echelon {
 public:
  // Returns std::nullopt when v is independent of the rows so far, otherwise a
  // nonzero combination c with sum_j c[j] * v_j = 0 (c[id] != 0).
  std::optional<RatVec> insert(const RatVec& v, std::size_t id);
  // Coefficients c with sum_j c[j] * v_j = target, if target lies in the span.
  std::optional<RatVec> solve(const RatVec& target) const;
  bool contains(const RatVec& v) const;
  std::size_t rank() const { return rows_.size(); }

 private:
  struct Row {
    IntVec v;
    IntVec combo;
  };
  void reduce(IntVec& v, IntVec& combo, mpz_class* target_scale) const;
  std::map<std::size_t, Row> rows_;
};

}  // namespace blinfty
