#include "blinfty/linalg.hpp"

namespace blinfty {

namespace {

IntVec integral(const RatVec& v, mpz_class& scale) {
  scale = 1;
  for (const auto& [i, r] : v) scale = lcm(scale, mpz_class(r.get_den()));
  IntVec out;
  for (const auto& [i, r] : v) {
    if (r == 0) continue;
    mpz_class x = r.get_num() * (scale / r.get_den());
    out.emplace(i, x);
  }
  return out;
}

void axpy(IntVec& v, const mpz_class& a, const IntVec& r, const mpz_class& b) {
  // v <- a*v - b*r
  if (a != 1)
    for (auto& [i, x] : v) x *= a;
  for (const auto& [i, y] : r) {
    auto it = v.find(i);
    if (it == v.end()) {
      v.emplace(i, -b * y);
    } else {
      it->second -= b * y;
      if (it->second == 0) v.erase(it);
    }
  }
}

void divide_content(IntVec& v, IntVec& combo, mpz_class* target_scale) {
  mpz_class g = 0;
  for (const auto& [i, x] : v) g = gcd(g, x);
  for (const auto& [i, x] : combo) g = gcd(g, x);
  if (target_scale) g = gcd(g, *target_scale);
  if (g <= 1) return;
  for (auto& [i, x] : v) x /= g;
  for (auto& [i, x] : combo) x /= g;
  if (target_scale) *target_scale /= g;
}

}  // namespace

void Echelon::reduce(IntVec& v, IntVec& combo, mpz_class* target_scale) const {
  auto it = v.begin();
  while (it != v.end()) {
    auto row = rows_.find(it->first);
    if (row == rows_.end()) {
      ++it;
      continue;
    }
    std::size_t pivot = it->first;
    mpz_class a = row->second.v.begin()->second;
    mpz_class b = it->second;
    mpz_class g = gcd(a, b);
    a /= g;
    b /= g;
    axpy(v, a, row->second.v, b);
    axpy(combo, a, row->second.combo, b);
    if (target_scale) *target_scale *= a;
    divide_content(v, combo, target_scale);
    it = v.upper_bound(pivot);
  }
}

std::optional<RatVec> Echelon::insert(const RatVec& v, std::size_t id) {
  mpz_class scale;
  IntVec iv = integral(v, scale);
  IntVec combo{{id, scale}};
  reduce(iv, combo, nullptr);
  if (iv.empty()) {
    RatVec kernel;
    for (const auto& [j, x] : combo) kernel.emplace(j, Rational(x));
    return kernel;
  }
  if (iv.begin()->second < 0) {
    for (auto& [i, x] : iv) x = -x;
    for (auto& [i, x] : combo) x = -x;
  }
  std::size_t pivot = iv.begin()->first;
  rows_.emplace(pivot, Row{std::move(iv), std::move(combo)});
  return std::nullopt;
}

std::optional<RatVec> Echelon::solve(const RatVec& target) const {
  mpz_class scale;
  IntVec t = integral(target, scale);
  IntVec combo;
  mpz_class alpha = 1;  // t == alpha*scale*target + sum combo_j v_j
  reduce(t, combo, &alpha);
  if (!t.empty()) return std::nullopt;
  RatVec out;
  mpz_class denom = alpha * scale;
  for (const auto& [j, x] : combo) {
    Rational c(-x, denom);
    c.canonicalize();
    out.emplace(j, c);
  }
  return out;
}

bool Echelon::contains(const RatVec& v) const { return solve(v).has_value(); }

}  // namespace blinfty
