#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace blinfty {

using Rational = mpq_class;

Rational parse_rational(const std::string& text);  // "3", "-1/2"; throws std::invalid_argument
std::string to_string(const Rational& r);

// T^energy * t^weights * G^group.  Trailing zeros of weights/group are trimmed
// so that equal monomials compare equal regardless of declared rank.
struct Monomial {
  Rational energy;
  std::vector<int> weights;
  std::vector<long> group;

  bool is_unit() const { return energy == 0 && weights.empty() && group.empty(); }
  void trim();
  Monomial operator*(const Monomial& other) const;
  int total_weight() const;
  std::string str() const;  // "" for the unit, otherwise e.g. "T^3/2 t1 t2^2 G^(1,-1)"

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.energy == b.energy && a.weights == b.weights && a.group == b.group;
  }
  friend bool operator<(const Monomial& a, const Monomial& b);
};

// A finite sum of rational multiples of monomials.  Rational scalars are the
// special case of a single unit monomial.  Zero coefficients are never stored.
class Coeff {
 public:
  using Terms = std::map<Monomial, Rational>;

  Coeff() = default;
  Coeff(const Rational& r);  // NOLINT: implicit on purpose
  Coeff(long r) : Coeff(Rational(r)) {}
  static Coeff monomial(const Rational& c, Monomial m);

  bool is_zero() const { return terms_.empty(); }
  bool is_scalar() const;
  Rational scalar() const;  // throws std::logic_error unless is_scalar()
  Rational at_unit() const;  // specialization T = 1, t_i = 1, G = 1
  const Terms& terms() const { return terms_; }

  Coeff& operator+=(const Coeff& o);
  Coeff& operator-=(const Coeff& o);
  Coeff& operator*=(const Coeff& o);
  Coeff operator-() const;
  friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
  friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
  friend Coeff operator*(const Coeff& a, const Coeff& b);
  friend bool operator==(const Coeff& a, const Coeff& b) { return a.terms_ == b.terms_; }

  void add_term(const Monomial& m, const Rational& c);
  Coeff filter(bool (*keep)(const Monomial&, const void*), const void* ctx) const;

  std::string str() const;

 private:
  Terms terms_;
};

// Truncation data for filtered coefficient rings.  Filtration of a monomial is
// its energy plus the declared pairing applied to the group exponent.  Terms
// with filtration above `order` or weights above `weight_cap` are dropped.
struct CoeffRing {
  std::optional<Rational> order;
  std::vector<Rational> pairing;
  std::vector<int> weight_cap;

  Rational filtration(const Monomial& m) const;
  bool keeps(const Monomial& m) const;
  // Removes terms outside the window; returns how many monomials were dropped.
  std::size_t truncate(Coeff& c) const;
};

}  // namespace blinfty
