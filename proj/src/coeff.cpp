#include "blinfty/coeff.hpp"

#include <algorithm>
#include <stdexcept>

namespace blinfty {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  bool slash = false, digit = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      digit = true;
    } else if (ch == '/' && !slash && digit) {
      slash = true;
      digit = false;
    } else {
      throw std::invalid_argument("not a rational number: '" + text + "'");
    }
  }
  if (!digit) throw std::invalid_argument("not a rational number: '" + text + "'");
  std::string body = text[0] == '+' ? text.substr(1) : text;
  Rational r;
  if (r.set_str(body, 10) != 0) throw std::invalid_argument("not a rational number: '" + text + "'");
  if (slash && r.get_den() == 0) throw std::invalid_argument("zero denominator");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

void Monomial::trim() {
  while (!weights.empty() && weights.back() == 0) weights.pop_back();
  while (!group.empty() && group.back() == 0) group.pop_back();
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.energy = energy + o.energy;
  r.weights.assign(std::max(weights.size(), o.weights.size()), 0);
  for (std::size_t i = 0; i < weights.size(); ++i) r.weights[i] += weights[i];
  for (std::size_t i = 0; i < o.weights.size(); ++i) r.weights[i] += o.weights[i];
  r.group.assign(std::max(group.size(), o.group.size()), 0);
  for (std::size_t i = 0; i < group.size(); ++i) r.group[i] += group[i];
  for (std::size_t i = 0; i < o.group.size(); ++i) r.group[i] += o.group[i];
  r.trim();
  return r;
}

int Monomial::total_weight() const {
  int s = 0;
  for (int w : weights) s += w;
  return s;
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.weights != b.weights) return a.weights < b.weights;
  return a.group < b.group;
}

std::string Monomial::str() const {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += ' ';
  };
  if (energy != 0) {
    sep();
    out += "T^" + to_string(energy);
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0) continue;
    sep();
    out += "t" + std::to_string(i + 1);
    if (weights[i] != 1) out += "^" + std::to_string(weights[i]);
  }
  if (!group.empty()) {
    sep();
    out += "G^(";
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(group[i]);
    }
    out += ')';
  }
  return out;
}

Coeff::Coeff(const Rational& r) {
  if (r != 0) terms_.emplace(Monomial{}, r);
}

Coeff Coeff::monomial(const Rational& c, Monomial m) {
  Coeff out;
  m.trim();
  if (c != 0) out.terms_.emplace(std::move(m), c);
  return out;
}

bool Coeff::is_scalar() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

Rational Coeff::scalar() const {
  if (!is_scalar()) throw std::logic_error("coefficient is not a rational scalar: " + str());
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

Rational Coeff::at_unit() const {
  Rational s = 0;
  for (const auto& [m, c] : terms_) s += c;
  return s;
}

void Coeff::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Coeff& Coeff::operator+=(const Coeff& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Coeff& Coeff::operator-=(const Coeff& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Coeff operator*(const Coeff& a, const Coeff& b) {
  Coeff out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Coeff& Coeff::operator*=(const Coeff& o) { return *this = *this * o; }

Coeff Coeff::operator-() const {
  Coeff out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Coeff Coeff::filter(bool (*keep)(const Monomial&, const void*), const void* ctx) const {
  Coeff out;
  for (const auto& [m, c] : terms_)
    if (keep(m, ctx)) out.terms_.emplace(m, c);
  return out;
}

std::string Coeff::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    std::string ms = m.str();
    if (ms.empty()) {
      out += to_string(c);
    } else {
      if (c != 1) out += to_string(c) + " ";
      out += ms;
    }
  }
  return out;
}

Rational CoeffRing::filtration(const Monomial& m) const {
  Rational f = m.energy;
  for (std::size_t i = 0; i < m.group.size() && i < pairing.size(); ++i) f += pairing[i] * m.group[i];
  return f;
}

bool CoeffRing::keeps(const Monomial& m) const {
  if (order && filtration(m) > *order) return false;
  if (!weight_cap.empty()) {
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      int cap = i < weight_cap.size() ? weight_cap[i] : 0;
      if (m.weights[i] > cap) return false;
    }
  }
  return true;
}

std::size_t CoeffRing::truncate(Coeff& c) const {
  if (!order && weight_cap.empty()) return 0;
  std::size_t before = c.terms().size();
  c = c.filter([](const Monomial& m, const void* ctx) { return static_cast<const CoeffRing*>(ctx)->keeps(m); },
               this);
  return before - c.terms().size();
}

}  // namespace blinfty
