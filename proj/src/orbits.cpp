#include "blinfty/orbits.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "blinfty/linalg.hpp"

namespace blinfty {

namespace {

long floor_of(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q.get_si();
}

int mod2(const Rational& r) {
  if (r.get_den() != 1) return 0;  // fractional CZ: parity taken from the integer part is meaningless; treat even
  mpz_class n = r.get_num();
  return mpz_odd_p(n.get_mpz_t()) ? 1 : 0;
}

}  // namespace

int MorseData::step() const {
  for (const auto& e : differential) return points[e.to].index - points[e.from].index;
  return 0;
}

void MorseData::validate() const {
  if (complex_dim < 0) throw GeometryError("complex dimension must be non-negative");
  std::set<std::string> names;
  int minima = 0;
  for (const auto& p : points) {
    if (!names.insert(p.name).second) throw GeometryError("duplicate critical point '" + p.name + "'");
    if (p.index < 0 || p.index > 2 * complex_dim)
      throw GeometryError("critical point '" + p.name + "' has index outside 0.." + std::to_string(2 * complex_dim));
    if (p.value <= 0 || p.value >= 1) throw GeometryError("critical value of '" + p.name + "' must lie in (0,1)");
    if (p.index == 0) ++minima;
  }
  if (!points.empty() && minima != 1) throw GeometryError("Morse function must have a unique minimum");
  for (const auto& p : points)
    for (const auto& q : points)
      if ((p.value > q.value) != (p.index > q.index))
        throw GeometryError("Morse function is not self-indexing at '" + p.name + "', '" + q.name + "'");
  int s = step();
  for (const auto& e : differential) {
    if (e.from >= points.size() || e.to >= points.size()) throw GeometryError("differential entry out of range");
    int d = points[e.to].index - points[e.from].index;
    if ((d != 1 && d != -1) || d != s)
      throw GeometryError("differential entry " + points[e.from].name + " -> " + points[e.to].name +
                          " does not change the index by a uniform ±1");
  }
}

MorseHomology morse_homology(const MorseData& m) {
  m.validate();
  const std::size_t np = m.points.size();
  std::vector<std::map<std::size_t, long>> d(np);
  for (const auto& e : m.differential) d[e.from][e.to] += e.coefficient;
  for (std::size_t i = 0; i < np; ++i) {
    std::map<std::size_t, long> sq;
    for (const auto& [j, a] : d[i])
      for (const auto& [l, b] : d[j]) sq[l] += a * b;
    for (const auto& [l, v] : sq)
      if (v != 0)
        throw GeometryError("Morse differential does not square to zero: d∘d(" + m.points[i].name + ") hits " +
                            m.points[l].name);
  }
  const int top = 2 * m.complex_dim;
  MorseHomology h;
  h.dims.assign(top + 1, 0);
  std::vector<std::size_t> rank_out(top + 1, 0), count(top + 1, 0);
  for (int idx = 0; idx <= top; ++idx) {
    Echelon e;
    for (std::size_t i = 0; i < np; ++i) {
      if (m.points[i].index != idx) continue;
      ++count[idx];
      RatVec col;
      for (const auto& [j, a] : d[i])
        if (a) col[j] = a;
      e.insert(col, i);
    }
    rank_out[idx] = e.rank();
  }
  int s = m.step();
  for (int idx = 0; idx <= top; ++idx) {
    std::size_t rank_in = 0;
    int src = idx - s;
    if (s != 0 && src >= 0 && src <= top) rank_in = rank_out[src];
    h.dims[idx] = count[idx] - rank_out[idx] - rank_in;
  }
  return h;
}

bool OrbitRecord::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::vector<Generator> OrbitSpectrum::generators() const {
  std::vector<Generator> out;
  for (const auto& o : orbits) {
    Generator g;
    g.name = o.name;
    g.cz = o.cz;
    g.q = *o.cz + sft_n - 3;
    g.z2 = mod2(*g.q);
    g.action = *o.period;
    g.label = o.label;
    g.flags = o.flags;
    out.push_back(std::move(g));
  }
  return out;
}

std::string OrbitSpectrum::dsl() const {
  std::string out = "[generators]\n";
  for (const auto& g : generators()) {
    out += g.name + " z2=" + std::to_string(g.z2) + " q=" + to_string(*g.q) + " action=" + to_string(g.action) +
           " cz=" + to_string(*g.cz);
    if (!g.label.empty()) {
      out += " label=";
      for (std::size_t i = 0; i < g.label.size(); ++i) out += (i ? "," : "") + std::to_string(g.label[i]);
    }
    if (!g.flags.empty()) {
      out += " flags=";
      for (std::size_t i = 0; i < g.flags.size(); ++i) out += (i ? "," : "") + g.flags[i];
    }
    out += "\n";
  }
  return out;
}

OrbitSpectrum product_boundary_spectrum(const MorseData& m, const Rational& D) {
  m.validate();
  if (D > 2) throw GeometryError("period bound above 2 needs the multiple covers; the spectrum would be incomplete");
  OrbitSpectrum s;
  s.sft_n = m.complex_dim + 1;
  s.threshold = D;
  for (const auto& p : m.points) {
    Rational period = 1 / p.value;
    if (period >= D) continue;
    OrbitRecord o;
    o.name = "gamma_" + p.name;
    o.cz = Rational(m.complex_dim - p.index + 2);
    o.period = period;
    o.label = {1};
    s.orbits.push_back(std::move(o));
  }
  return s;
}

OrbitSpectrum handle_spectrum(int n, const Rational& D, const Rational& tau) {
  if (n < 2) throw GeometryError("handle spectrum needs n ≥ 2");
  if (tau <= 0) throw GeometryError("handle orbit period must be positive");
  OrbitSpectrum s;
  s.sft_n = n + 1;
  s.threshold = D;
  long k0 = floor_of(D / tau);
  if (k0 <= 0) {
    s.warnings.push_back("period bound below the simple handle period: empty spectrum");
    return s;
  }
  for (long k = 1; k <= k0; ++k)
    for (int i = 1; i <= n; ++i) {
      OrbitRecord o;
      o.name = "h" + std::to_string(i) + "_" + std::to_string(k);
      o.cz = Rational(n - 1 + 2 * (k - 1) * n + 2 * i);
      o.period = tau * k;
      o.flags = {"handle"};
      s.orbits.push_back(std::move(o));
    }
  return s;
}

OrbitSpectrum spinal_spectrum(const OrbitSpectrum& base, int k, const Rational& D) {
  if (k < 1) throw GeometryError("number of paper regions must be at least 1");
  if (D > base.threshold) throw GeometryError("period bound exceeds the base spectrum's threshold");
  OrbitSpectrum s;
  s.sft_n = base.sft_n;
  s.threshold = D;
  for (const auto& b : base.orbits) {
    if (!(*b.period < D)) continue;
    OrbitRecord hat = b;
    hat.name = b.name + "_hat";
    hat.cz = *b.cz + 1;
    hat.flags = {"spine"};
    s.orbits.push_back(hat);
    for (int i = 1; i < k; ++i) {
      OrbitRecord check = b;
      check.name = b.name + "_chk" + std::to_string(i);
      check.flags = {"spine"};
      s.orbits.push_back(check);
    }
  }
  for (int j = 1; j <= k; ++j) {
    OrbitRecord paper;
    paper.name = "paper" + std::to_string(j);
    paper.label.assign(k, 0);
    paper.label[j - 1] = 1;
    paper.flags = {"paper"};
    s.symbolic.push_back(std::move(paper));
  }
  return s;
}

VdimResult vdim(const ConfigurationQuery& q) {
  if (q.plus.empty()) throw GeometryError("no nonconstant curve without positive punctures");
  if (q.genus < 0) throw GeometryError("genus must be non-negative");
  long sp = static_cast<long>(q.plus.size()), sm = static_cast<long>(q.minus.size());
  VdimResult r;
  r.value = Rational((q.n - 3) * (2 - 2 * q.genus - sp - sm)) - 1;
  for (const auto& c : q.plus) r.value += c;
  for (const auto& c : q.minus) r.value -= c;
  if (q.point_constraint) r.value -= Rational(2 * q.n - 3 - q.constraint_dim);
  if (sp == 1 && sm == 1 && q.genus == 0 && !q.point_constraint && q.plus[0] == q.minus[0]) {
    bool named = !q.plus_names.empty() && !q.minus_names.empty();
    r.trivial_cylinder = !named || q.plus_names[0] == q.minus_names[0];
  }
  return r;
}

CertificateResult certify_lower_bound(const OrbitSpectrum& spinal, int regions, int m, const Rational& D,
                                      std::optional<Rational> cz_hypothesis) {
  if (D > spinal.threshold) throw GeometryError("period bound exceeds the spectrum threshold");
  if (m < 0) throw GeometryError("candidate torsion must be non-negative");
  CertificateResult r;
  r.regions = regions;
  r.m = m;
  std::vector<std::size_t> spine;
  for (std::size_t i = 0; i < spinal.orbits.size(); ++i) {
    const auto& o = spinal.orbits[i];
    if (!o.has_flag("spine")) continue;
    spine.push_back(i);
    if (cz_hypothesis && !(*o.cz < *cz_hypothesis))
      r.hypothesis_violations.push_back(o.name + " has CZ " + to_string(*o.cz) + " ≥ " + to_string(*cz_hypothesis));
  }
  const std::size_t max_size = static_cast<std::size_t>(m) + 1;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t, const Rational&)> grow = [&](std::size_t from, const Rational& period) {
    if (!cur.empty()) {
      ConfigurationQuery q;
      q.n = spinal.sft_n;
      for (std::size_t i : cur) q.plus.push_back(*spinal.orbits[i].cz);
      Configuration c{cur, period, vdim(q).value};
      if (c.vdim >= 0 && !r.counterexample) r.counterexample = c;
      r.configurations.push_back(std::move(c));
    }
    if (cur.size() == max_size) return;
    for (std::size_t j = from; j < spine.size(); ++j) {
      Rational next = period + *spinal.orbits[spine[j]].period;
      if (!(next < D)) continue;
      cur.push_back(spine[j]);
      grow(j, next);
      cur.pop_back();
    }
  };
  grow(0, Rational(0));
  if (r.counterexample)
    r.kind = CertificateResult::Kind::Counterexample;
  else if (!spinal.symbolic.empty() && static_cast<int>(max_size) >= regions)
    r.kind = CertificateResult::Kind::Obstructed;
  else
    r.kind = CertificateResult::Kind::Certificate;
  return r;
}

std::string CertificateResult::render(const OrbitSpectrum& s) const {
  auto spell_config = [&](const Configuration& c) {
    std::string out = "{";
    for (std::size_t i = 0; i < c.orbits.size(); ++i) out += (i ? ", " : "") + s.orbits[c.orbits[i]].name;
    return out + "}: period " + to_string(c.period) + ", vdim " + to_string(c.vdim);
  };
  std::string out;
  switch (kind) {
    case Kind::Certificate:
      out += "certificate: all " + std::to_string(configurations.size()) + " configurations have vdim < 0\n";
      break;
    case Kind::Counterexample:
      out += "counterexample: " + spell_config(*counterexample) + "\n";
      break;
    case Kind::Obstructed:
      out += "no certificate: " + std::to_string(m + 1) + " punctures allow paper-class configurations (k = " +
             std::to_string(regions) + ")\n";
      break;
  }
  out += "spectrum: " + std::to_string(s.orbits.size()) + " spine orbits, " + std::to_string(s.symbolic.size()) +
         " paper classes, n = " + std::to_string(s.sft_n) + "\n";
  if (!s.symbolic.empty() && m + 1 < regions)
    out += "paper classes: excluded, windings cancel only with at least " + std::to_string(regions) +
           " punctures\n";
  for (const auto& v : hypothesis_violations) out += "hypothesis violated: " + v + "\n";
  for (const auto& c : configurations) out += "  " + spell_config(c) + "\n";
  return out;
}

}  // namespace blinfty
