#include "blinfty/homology.hpp"

#include <algorithm>
#include <functional>

#include "blinfty/parallel.hpp"

namespace blinfty {

int TruncatedComplex::parity_of(std::size_t j) const { return parity(*alphabet, basis[j]); }

RatVec to_coordinates(const Element& x, const std::map<Sentence, std::size_t>& index, std::vector<Sentence>* escapes,
                      bool* specialized) {
  RatVec v;
  for (const auto& [s, c] : x) {
    if (!c.is_scalar() && specialized) *specialized = true;
    Rational r = c.at_unit();
    if (r == 0) continue;
    auto it = index.find(s);
    if (it == index.end()) {
      if (escapes) escapes->push_back(s);
      continue;
    }
    v[it->second] += r;
  }
  for (auto it = v.begin(); it != v.end();) it = it->second == 0 ? v.erase(it) : std::next(it);
  return v;
}

TruncatedComplex build_complex(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t, unsigned threads) {
  TruncatedComplex c;
  c.alphabet = p.alphabet_ptr();
  c.level = k;
  c.truncation = t;
  c.truncation.max_words = k;
  c.basis = spanning_sentences(p.alphabet(), c.truncation);
  for (std::size_t j = 0; j < c.basis.size(); ++j) c.index.emplace(c.basis[j], j);
  c.boundary.resize(c.basis.size());
  std::vector<std::vector<Sentence>> escapes(c.basis.size());
  std::vector<char> special(c.basis.size(), 0);
  parallel_for(c.basis.size(), threads, [&](std::size_t j) {
    Element img = assemble_hat(p, single(c.basis[j]), t.ring);
    bool sp = false;
    c.boundary[j] = to_coordinates(img, c.index, &escapes[j], &sp);
    special[j] = sp;
  });
  for (std::size_t j = 0; j < c.basis.size(); ++j) {
    c.escapes.insert(c.escapes.end(), escapes[j].begin(), escapes[j].end());
    c.specialized = c.specialized || special[j];
  }
  std::sort(c.escapes.begin(), c.escapes.end());
  c.escapes.erase(std::unique(c.escapes.begin(), c.escapes.end()), c.escapes.end());
  return c;
}

namespace {

Element from_coordinates(const RatVec& v, const std::vector<Sentence>& basis) {
  Element x;
  for (const auto& [i, r] : v) add_to(x, basis[i], Coeff(r));
  return x;
}

void check_square(const TruncatedComplex& c) {
  for (std::size_t j = 0; j < c.size(); ++j) {
    RatVec sq;
    for (const auto& [i, r] : c.boundary[j])
      for (const auto& [l, s] : c.boundary[i]) sq[l] += r * s;
    for (const auto& [l, v] : sq)
      if (v != 0)
        throw BoundaryError("boundary does not square to zero on column " + spell(*c.alphabet, c.basis[j]),
                            c.basis[j]);
  }
}

}  // namespace

HomologyResult homology(const TruncatedComplex& c) {
  check_square(c);
  HomologyResult h;
  h.closed = c.closed();
  h.specialized = c.specialized;
  for (int d = 0; d < 2; ++d) {
    Echelon columns;
    std::vector<RatVec> kernel;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c.parity_of(j) != d) continue;
      ++h.chain_dims[d];
      if (auto z = columns.insert(c.boundary[j], j)) kernel.push_back(std::move(*z));
    }
    Echelon span;
    std::size_t tag = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c.parity_of(j) != d) span.insert(c.boundary[j], tag++);
    for (const auto& z : kernel) {
      if (!span.insert(z, tag++)) {
        ++h.dims[d];
        h.representatives[d].push_back(from_coordinates(z, c.basis));
      }
    }
  }
  auto unit = c.index.find(unit_sentence());
  if (unit != c.index.end()) {
    Echelon all;
    for (std::size_t j = 0; j < c.size(); ++j) all.insert(c.boundary[j], j);
    if (auto sol = all.solve(RatVec{{unit->second, Rational(1)}})) {
      h.unit_vanishes = true;
      h.unit_witness = from_coordinates(*sol, c.basis);
    }
  }
  return h;
}

std::string render(const HomologyResult& h, const TruncatedComplex& c) {
  const Alphabet& a = *c.alphabet;
  std::string out = "level " + std::to_string(c.level) + ": " + std::to_string(c.size()) + " basis sentences (" +
                    std::to_string(h.chain_dims[0]) + " even, " + std::to_string(h.chain_dims[1]) + " odd)\n";
  if (!h.closed)
    out += "warning: truncation not closed under p̂ (" + std::to_string(c.escapes.size()) +
           " output sentences dropped)\n";
  if (h.specialized) out += "note: coefficients specialized at T = 1\n";
  const char* names[2] = {"even", "odd"};
  for (int d = 0; d < 2; ++d) {
    out += "H_" + std::string(names[d]) + ": dimension " + std::to_string(h.dims[d]) + "\n";
    for (const auto& r : h.representatives[d]) out += "  [" + format(a, r) + "]\n";
  }
  out += "euler characteristic: chains " + std::to_string(h.euler_chains()) + ", homology " +
         std::to_string(h.euler_homology()) + "\n";
  if (h.unit_vanishes)
    out += "unit class: zero; witness: " + format(a, *h.unit_witness) + "\n";
  else
    out += "unit class: nonzero\n";
  return out;
}

namespace {

bool positively_graded(const OperatorFamily& p) {
  if (p.alphabet().size() == 0) return true;
  if (!p.q_dimension()) return false;
  for (const auto& g : p.alphabet().generators())
    if (!g.q || *g.q <= 0) return false;
  return true;
}

// Words whose Q-degree does not exceed `budget` (all generator degrees positive).
std::vector<Word> words_within(const Alphabet& a, const Rational& budget) {
  std::vector<Word> out;
  Word cur;
  std::function<void(std::size_t, const Rational&)> grow = [&](std::size_t from, const Rational& used) {
    out.push_back(cur);
    for (std::size_t g = from; g < a.size(); ++g) {
      Rational next = used + *a[static_cast<GenId>(g)].q;
      if (next > budget) continue;
      cur.letters.push_back(static_cast<GenId>(g));
      grow(a.odd(static_cast<GenId>(g)) ? g + 1 : g, next);
      cur.letters.pop_back();
    }
  };
  grow(0, Rational(0));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Sentence> graded_candidates(const OperatorFamily& p, std::size_t k) {
  const Alphabet& a = p.alphabet();
  std::vector<Sentence> out;
  if (a.size() == 0) return out;
  const int n = *p.q_dimension();
  auto target = [&](std::size_t len) { return Rational(1 + 2 * (n - 3) * (long(len) - 1)); };
  Rational budget = 0;
  for (std::size_t len = 1; len <= k; ++len) budget = std::max(budget, target(len));
  if (budget < 0) return out;
  std::vector<Word> words = words_within(a, budget);
  std::vector<Rational> q(words.size());
  std::vector<bool> odd(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    q[i] = *degree(a, words[i]).q;
    odd[i] = parity(a, words[i]) != 0;
  }
  Sentence cur;
  std::function<void(std::size_t, const Rational&)> grow = [&](std::size_t from, const Rational& used) {
    std::size_t len = cur.words.size();
    if (len > 0 && used == target(len) && parity(a, cur) == 1) out.push_back(cur);
    if (len == k) return;
    for (std::size_t i = from; i < words.size(); ++i) {
      if (used + q[i] > budget) continue;
      cur.words.push_back(words[i]);
      grow(odd[i] ? i + 1 : i, used + q[i]);
      cur.words.pop_back();
    }
  };
  grow(0, Rational(0));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Sentence> unit_candidates(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t,
                                      bool& complete) {
  complete = positively_graded(p);
  if (complete) return graded_candidates(p, k);
  TruncationPolicy level = t;
  level.max_words = k;
  std::vector<Sentence> out;
  for (auto& s : spanning_sentences(p.alphabet(), level))
    if (parity(p.alphabet(), s) == 1) out.push_back(std::move(s));
  return out;
}

namespace {

UnitResult solve_unit(const OperatorFamily& p, const std::vector<Sentence>& candidates, const TruncationPolicy& t,
                      unsigned threads, bool* specialized) {
  UnitResult r;
  std::vector<Element> images(candidates.size());
  parallel_for(candidates.size(), threads,
               [&](std::size_t j) { images[j] = assemble_hat(p, single(candidates[j]), t.ring); });
  std::vector<Sentence> rows;
  for (const auto& img : images)
    for (const auto& [s, c] : img) rows.push_back(s);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::map<Sentence, std::size_t> index;
  for (std::size_t i = 0; i < rows.size(); ++i) index.emplace(rows[i], i);
  auto unit = index.find(unit_sentence());
  if (unit == index.end()) return r;
  Echelon e;
  for (std::size_t j = 0; j < candidates.size(); ++j) e.insert(to_coordinates(images[j], index, nullptr, specialized), j);
  auto sol = e.solve(RatVec{{unit->second, Rational(1)}});
  if (!sol) return r;
  Element x;
  for (const auto& [j, c] : *sol) add_to(x, candidates[j], Coeff(c));
  // independent re-check of the witness against the operator itself
  Element check = assemble_hat(p, x, t.ring);
  RatVec coords = to_coordinates(check, index, nullptr, nullptr);
  if (coords != RatVec{{unit->second, Rational(1)}}) throw std::logic_error("unit witness failed re-verification");
  r.vanishes = true;
  r.witness = std::move(x);
  return r;
}

}  // namespace

UnitResult unit_vanishes(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t, unsigned threads) {
  bool complete = false;
  auto candidates = unit_candidates(p, k, t, complete);
  return solve_unit(p, candidates, t, threads, nullptr);
}

TorsionResult torsion(const OperatorFamily& p, std::size_t k_max, const TruncationPolicy& t, unsigned threads) {
  TorsionResult r;
  r.k_max = k_max;
  bool complete = true;
  for (std::size_t m = 0; m < k_max; ++m) {
    bool level_complete = false;
    auto candidates = unit_candidates(p, m + 1, t, level_complete);
    complete = complete && level_complete;
    UnitResult u = solve_unit(p, candidates, t, threads, &r.specialized);
    if (u.vanishes) {
      r.value = m;
      r.witness = std::move(u.witness);
      break;
    }
  }
  bool action_closed = p.alphabet().size() == 0 || p.action_decreasing();
  if (complete && !r.specialized)
    r.soundness = action_closed ? "exact (action-closed)" : "exact (graded)";
  else
    r.soundness = "truncated";
  return r;
}

std::string TorsionResult::render(const Alphabet& alphabet) const {
  std::string tag = soundness == "exact (action-closed)" ? "exact, action-closed"
                    : soundness == "exact (graded)"      ? "exact, graded"
                                                         : "up to truncation";
  if (specialized) tag += ", specialized at T = 1";
  if (value) return "T = " + std::to_string(*value) + " (" + tag + "); witness: " + format(alphabet, *witness);
  return "T ≥ " + std::to_string(k_max) + " (" + tag + ")";
}

FunctorialityReport functoriality_check(const MorphismFamily& phi, const OperatorFamily& p,
                                        const OperatorFamily& p_target, std::size_t k_max,
                                        const TruncationPolicy& t, unsigned threads) {
  FunctorialityReport r;
  r.source = torsion(p, k_max, t, threads);
  r.target = torsion(p_target, k_max, t, threads);
  if (r.source.value && r.target.value) {
    r.holds = *r.source.value >= *r.target.value;
    r.conclusive = true;
  } else if (!r.source.value) {
    r.holds = true;  // source is at least k_max
    r.conclusive = r.target.value.has_value();
  } else {
    r.holds = false;  // target bounded below by k_max > source value
    r.conclusive = r.target.soundness != "truncated";
  }
  if (r.source.witness) {
    Element image = assemble_morphism(phi, *r.source.witness, t.ring);
    Element boundary = assemble_hat(p_target, image, t.ring);
    r.witness_maps = boundary == single(unit_sentence());
  }
  return r;
}

std::string FunctorialityReport::render(const Alphabet& source_alphabet, const Alphabet& target_alphabet) const {
  std::string out = "source: " + source.render(source_alphabet) + "\n";
  out += "target: " + target.render(target_alphabet) + "\n";
  out += std::string("T(V) ≥ T(V′): ") + (holds ? "holds" : "VIOLATED") + (conclusive ? "" : " (up to K_max)") + "\n";
  if (witness_maps) out += std::string("image of source witness bounds the unit: ") + (*witness_maps ? "yes" : "no") + "\n";
  return out;
}

}  // namespace blinfty
