#include "blinfty/deformation.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace blinfty {

OrderedResidual split_by_order(Element residual, const CoeffRing& ring) {
  OrderedResidual r;
  truncate(residual, ring);
  for (const auto& [s, c] : residual)
    for (const auto& [m, v] : c.terms()) ++r.terms_per_order[ring.filtration(m)];
  r.residual = std::move(residual);
  return r;
}

std::string OrderedResidual::render(const Alphabet& alphabet) const {
  if (vanishes()) return "residual 0\n";
  std::string out = "residual " + format(alphabet, residual) + "\n";
  for (const auto& [order, n] : terms_per_order)
    out += "  order " + to_string(order) + ": " + std::to_string(n) + " terms\n";
  return out;
}

Element as_element(const WordSum& a) {
  Element x;
  for (const auto& [w, c] : a) add_to(x, Sentence{{w}}, c);
  return x;
}

namespace {

void check_mc_shape(const Alphabet& alphabet, const WordSum& a, const CoeffRing& ring) {
  for (const auto& [w, c] : a) {
    if (parity(alphabet, w) != 0)
      throw std::invalid_argument("Maurer-Cartan term " + spell(alphabet, w) + " is not of even degree");
    for (const auto& [m, v] : c.terms()) {
      bool energy_ok = ring.order && ring.filtration(m) > 0;
      bool weight_ok = !ring.weight_cap.empty() && m.total_weight() > 0;
      if (!energy_ok && !weight_ok)
        throw std::invalid_argument("term " + spell(alphabet, w) +
                                    " has zero filtration degree; the exponential series does not terminate");
    }
  }
}

}  // namespace

Element exp_minus_one(const Alphabet& alphabet, const WordSum& a, const CoeffRing& ring) {
  check_mc_shape(alphabet, a, ring);
  Element base = as_element(a);
  truncate(base, ring);
  Element result = base;
  Element power = base;
  for (long i = 2; !power.empty(); ++i) {
    power = odot(alphabet, power, base);
    for (auto& [s, c] : power) c *= Coeff(Rational(1, i));
    truncate(power, ring);
    add_to(result, power);
  }
  return result;
}

Element times_exp(const Alphabet& alphabet, const Element& x, const Element& exp_minus_one, const CoeffRing& ring) {
  Element out = x;
  add_to(out, odot(alphabet, x, exp_minus_one));
  truncate(out, ring);
  return out;
}

OrderedResidual verify_mc(const OperatorFamily& p, const WordSum& mc, const CoeffRing& ring) {
  Element e = exp_minus_one(p.alphabet(), mc, ring);
  return split_by_order(assemble_hat(p, e, ring), ring);
}

OperatorFamily deform_unchecked(const OperatorFamily& p, const WordSum& a, const CoeffRing& ring) {
  const Alphabet& alphabet = p.alphabet();
  Element e = exp_minus_one(alphabet, a, ring);
  std::optional<int> qdim = p.q_dimension();
  if (qdim)
    for (const auto& [w, c] : a) {
      auto d = degree(alphabet, w);
      if (!d.q || *d.q != 2 * (*qdim - 3)) qdim.reset();
    }
  OperatorFamily out(p.alphabet_ptr(), qdim, false);
  const std::size_t arity = p.max_arity();
  for (const Word& v : words_up_to(alphabet, arity)) {
    if (v.scalar()) continue;
    std::vector<Word> base;
    for (GenId g : v.letters) base.push_back(letter_word(g));
    WordSum entry = hat_on_block(p, base);
    for (const auto& [s, c] : e) {
      if (s.words.size() + v.size() > arity) continue;
      std::vector<Word> words = base;
      words.insert(words.end(), s.words.begin(), s.words.end());
      for (const auto& [w, cw] : hat_on_block(p, words)) add_to(entry, w, cw * c);
    }
    truncate(entry, ring);
    for (const auto& [w, c] : entry) out.add(v.letters, w.letters, c);
  }
  return out;
}

OperatorFamily deform(const OperatorFamily& p, const WordSum& mc, const CoeffRing& ring) {
  auto r = verify_mc(p, mc, ring);
  if (!r.vanishes())
    throw std::invalid_argument("not a Maurer-Cartan element: " + r.render(p.alphabet()));
  return deform_unchecked(p, mc, ring);
}

OrderedResidual check_pmc_identity(const OperatorFamily& p, const WordSum& a, const Element& s, const CoeffRing& ring) {
  const Alphabet& alphabet = p.alphabet();
  int sp = -1;
  for (const auto& [sentence, c] : s) {
    int d = parity(alphabet, sentence);
    if (sp >= 0 && d != sp) throw std::invalid_argument("s must have pure degree");
    sp = d;
  }
  Element e = exp_minus_one(alphabet, a, ring);
  OperatorFamily pa = deform_unchecked(p, a, ring);
  Element lhs = assemble_hat(p, times_exp(alphabet, s, e, ring), ring);
  Element rhs = times_exp(alphabet, assemble_hat(pa, s, ring), e, ring);
  Element tail = odot(alphabet, s, assemble_hat(p, e, ring));
  add_to(rhs, tail, Coeff(sp == 1 ? -1 : 1));
  return split_by_order(difference(lhs, rhs), ring);
}

OrderedResidual exp_chain_map_check(const OperatorFamily& p, const WordSum& mc, const Element& x,
                                    const CoeffRing& ring) {
  const Alphabet& alphabet = p.alphabet();
  Element e = exp_minus_one(alphabet, mc, ring);
  OperatorFamily pmc = deform_unchecked(p, mc, ring);
  Element lhs = assemble_hat(p, times_exp(alphabet, x, e, ring), ring);
  Element rhs = times_exp(alphabet, assemble_hat(pmc, x, ring), e, ring);
  return split_by_order(difference(lhs, rhs), ring);
}

namespace {

const Coeff* cap_value(const MorphismFamily& eps, const Word& w) {
  const WordSum* row = eps.lookup(w);
  if (!row) return nullptr;
  auto it = row->find(Word{});
  return it == row->end() ? nullptr : &it->second;
}

}  // namespace

Linearization linearize(const OperatorFamily& p, const MorphismFamily& eps, std::size_t max_input) {
  const Alphabet& a = p.alphabet();
  std::size_t eps_arity = 1;
  for (const auto& [w, row] : eps.table()) eps_arity = std::max(eps_arity, w.size());
  if (max_input == 0) max_input = std::max<std::size_t>(1, p.max_arity() + p.max_output() * (eps_arity - 1));

  Linearization lin;
  lin.family = OperatorFamily(p.alphabet_ptr(), p.q_dimension(), false);
  std::map<Word, WordSum> entries;

  for (const Word& v : words_up_to(a, max_input)) {
    if (v.scalar()) continue;
    const std::size_t n = v.size();
    std::vector<bool> vodd(n);
    for (std::size_t i = 0; i < n; ++i) vodd[i] = a.odd(v.letters[i]);
    for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountl(mask)) > p.max_arity()) continue;
      std::vector<std::size_t> order;
      std::vector<GenId> chosen;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) {
          order.push_back(i);
          chosen.push_back(v.letters[i]);
        }
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (!(mask >> i & 1)) rest.push_back(i);
      order.insert(order.end(), rest.begin(), rest.end());
      auto cw = canonicalize_word(a, chosen);
      if (cw.sign.value == 0) continue;
      const WordSum* image = p.lookup(cw.word);
      if (!image) continue;
      int sign0 = koszul_sign(order, vodd).value * cw.sign.value;

      for (const auto& [u, c] : *image) {
        // seq = outputs of p followed by the unused inputs
        std::vector<GenId> seq(u.letters);
        for (std::size_t i : rest) seq.push_back(v.letters[i]);
        std::vector<bool> sodd(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) sodd[i] = a.odd(seq[i]);
        const std::size_t L = u.size();
        std::vector<int> capped(L, 0);
        std::vector<std::size_t> owner(rest.size(), 0);  // output index capping each unused input
        std::function<void(std::size_t)> assign_outputs;
        std::function<void(std::size_t)> assign_inputs = [&](std::size_t r) {
          if (r < rest.size()) {
            for (std::size_t o = 0; o < L; ++o) {
              if (!capped[o]) continue;
              owner[r] = o;
              assign_inputs(r + 1);
            }
            return;
          }
          std::vector<std::size_t> target;
          std::vector<GenId> kept;
          for (std::size_t o = 0; o < L; ++o)
            if (!capped[o]) {
              target.push_back(o);
              kept.push_back(seq[o]);
            }
          Coeff value(sign0);
          value *= c;
          for (std::size_t o = 0; o < L; ++o) {
            if (!capped[o]) continue;
            std::vector<std::size_t> group{o};
            for (std::size_t r2 = 0; r2 < rest.size(); ++r2)
              if (owner[r2] == o) group.push_back(L + r2);
            std::vector<GenId> letters;
            for (std::size_t g : group) letters.push_back(seq[g]);
            auto gw = canonicalize_word(a, letters);
            if (gw.sign.value == 0) return;
            const Coeff* e = cap_value(eps, gw.word);
            if (!e) return;
            value *= *e * Coeff(gw.sign.value);
            target.insert(target.end(), group.begin(), group.end());
          }
          auto kw = canonicalize_word(a, kept);
          if (kw.sign.value == 0) return;
          value *= Coeff(koszul_sign(target, sodd).value * kw.sign.value);
          add_to(entries[v], kw.word, value);
        };
        assign_outputs = [&](std::size_t o) {
          if (o == L) {
            if (rest.empty() || std::find(capped.begin(), capped.end(), 1) != capped.end()) assign_inputs(0);
            return;
          }
          capped[o] = 0;
          assign_outputs(o + 1);
          capped[o] = 1;
          assign_outputs(o + 1);
          capped[o] = 0;
        };
        assign_outputs(0);
      }
    }
  }
  for (const auto& [v, row] : entries)
    for (const auto& [w, c] : row) {
      if (c.is_zero()) continue;
      if (w.scalar())
        add_to(lin.constant_terms[v], w, c);
      else
        lin.family.add(v.letters, w.letters, c);
    }

  // linear part on generators
  const std::size_t g = a.size();
  std::vector<RatVec> d(g);
  for (std::size_t i = 0; i < g; ++i)
    if (const WordSum* row = lin.family.lookup(letter_word(static_cast<GenId>(i))))
      for (const auto& [w, c] : *row)
        if (w.size() == 1) d[i][w.letters[0]] += c.at_unit();
  lin.differential_squares_to_zero = true;
  for (std::size_t i = 0; i < g; ++i) {
    RatVec sq;
    for (const auto& [j, r] : d[i])
      for (const auto& [l, s] : d[j]) sq[l] += r * s;
    for (const auto& [l, s] : sq)
      if (s != 0) lin.differential_squares_to_zero = false;
  }
  if (lin.differential_squares_to_zero) {
    for (int par = 0; par < 2; ++par) {
      Echelon cols;
      std::vector<RatVec> kernel;
      for (std::size_t i = 0; i < g; ++i) {
        if (a[static_cast<GenId>(i)].z2 != par) continue;
        if (auto z = cols.insert(d[i], i)) kernel.push_back(*z);
      }
      Echelon span;
      std::size_t tag = 0;
      for (std::size_t i = 0; i < g; ++i)
        if (a[static_cast<GenId>(i)].z2 != par) span.insert(d[i], tag++);
      for (const auto& z : kernel)
        if (!span.insert(z, tag++)) {
          ++lin.homology.dims[par];
          WordSum rep;
          for (const auto& [i, r] : z) add_to(rep, letter_word(static_cast<GenId>(i)), Coeff(r));
          lin.homology.representatives[par].push_back(rep);
        }
    }
  }
  return lin;
}

std::string Linearization::render() const {
  const Alphabet& a = family.alphabet();
  std::string out;
  out += constant_terms.empty() ? "p_ε^{k,0}: all vanish\n" : "p_ε^{k,0}: NONZERO\n";
  for (const auto& [v, row] : constant_terms) out += "  " + spell(a, v) + " -> " + format(a, row) + "\n";
  out += "linearized differential:\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    WordSum lin;
    if (const WordSum* row = family.lookup(letter_word(static_cast<GenId>(i))))
      for (const auto& [w, c] : *row)
        if (w.size() == 1) add_to(lin, w, c);
    out += "  d " + a[static_cast<GenId>(i)].name + " = " + format(a, lin) + "\n";
  }
  out += std::string("d∘d = 0: ") + (differential_squares_to_zero ? "yes" : "NO") + "\n";
  if (differential_squares_to_zero) {
    const char* names[2] = {"even", "odd"};
    for (int d = 0; d < 2; ++d) {
      out += "linearized homology " + std::string(names[d]) + ": dimension " + std::to_string(homology.dims[d]) + "\n";
      for (const auto& r : homology.representatives[d]) out += "  [" + format(a, r) + "]\n";
    }
  }
  return out;
}

AugmentationSearch search_augmentations(const OperatorFamily& p, const std::vector<Rational>& candidates,
                                        std::optional<Rational> action_bound, const TruncationPolicy& t) {
  AugmentationSearch out;
  out.action_bound = action_bound;
  const Alphabet& a = p.alphabet();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& gen = a[static_cast<GenId>(i)];
    if (gen.z2 == 0 && (!action_bound || gen.action <= *action_bound)) out.searched.push_back(static_cast<GenId>(i));
  }
  OperatorFamily zero = trivial_family();
  std::vector<Rational> values(out.searched.size());
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (i == out.searched.size()) {
      MorphismFamily eps = make_augmentation(p.alphabet_ptr());
      for (std::size_t j = 0; j < values.size(); ++j) {
        GenId g = out.searched[j];
        eps.add(std::span<const GenId>(&g, 1), std::span<const GenId>(), Coeff(values[j]));
      }
      if (verify_morphism(eps, p, zero, t).ok) out.solutions.push_back(values);
      return;
    }
    for (const auto& v : candidates) {
      values[i] = v;
      visit(i + 1);
    }
  };
  visit(0);
  return out;
}

std::string AugmentationSearch::render(const Alphabet& alphabet) const {
  std::string out = "augmentation search over " + std::to_string(searched.size()) + " even generators";
  if (action_bound) out += " with action ≤ " + to_string(*action_bound);
  out += ": " + std::to_string(solutions.size()) + " solutions\n";
  for (const auto& s : solutions) {
    out += " ";
    for (std::size_t j = 0; j < s.size(); ++j) out += " ε(" + alphabet[searched[j]].name + ")=" + to_string(s[j]);
    out += "\n";
  }
  return out;
}

WeightedWitness weighted_witness(const OperatorFamily& p, const WordSum& mc, const Element& seed, std::size_t k,
                                 const CoeffRing& ring) {
  const Alphabet& a = p.alphabet();
  for (const auto& [w, c] : mc)
    for (const auto& [m, v] : c.terms())
      if (m.total_weight() == 0)
        throw std::invalid_argument("Maurer-Cartan term " + spell(a, w) + " has weight 0");
  CoeffRing weighted = ring;
  weighted.weight_cap.assign(k, 1);
  Element e = exp_minus_one(a, mc, weighted);
  Element y = seed.empty() ? e : times_exp(a, seed, e, weighted);
  std::vector<int> full(k, 1);
  WeightedWitness w;
  for (const auto& [s, c] : y)
    for (const auto& [m, v] : c.terms())
      if (m.weights == full) {
        Monomial rest = m;
        rest.weights.clear();
        add_to(w.extract, s, Coeff::monomial(v, rest) * Coeff::monomial(1, Monomial{0, full, {}}));
        add_to(w.specialized, s, Coeff(v));
      }
  for (const auto& [s, c] : w.specialized) w.length = std::max(w.length, s.size());
  w.boundary = assemble_hat(p, w.specialized);
  if (w.boundary.size() == 1 && w.boundary.begin()->first == unit_sentence() && w.length > 0)
    w.torsion_bound = w.length - 1;
  return w;
}

std::string WeightedWitness::render(const Alphabet& alphabet) const {
  std::string out = "coefficient of t-monomial: " + format(alphabet, extract) + "\n";
  out += "at T = 1: " + format(alphabet, specialized) + "\n";
  out += "sentence length: " + std::to_string(length) + "\n";
  out += "p̂ of extract: " + format(alphabet, boundary) + "\n";
  if (torsion_bound)
    out += "bound: T ≤ " + std::to_string(*torsion_bound) + "\n";
  else
    out += "bound: none (boundary is not a nonzero scalar)\n";
  return out;
}

}  // namespace blinfty
