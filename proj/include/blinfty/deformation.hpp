#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blinfty/homology.hpp"
#include "blinfty/tree_calculus.hpp"

namespace blinfty {

// Residual of an identity, grouped by filtration degree of the coefficients.
struct OrderedResidual {
  Element residual;
  std::map<Rational, std::size_t> terms_per_order;
  bool vanishes() const { return residual.empty(); }
  std::string render(const Alphabet& alphabet) const;
};

OrderedResidual split_by_order(Element residual, const CoeffRing& ring);

// Σ_{i≥1} a^{⊙i}/i! to the truncation order.  Throws std::invalid_argument if
// a term of `a` has non-positive filtration (and no positive weight when a
// weight cap is in force), since the series would not terminate.
Element exp_minus_one(const Alphabet& alphabet, const WordSum& a, const CoeffRing& ring);
Element as_element(const WordSum& a);

// x ⊙ e^a, i.e. x + x ⊙ (e^a − 1).
Element times_exp(const Alphabet& alphabet, const Element& x, const Element& exp_minus_one, const CoeffRing& ring);

OrderedResidual verify_mc(const OperatorFamily& p, const WordSum& mc, const CoeffRing& ring);

// Entries π_{1,*} p̂(v₁⊙…⊙v_k⊙e^a).  Only blocks that glue every supplied word
// yield a single output word, so this sums full gluings against the terms of
// e^a.  The MC condition is not checked here.
OperatorFamily deform_unchecked(const OperatorFamily& p, const WordSum& a, const CoeffRing& ring);
// As above, after refusing a nonzero MC residual (std::invalid_argument).
OperatorFamily deform(const OperatorFamily& p, const WordSum& mc, const CoeffRing& ring);

OrderedResidual check_pmc_identity(const OperatorFamily& p, const WordSum& a, const Element& s, const CoeffRing& ring);
OrderedResidual exp_chain_map_check(const OperatorFamily& p, const WordSum& mc, const Element& x,
                                    const CoeffRing& ring);

struct LinearHomology {
  std::array<std::size_t, 2> dims{0, 0};
  std::array<std::vector<WordSum>, 2> representatives;
};

struct Linearization {
  OperatorFamily family;                 // p_ε
  std::map<Word, WordSum> constant_terms;  // nonzero p_ε^{k,0}; must be empty
  bool differential_squares_to_zero = false;
  LinearHomology homology;
  std::string render() const;
};

// Words up to `max_input` letters; the default bound covers every gluing of a
// p-vertex with ε-caps.
Linearization linearize(const OperatorFamily& p, const MorphismFamily& eps, std::size_t max_input = 0);

struct AugmentationSearch {
  std::vector<GenId> searched;  // even generators with action within the bound
  std::vector<std::vector<Rational>> solutions;
  std::optional<Rational> action_bound;
  std::string render(const Alphabet& alphabet) const;
};

// Tries ε¹ values from `candidates` on every even generator below the action
// bound (ε is zero elsewhere and on higher arities).
AugmentationSearch search_augmentations(const OperatorFamily& p, const std::vector<Rational>& candidates,
                                        std::optional<Rational> action_bound, const TruncationPolicy& t);

struct WeightedWitness {
  Element extract;        // coefficient of t₁⋯t_k in seed⊙e^mc
  Element specialized;    // extract at T = 1
  std::size_t length = 0;
  Element boundary;       // p̂(specialized)
  std::optional<std::size_t> torsion_bound;  // L − 1 when the boundary is a nonzero scalar
  std::string render(const Alphabet& alphabet) const;
};

// `seed` empty means the unit (the empty product).
WeightedWitness weighted_witness(const OperatorFamily& p, const WordSum& mc, const Element& seed, std::size_t k,
                                 const CoeffRing& ring);

}  // namespace blinfty
