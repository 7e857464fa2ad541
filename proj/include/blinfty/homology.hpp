#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blinfty/linalg.hpp"
#include "blinfty/tree_calculus.hpp"

namespace blinfty {

struct TruncatedComplex {
  AlphabetPtr alphabet;
  std::size_t level = 1;
  TruncationPolicy truncation;
  std::vector<Sentence> basis;  // canonical order
  std::map<Sentence, std::size_t> index;
  std::vector<RatVec> boundary;  // column j is p̂(basis[j]) in basis coordinates
  std::vector<Sentence> escapes;  // output sentences outside the basis (complex not closed)
  bool specialized = false;       // non-rational coefficients were evaluated at T = 1

  bool closed() const { return escapes.empty(); }
  std::size_t size() const { return basis.size(); }
  int parity_of(std::size_t j) const;
};

// Raised when the stored boundary does not square to zero.
class BoundaryError : public std::runtime_error {
 public:
  BoundaryError(const std::string& what, Sentence column) : std::runtime_error(what), column(std::move(column)) {}
  Sentence column;
};

TruncatedComplex build_complex(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t,
                               unsigned threads = 1);

struct HomologyResult {
  std::array<std::size_t, 2> chain_dims{0, 0};
  std::array<std::size_t, 2> dims{0, 0};
  std::array<std::vector<Element>, 2> representatives;
  bool unit_vanishes = false;
  std::optional<Element> unit_witness;
  bool closed = true;
  bool specialized = false;

  long euler_chains() const { return long(chain_dims[0]) - long(chain_dims[1]); }
  long euler_homology() const { return long(dims[0]) - long(dims[1]); }
};

HomologyResult homology(const TruncatedComplex& c);
std::string render(const HomologyResult& h, const TruncatedComplex& c);

struct UnitResult {
  bool vanishes = false;
  std::optional<Element> witness;
};

// Sentences that can possibly bound the unit at level k.  When the model has
// a positive Q-grading this list is complete; otherwise it is the truncated
// spanning set.  `complete` reports which case applies.
std::vector<Sentence> unit_candidates(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t,
                                      bool& complete);
UnitResult unit_vanishes(const OperatorFamily& p, std::size_t k, const TruncationPolicy& t, unsigned threads = 1);

struct TorsionResult {
  std::optional<std::size_t> value;  // empty: no witness below k_max
  std::size_t k_max = 0;
  std::optional<Element> witness;
  std::string soundness;  // "exact (action-closed)", "exact (graded)" or "truncated"
  bool specialized = false;

  std::string render(const Alphabet& alphabet) const;
};

TorsionResult torsion(const OperatorFamily& p, std::size_t k_max, const TruncationPolicy& t, unsigned threads = 1);

struct FunctorialityReport {
  TorsionResult source, target;
  bool holds = false;
  bool conclusive = false;
  std::optional<bool> witness_maps;  // set when the source has a witness
  std::string render(const Alphabet& source_alphabet, const Alphabet& target_alphabet) const;
};

FunctorialityReport functoriality_check(const MorphismFamily& phi, const OperatorFamily& p,
                                        const OperatorFamily& p_target, std::size_t k_max,
                                        const TruncationPolicy& t, unsigned threads = 1);

// Evaluates every coefficient at T = 1; sets `specialized` when that changed anything.
RatVec to_coordinates(const Element& x, const std::map<Sentence, std::size_t>& index, std::vector<Sentence>* escapes,
                      bool* specialized);

}  // namespace blinfty
