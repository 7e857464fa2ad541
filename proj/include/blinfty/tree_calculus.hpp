#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blinfty/graded.hpp"

namespace blinfty {

struct TruncationPolicy {
  std::size_t max_letters = 4;  // N: total letters per sentence
  std::size_t max_words = 3;    // K: sentence length
  std::optional<Rational> max_action;  // only sentences with total action <= this
  CoeffRing ring;
};

// Raised when a structure-constant table violates a degree contract.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sparse table {p^{k,l}}: canonical input word -> sum of output words.
class OperatorFamily {
 public:
  OperatorFamily() : OperatorFamily(std::make_shared<Alphabet>()) {}
  explicit OperatorFamily(AlphabetPtr alphabet, std::optional<int> q_dimension = std::nullopt,
                          bool action_decreasing = false);

  // Input and output are canonicalized; the canonicalization signs multiply c.
  void add(std::span<const GenId> input, std::span<const GenId> output, const Coeff& c);
  void add(const std::vector<std::string>& input, const std::vector<std::string>& output, const Coeff& c);
  void check_entry(const Word& input, const Word& output) const;  // throws ContractError

  const WordSum* lookup(const Word& input) const;
  const std::map<Word, WordSum>& table() const { return table_; }
  std::size_t max_arity() const { return max_arity_; }
  std::size_t max_output() const { return max_output_; }
  const Alphabet& alphabet() const { return *alphabet_; }
  const AlphabetPtr& alphabet_ptr() const { return alphabet_; }
  std::optional<int> q_dimension() const { return q_dimension_; }
  bool action_decreasing() const { return action_decreasing_; }
  bool has_constant_outputs() const;  // some p^{k,0} is nonzero

  friend bool operator==(const OperatorFamily& a, const OperatorFamily& b) { return a.table_ == b.table_; }

 private:
  AlphabetPtr alphabet_;
  std::optional<int> q_dimension_;
  bool action_decreasing_ = false;
  std::map<Word, WordSum> table_;
  std::size_t max_arity_ = 0;
  std::size_t max_output_ = 0;
};

// Degree-0 family of maps S^k V -> S^l V'.  An augmentation is a morphism whose
// target alphabet is empty.
class MorphismFamily {
 public:
  MorphismFamily(AlphabetPtr source, AlphabetPtr target);

  void add(std::span<const GenId> input, std::span<const GenId> output, const Coeff& c);
  void add(const std::vector<std::string>& input, const std::vector<std::string>& output, const Coeff& c);

  const WordSum* lookup(const Word& input) const;
  const std::map<Word, WordSum>& table() const { return table_; }
  const Alphabet& source() const { return *source_; }
  const Alphabet& target() const { return *target_; }
  const AlphabetPtr& source_ptr() const { return source_; }
  const AlphabetPtr& target_ptr() const { return target_; }

 private:
  AlphabetPtr source_, target_;
  std::map<Word, WordSum> table_;
};

MorphismFamily identity_morphism(const AlphabetPtr& alphabet);
MorphismFamily make_augmentation(const AlphabetPtr& alphabet);  // empty target
OperatorFamily trivial_family();                               // the algebra with no generators

struct TruncationLog {
  std::size_t dropped = 0;
};

// Sum over leaf choices gluing one operator block to the given words (in the
// given order).  Output letters are placed first in the merged word.
WordSum hat_on_block(const OperatorFamily& p, std::span<const Word> words);

Element assemble_hat(const OperatorFamily& p, const Sentence& s);
Element assemble_hat(const OperatorFamily& p, const Element& x, const CoeffRing& ring = {},
                     TruncationLog* log = nullptr);

// Forest gluing: letters are partitioned into blocks drawn from distinct words,
// and each connected component (no cycles allowed) becomes one output word.
Element assemble_morphism(const MorphismFamily& phi, const Sentence& s);
Element assemble_morphism(const MorphismFamily& phi, const Element& x, const CoeffRing& ring = {},
                          TruncationLog* log = nullptr);

// Every canonical sentence within the truncation, in canonical order.
std::vector<Word> words_up_to(const Alphabet& alphabet, std::size_t max_letters);
std::vector<Sentence> spanning_sentences(const Alphabet& alphabet, const TruncationPolicy& t);

struct Failure {
  Sentence input;
  Element residual;
};

struct Report {
  std::string subject;
  bool ok = true;
  std::size_t checked = 0;
  std::size_t dropped = 0;
  std::vector<Failure> failures;

  std::string render(const Alphabet& input_alphabet, const Alphabet& residual_alphabet) const;
};

Report verify_blinfty(const OperatorFamily& p, const TruncationPolicy& t, unsigned threads = 1);
Report verify_morphism(const MorphismFamily& phi, const OperatorFamily& p, const OperatorFamily& p_target,
                       const TruncationPolicy& t, unsigned threads = 1);

struct AugmentationValue {
  Element image;  // in E𝟎: sentences 1⊙...⊙1
  Coeff value;    // each 1^{⊙m} read as 1
};
AugmentationValue apply_augmentation(const MorphismFamily& eps, const Element& x);

// Components of phi∘psi on input words up to the given size.
MorphismFamily compose(const MorphismFamily& phi, const MorphismFamily& psi, std::size_t max_input_letters);

}  // namespace blinfty
