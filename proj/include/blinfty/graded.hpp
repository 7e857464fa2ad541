#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "blinfty/coeff.hpp"

namespace blinfty {

using GenId = std::uint16_t;

struct Generator {
  std::string name;
  int z2 = 0;
  std::optional<Rational> q;
  Rational action = 1;
  std::vector<long> label;
  std::vector<std::string> flags;
  std::optional<Rational> cz;           // set for orbit-derived generators
  std::optional<Rational> multiplicity;  // covering multiplicity kappa

  bool has_flag(const std::string& f) const;
};

// The generators of one model, in declaration order (which is also the letter order).
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Generator> gens);  // throws on duplicates or action <= 0

  std::size_t size() const { return gens_.size(); }
  const Generator& operator[](GenId id) const { return gens_[id]; }
  const std::vector<Generator>& generators() const { return gens_; }
  std::optional<GenId> find(const std::string& name) const;
  GenId index(const std::string& name) const;  // throws "unknown generator 'x'"
  bool odd(GenId id) const { return gens_[id].z2 != 0; }

 private:
  std::vector<Generator> gens_;
  std::unordered_map<std::string, GenId> by_name_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

// A monomial of the graded symmetric algebra, letters in canonical order.
// The empty word is the scalar 1.
struct Word {
  std::vector<GenId> letters;

  std::size_t size() const { return letters.size(); }
  bool scalar() const { return letters.empty(); }
  friend bool operator==(const Word&, const Word&) = default;
  friend bool operator<(const Word& a, const Word& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
  }
};

// A monomial of the outer symmetric product; never empty.
struct Sentence {
  std::vector<Word> words;

  std::size_t size() const { return words.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
  friend bool operator<(const Sentence& a, const Sentence& b) {
    if (a.words.size() != b.words.size()) return a.words.size() < b.words.size();
    return a.words < b.words;
  }
};

struct GradedSign {
  int value = 1;  // +1, -1, or 0 for the zero word/sentence
  GradedSign& operator*=(GradedSign o) {
    value *= o.value;
    return *this;
  }
  friend bool operator==(GradedSign, GradedSign) = default;
};

struct CanonicalWord {
  Word word;
  GradedSign sign;
};

struct CanonicalSentence {
  Sentence sentence;
  GradedSign sign;
};

// Koszul sign of a rearrangement.  `order[i]` is the original position of the
// item now in slot i; `odd` is indexed by original position.
GradedSign koszul_sign(std::span<const std::size_t> order, const std::vector<bool>& odd);

CanonicalWord canonicalize_word(const Alphabet& alphabet, std::span<const GenId> letters);
CanonicalWord canonicalize_word(const Alphabet& alphabet, std::span<const std::string> names);
CanonicalSentence canonicalize_sentence(const Alphabet& alphabet, std::vector<Word> words);

struct Degree {
  int z2 = 0;
  std::optional<Rational> q;
  friend bool operator==(const Degree&, const Degree&) = default;
};

Degree degree(const Alphabet& alphabet, const Word& w);
Degree degree(const Alphabet& alphabet, const Sentence& s);
int parity(const Alphabet& alphabet, const Word& w);
int parity(const Alphabet& alphabet, const Sentence& s);
Rational action(const Alphabet& alphabet, const Word& w);
Rational action(const Alphabet& alphabet, const Sentence& s);
std::size_t filtration_level(const Sentence& s);
std::size_t letter_count(const Sentence& s);

std::string spell(const Alphabet& alphabet, const Word& w);      // "a b", "1" for the scalar word
std::string spell(const Alphabet& alphabet, const Sentence& s);  // words joined by ⊙

Word scalar_word();
Sentence unit_sentence();  // the sentence consisting of the scalar word 1
Word letter_word(GenId g);

// Linear combinations.  WordSum lives in SV, Element in EV.
using WordSum = std::map<Word, Coeff>;
using Element = std::map<Sentence, Coeff>;

void add_to(WordSum& target, const Word& w, const Coeff& c);
void add_to(Element& target, const Sentence& s, const Coeff& c);
void add_to(Element& target, const Element& x, const Coeff& scale = Coeff(1));
Element scaled(const Element& x, const Coeff& c);
Element negated(const Element& x);
Element difference(const Element& a, const Element& b);
std::size_t truncate(Element& x, const CoeffRing& ring);
std::size_t truncate(WordSum& x, const CoeffRing& ring);

// Product in EV (⊙), canonicalized.
Element odot(const Alphabet& alphabet, const Element& a, const Element& b);
Element single(const Sentence& s, const Coeff& c = Coeff(1));

// Report spelling: terms in canonical sentence order, monomials expanded.
std::string format(const Alphabet& alphabet, const Element& x);
std::string format(const Alphabet& alphabet, const WordSum& x);

}  // namespace blinfty
