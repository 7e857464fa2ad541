#include "blinfty/graded.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace blinfty {

bool Generator::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

Alphabet::Alphabet(std::vector<Generator> gens) : gens_(std::move(gens)) {
  if (gens_.size() > 0xFFFF) throw std::invalid_argument("too many generators");
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (gens_[i].action <= 0) throw std::invalid_argument("generator '" + gens_[i].name + "' has non-positive action");
    if (!by_name_.emplace(gens_[i].name, static_cast<GenId>(i)).second)
      throw std::invalid_argument("duplicate generator '" + gens_[i].name + "'");
  }
}

std::optional<GenId> Alphabet::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

GenId Alphabet::index(const std::string& name) const {
  auto id = find(name);
  if (!id) throw std::invalid_argument("unknown generator '" + name + "'");
  return *id;
}

GradedSign koszul_sign(std::span<const std::size_t> order, const std::vector<bool>& odd) {
  int s = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!odd[order[i]]) continue;
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (odd[order[j]] && order[j] < order[i]) s = -s;
  }
  return GradedSign{s};
}

CanonicalWord canonicalize_word(const Alphabet& alphabet, std::span<const GenId> letters) {
  std::vector<std::size_t> order(letters.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return letters[a] < letters[b]; });
  std::vector<bool> odd(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) odd[i] = alphabet.odd(letters[i]);
  CanonicalWord out;
  out.word.letters.reserve(letters.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    GenId g = letters[order[i]];
    if (i > 0 && out.word.letters.back() == g && alphabet.odd(g)) return {Word{}, GradedSign{0}};
    out.word.letters.push_back(g);
  }
  out.sign = koszul_sign(order, odd);
  return out;
}

CanonicalWord canonicalize_word(const Alphabet& alphabet, std::span<const std::string> names) {
  std::vector<GenId> ids;
  ids.reserve(names.size());
  for (const auto& n : names) ids.push_back(alphabet.index(n));
  return canonicalize_word(alphabet, ids);
}

CanonicalSentence canonicalize_sentence(const Alphabet& alphabet, std::vector<Word> words) {
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
  std::vector<bool> odd(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) odd[i] = parity(alphabet, words[i]) != 0;
  CanonicalSentence out;
  out.sentence.words.reserve(words.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Word& w = words[order[i]];
    if (i > 0 && odd[order[i]] && out.sentence.words.back() == w) return {Sentence{}, GradedSign{0}};
    out.sentence.words.push_back(w);
  }
  out.sign = koszul_sign(order, odd);
  return out;
}

Degree degree(const Alphabet& alphabet, const Word& w) {
  Degree d;
  d.q = Rational(0);
  for (GenId g : w.letters) {
    d.z2 ^= alphabet[g].z2;
    if (d.q && alphabet[g].q)
      *d.q += *alphabet[g].q;
    else
      d.q.reset();
  }
  return d;
}

Degree degree(const Alphabet& alphabet, const Sentence& s) {
  Degree d;
  d.q = Rational(0);
  for (const Word& w : s.words) {
    Degree e = degree(alphabet, w);
    d.z2 ^= e.z2;
    if (d.q && e.q)
      *d.q += *e.q;
    else
      d.q.reset();
  }
  return d;
}

int parity(const Alphabet& alphabet, const Word& w) {
  int p = 0;
  for (GenId g : w.letters) p ^= alphabet[g].z2;
  return p;
}

int parity(const Alphabet& alphabet, const Sentence& s) {
  int p = 0;
  for (const Word& w : s.words) p ^= parity(alphabet, w);
  return p;
}

Rational action(const Alphabet& alphabet, const Word& w) {
  Rational a = 0;
  for (GenId g : w.letters) a += alphabet[g].action;
  return a;
}

Rational action(const Alphabet& alphabet, const Sentence& s) {
  Rational a = 0;
  for (const Word& w : s.words) a += action(alphabet, w);
  return a;
}

std::size_t filtration_level(const Sentence& s) { return s.words.size(); }

std::size_t letter_count(const Sentence& s) {
  std::size_t n = 0;
  for (const Word& w : s.words) n += w.size();
  return n;
}

std::string spell(const Alphabet& alphabet, const Word& w) {
  if (w.scalar()) return "1";
  std::string out;
  for (GenId g : w.letters) {
    if (!out.empty()) out += ' ';
    out += alphabet[g].name;
  }
  return out;
}

std::string spell(const Alphabet& alphabet, const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    if (i) out += "⊙";
    out += spell(alphabet, s.words[i]);
  }
  return out;
}

Word scalar_word() { return Word{}; }
Sentence unit_sentence() { return Sentence{{Word{}}}; }
Word letter_word(GenId g) { return Word{{g}}; }

void add_to(WordSum& target, const Word& w, const Coeff& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = target.emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) target.erase(it);
  }
}

void add_to(Element& target, const Sentence& s, const Coeff& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = target.emplace(s, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) target.erase(it);
  }
}

void add_to(Element& target, const Element& x, const Coeff& scale) {
  for (const auto& [s, c] : x) add_to(target, s, c * scale);
}

Element scaled(const Element& x, const Coeff& c) {
  Element out;
  add_to(out, x, c);
  return out;
}

Element negated(const Element& x) { return scaled(x, Coeff(-1)); }

Element difference(const Element& a, const Element& b) {
  Element out = a;
  add_to(out, b, Coeff(-1));
  return out;
}

template <class Map>
static std::size_t truncate_map(Map& x, const CoeffRing& ring) {
  std::size_t dropped = 0;
  for (auto it = x.begin(); it != x.end();) {
    dropped += ring.truncate(it->second);
    if (it->second.is_zero())
      it = x.erase(it);
    else
      ++it;
  }
  return dropped;
}

std::size_t truncate(Element& x, const CoeffRing& ring) { return truncate_map(x, ring); }
std::size_t truncate(WordSum& x, const CoeffRing& ring) { return truncate_map(x, ring); }

Element odot(const Alphabet& alphabet, const Element& a, const Element& b) {
  Element out;
  for (const auto& [sa, ca] : a) {
    for (const auto& [sb, cb] : b) {
      std::vector<Word> words = sa.words;
      words.insert(words.end(), sb.words.begin(), sb.words.end());
      auto cs = canonicalize_sentence(alphabet, std::move(words));
      if (cs.sign.value == 0) continue;
      add_to(out, cs.sentence, ca * cb * Coeff(cs.sign.value));
    }
  }
  return out;
}

Element single(const Sentence& s, const Coeff& c) {
  Element out;
  add_to(out, s, c);
  return out;
}

static std::string format_term(const Rational& c, const Monomial& m, const std::string& body, bool first) {
  std::string out;
  Rational a = abs(c);
  if (first)
    out += c < 0 ? "- " : "";
  else
    out += c < 0 ? " - " : " + ";
  std::string ms = m.str();
  if (a != 1) out += to_string(a) + " ";
  if (!ms.empty()) out += ms + " ";
  out += body;
  return out;
}

std::string format(const Alphabet& alphabet, const Element& x) {
  if (x.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [s, c] : x) {
    std::string body = spell(alphabet, s);
    for (const auto& [m, r] : c.terms()) {
      out += format_term(r, m, body, first);
      first = false;
    }
  }
  return out;
}

std::string format(const Alphabet& alphabet, const WordSum& x) {
  if (x.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : x) {
    std::string body = spell(alphabet, w);
    for (const auto& [m, r] : c.terms()) {
      out += format_term(r, m, body, first);
      first = false;
    }
  }
  return out;
}

}  // namespace blinfty
