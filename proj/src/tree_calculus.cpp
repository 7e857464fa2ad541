#include "blinfty/tree_calculus.hpp"

#include <algorithm>
#include <functional>

#include "blinfty/parallel.hpp"

namespace blinfty {

namespace {

std::vector<GenId> ids_of(const Alphabet& a, const std::vector<std::string>& names) {
  std::vector<GenId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(a.index(n));
  return out;
}

void insert_entry(std::map<Word, WordSum>& table, const Word& in, const Word& out, const Coeff& c) {
  auto& row = table[in];
  add_to(row, out, c);
  if (row.empty()) table.erase(in);
}

}  // namespace

OperatorFamily::OperatorFamily(AlphabetPtr alphabet, std::optional<int> q_dimension, bool action_decreasing)
    : alphabet_(std::move(alphabet)), q_dimension_(q_dimension), action_decreasing_(action_decreasing) {}

void OperatorFamily::check_entry(const Word& input, const Word& output) const {
  const Alphabet& a = *alphabet_;
  if (input.scalar()) throw ContractError("operator input must have at least one letter");
  Degree din = degree(a, input), dout = degree(a, output);
  if (dout.z2 != (din.z2 ^ 1))
    throw ContractError("degree violation: " + spell(a, input) + " -> " + spell(a, output) +
                        " does not raise the Z/2 degree by 1");
  if (q_dimension_ && din.q && dout.q) {
    long k = static_cast<long>(input.size());
    Rational want = *din.q - 2 * (*q_dimension_ - 3) * (k - 1) - 1;
    if (*dout.q != want)
      throw ContractError("degree violation: " + spell(a, input) + " -> " + spell(a, output) + " has Q-degree " +
                          to_string(*dout.q) + ", expected " + to_string(want));
  }
  if (action_decreasing_ && !(action(a, output) < action(a, input)))
    throw ContractError("action violation: " + spell(a, input) + " -> " + spell(a, output) +
                        " does not decrease action");
}

void OperatorFamily::add(std::span<const GenId> input, std::span<const GenId> output, const Coeff& c) {
  auto in = canonicalize_word(*alphabet_, input);
  auto out = canonicalize_word(*alphabet_, output);
  if (input.empty()) throw ContractError("operator input must have at least one letter");
  if (in.sign.value == 0 || out.sign.value == 0 || c.is_zero()) return;
  check_entry(in.word, out.word);
  insert_entry(table_, in.word, out.word, c * Coeff(in.sign.value * out.sign.value));
  max_arity_ = 0;
  max_output_ = 0;
  for (const auto& [w, row] : table_) {
    max_arity_ = std::max(max_arity_, w.size());
    for (const auto& [u, cu] : row) max_output_ = std::max(max_output_, u.size());
  }
}

void OperatorFamily::add(const std::vector<std::string>& input, const std::vector<std::string>& output,
                         const Coeff& c) {
  auto in = ids_of(*alphabet_, input);
  auto out = ids_of(*alphabet_, output);
  add(in, out, c);
}

const WordSum* OperatorFamily::lookup(const Word& input) const {
  auto it = table_.find(input);
  return it == table_.end() ? nullptr : &it->second;
}

bool OperatorFamily::has_constant_outputs() const {
  for (const auto& [w, row] : table_)
    if (row.count(Word{})) return true;
  return false;
}

MorphismFamily::MorphismFamily(AlphabetPtr source, AlphabetPtr target)
    : source_(std::move(source)), target_(std::move(target)) {}

void MorphismFamily::add(std::span<const GenId> input, std::span<const GenId> output, const Coeff& c) {
  if (input.empty()) throw ContractError("morphism input must have at least one letter");
  auto in = canonicalize_word(*source_, input);
  auto out = canonicalize_word(*target_, output);
  if (in.sign.value == 0 || out.sign.value == 0 || c.is_zero()) return;
  if (parity(*source_, in.word) != parity(*target_, out.word))
    throw ContractError("degree violation: morphism entry " + spell(*source_, in.word) + " -> " +
                        spell(*target_, out.word) + " is not of degree 0");
  insert_entry(table_, in.word, out.word, c * Coeff(in.sign.value * out.sign.value));
}

void MorphismFamily::add(const std::vector<std::string>& input, const std::vector<std::string>& output,
                         const Coeff& c) {
  auto in = ids_of(*source_, input);
  auto out = ids_of(*target_, output);
  add(in, out, c);
}

const WordSum* MorphismFamily::lookup(const Word& input) const {
  auto it = table_.find(input);
  return it == table_.end() ? nullptr : &it->second;
}

MorphismFamily identity_morphism(const AlphabetPtr& alphabet) {
  MorphismFamily phi(alphabet, alphabet);
  for (std::size_t g = 0; g < alphabet->size(); ++g) {
    GenId id = static_cast<GenId>(g);
    phi.add(std::span<const GenId>(&id, 1), std::span<const GenId>(&id, 1), Coeff(1));
  }
  return phi;
}

MorphismFamily make_augmentation(const AlphabetPtr& alphabet) {
  return MorphismFamily(alphabet, std::make_shared<Alphabet>());
}

OperatorFamily trivial_family() { return OperatorFamily(std::make_shared<Alphabet>()); }

WordSum hat_on_block(const OperatorFamily& p, std::span<const Word> words) {
  WordSum out;
  const std::size_t k = words.size();
  if (k == 0 || k > p.max_arity()) return out;
  const Alphabet& a = p.alphabet();
  std::vector<GenId> letters;
  std::vector<std::size_t> offset(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (words[j].scalar()) return out;  // scalars cannot be glued
    offset[j] = letters.size();
    letters.insert(letters.end(), words[j].letters.begin(), words[j].letters.end());
  }
  std::vector<bool> odd(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) odd[i] = a.odd(letters[i]);

  std::vector<std::size_t> pick(k, 0);
  std::vector<GenId> chosen(k);
  std::vector<std::size_t> order;
  std::vector<GenId> merged;
  for (;;) {
    for (std::size_t j = 0; j < k; ++j) chosen[j] = letters[offset[j] + pick[j]];
    auto cw = canonicalize_word(a, chosen);
    const WordSum* image = cw.sign.value ? p.lookup(cw.word) : nullptr;
    if (image) {
      order.clear();
      for (std::size_t j = 0; j < k; ++j) order.push_back(offset[j] + pick[j]);
      std::size_t next = 0;
      for (std::size_t i = 0; i < letters.size(); ++i) {
        if (next < k && order[next] == i) {
          ++next;
          continue;
        }
        order.push_back(i);
      }
      int sign = koszul_sign(order, odd).value * cw.sign.value;
      for (const auto& [u, c] : *image) {
        merged.assign(u.letters.begin(), u.letters.end());
        for (std::size_t i = k; i < order.size(); ++i) merged.push_back(letters[order[i]]);
        auto mw = canonicalize_word(a, merged);
        if (mw.sign.value == 0) continue;
        add_to(out, mw.word, c * Coeff(sign * mw.sign.value));
      }
    }
    std::size_t j = 0;
    while (j < k && ++pick[j] == words[j].size()) pick[j++] = 0;
    if (j == k) break;
  }
  return out;
}

Element assemble_hat(const OperatorFamily& p, const Sentence& s) {
  Element out;
  const Alphabet& a = p.alphabet();
  const std::size_t n = s.words.size();
  if (n >= 8 * sizeof(unsigned long)) throw std::invalid_argument("sentence too long");
  std::vector<bool> odd(n);
  for (std::size_t i = 0; i < n; ++i) odd[i] = parity(a, s.words[i]) != 0;
  std::vector<std::size_t> order;
  std::vector<Word> block;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountl(mask)) > p.max_arity()) continue;
    order.clear();
    block.clear();
    bool scalar = false;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        scalar = scalar || s.words[i].scalar();
        order.push_back(i);
        block.push_back(s.words[i]);
      }
    if (scalar) continue;
    WordSum glued = hat_on_block(p, block);
    if (glued.empty()) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (!(mask >> i & 1)) order.push_back(i);
    int shuffle_sign = koszul_sign(order, odd).value;
    for (const auto& [w, c] : glued) {
      std::vector<Word> words{w};
      for (std::size_t i = block.size(); i < n; ++i) words.push_back(s.words[order[i]]);
      auto cs = canonicalize_sentence(a, std::move(words));
      if (cs.sign.value == 0) continue;
      add_to(out, cs.sentence, c * Coeff(shuffle_sign * cs.sign.value));
    }
  }
  return out;
}

Element assemble_hat(const OperatorFamily& p, const Element& x, const CoeffRing& ring, TruncationLog* log) {
  Element out;
  for (const auto& [s, c] : x) add_to(out, assemble_hat(p, s), c);
  std::size_t dropped = truncate(out, ring);
  if (log) log->dropped += dropped;
  return out;
}

namespace {

// Enumerates the admissible partitions of the letters of one sentence into
// morphism blocks.  Components of the word/block incidence graph are tracked
// with a label per word; a block joining two words of one component would
// close a cycle and is rejected.
class ForestGluer {
 public:
  ForestGluer(const MorphismFamily& phi, const Sentence& s) : phi_(phi), s_(s) {
    const Alphabet& a = phi.source();
    for (std::size_t w = 0; w < s.words.size(); ++w)
      for (GenId g : s.words[w].letters) {
        letters_.push_back(g);
        word_of_.push_back(w);
        odd_.push_back(a.odd(g));
      }
    block_of_.assign(letters_.size(), -1);
  }

  Element run() {
    std::vector<std::size_t> comp(s_.words.size());
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = i;
    recurse(comp);
    return std::move(result_);
  }

 private:
  struct Block {
    std::vector<std::size_t> positions;
    int sign;
    const WordSum* image;
  };

  void recurse(const std::vector<std::size_t>& comp) {
    std::size_t first = 0;
    while (first < letters_.size() && block_of_[first] >= 0) ++first;
    if (first == letters_.size()) {
      finalize(comp);
      return;
    }
    std::vector<std::size_t> members{first};
    std::vector<bool> used_word(s_.words.size(), false);
    used_word[word_of_[first]] = true;
    extend(comp, members, used_word, first + 1);
  }

  void extend(const std::vector<std::size_t>& comp, std::vector<std::size_t>& members, std::vector<bool>& used_word,
              std::size_t from) {
    try_block(comp, members);
    for (std::size_t j = from; j < letters_.size(); ++j) {
      if (block_of_[j] >= 0 || used_word[word_of_[j]]) continue;
      members.push_back(j);
      used_word[word_of_[j]] = true;
      extend(comp, members, used_word, j + 1);
      used_word[word_of_[j]] = false;
      members.pop_back();
    }
  }

  void try_block(const std::vector<std::size_t>& comp, const std::vector<std::size_t>& members) {
    std::vector<GenId> in;
    for (std::size_t m : members) in.push_back(letters_[m]);
    auto cw = canonicalize_word(phi_.source(), in);
    if (cw.sign.value == 0) return;
    const WordSum* image = phi_.lookup(cw.word);
    if (!image) return;
    std::vector<std::size_t> labels;
    for (std::size_t m : members) labels.push_back(comp[word_of_[m]]);
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) return;  // would close a cycle
    std::vector<std::size_t> next = comp;
    for (auto& c : next)
      if (std::binary_search(labels.begin(), labels.end(), c)) c = labels.front();
    int id = static_cast<int>(blocks_.size());
    blocks_.push_back({members, cw.sign.value, image});
    for (std::size_t m : members) block_of_[m] = id;
    recurse(next);
    for (std::size_t m : members) block_of_[m] = -1;
    blocks_.pop_back();
  }

  void finalize(const std::vector<std::size_t>& comp) {
    // components ordered by their smallest word index
    std::vector<std::size_t> labels;
    for (std::size_t w = 0; w < comp.size(); ++w)
      if (std::find(labels.begin(), labels.end(), comp[w]) == labels.end()) labels.push_back(comp[w]);
    std::vector<std::vector<std::size_t>> comp_blocks(labels.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      std::size_t label = comp[word_of_[blocks_[b].positions.front()]];
      std::size_t ci = std::find(labels.begin(), labels.end(), label) - labels.begin();
      comp_blocks[ci].push_back(b);
    }
    std::vector<std::size_t> order;
    int sign = 1;
    for (const auto& bs : comp_blocks)
      for (std::size_t b : bs) {
        order.insert(order.end(), blocks_[b].positions.begin(), blocks_[b].positions.end());
        sign *= blocks_[b].sign;
      }
    sign *= koszul_sign(order, odd_).value;

    // expand the product of block images
    std::vector<std::pair<const Word*, const Coeff*>> pick(blocks_.size());
    std::function<void(std::size_t)> expand = [&](std::size_t b) {
      if (b == blocks_.size()) {
        Coeff c(sign);
        std::vector<Word> words;
        for (const auto& bs : comp_blocks) {
          std::vector<GenId> merged;
          for (std::size_t bi : bs) {
            merged.insert(merged.end(), pick[bi].first->letters.begin(), pick[bi].first->letters.end());
            c *= *pick[bi].second;
          }
          auto cw = canonicalize_word(phi_.target(), merged);
          if (cw.sign.value == 0) return;
          c *= Coeff(cw.sign.value);
          words.push_back(cw.word);
        }
        auto cs = canonicalize_sentence(phi_.target(), std::move(words));
        if (cs.sign.value == 0) return;
        add_to(result_, cs.sentence, c * Coeff(cs.sign.value));
        return;
      }
      for (const auto& [w, c] : *blocks_[b].image) {
        pick[b] = {&w, &c};
        expand(b + 1);
      }
    };
    expand(0);
  }

  const MorphismFamily& phi_;
  const Sentence& s_;
  std::vector<GenId> letters_;
  std::vector<std::size_t> word_of_;
  std::vector<bool> odd_;
  std::vector<int> block_of_;
  std::vector<Block> blocks_;
  Element result_;
};

}  // namespace

Element assemble_morphism(const MorphismFamily& phi, const Sentence& s) { return ForestGluer(phi, s).run(); }

Element assemble_morphism(const MorphismFamily& phi, const Element& x, const CoeffRing& ring, TruncationLog* log) {
  Element out;
  for (const auto& [s, c] : x) add_to(out, assemble_morphism(phi, s), c);
  std::size_t dropped = truncate(out, ring);
  if (log) log->dropped += dropped;
  return out;
}

std::vector<Word> words_up_to(const Alphabet& alphabet, std::size_t max_letters) {
  std::vector<Word> out;
  Word cur;
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    out.push_back(cur);
    if (cur.size() == max_letters) return;
    for (std::size_t g = from; g < alphabet.size(); ++g) {
      cur.letters.push_back(static_cast<GenId>(g));
      grow(alphabet.odd(static_cast<GenId>(g)) ? g + 1 : g);
      cur.letters.pop_back();
    }
  };
  grow(0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Sentence> spanning_sentences(const Alphabet& alphabet, const TruncationPolicy& t) {
  std::vector<Word> words = words_up_to(alphabet, t.max_letters);
  std::vector<bool> odd(words.size());
  std::vector<Rational> act(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    odd[i] = parity(alphabet, words[i]) != 0;
    act[i] = action(alphabet, words[i]);
  }
  std::vector<Sentence> out;
  Sentence cur;
  std::function<void(std::size_t, std::size_t, const Rational&)> grow = [&](std::size_t from, std::size_t letters,
                                                                            const Rational& total) {
    if (!cur.words.empty()) out.push_back(cur);
    if (cur.words.size() == t.max_words) return;
    for (std::size_t i = from; i < words.size(); ++i) {
      if (letters + words[i].size() > t.max_letters) continue;
      Rational next_total = total + act[i];
      if (t.max_action && next_total > *t.max_action) continue;
      cur.words.push_back(words[i]);
      grow(odd[i] ? i + 1 : i, letters + words[i].size(), next_total);
      cur.words.pop_back();
    }
  };
  grow(0, 0, Rational(0));
  std::sort(out.begin(), out.end());
  return out;
}

std::string Report::render(const Alphabet& input_alphabet, const Alphabet& residual_alphabet) const {
  std::string out = subject + ": " + std::to_string(checked) + " sentences checked";
  if (dropped) out += ", " + std::to_string(dropped) + " coefficient terms beyond the truncation order dropped";
  out += "\n";
  if (ok) return out;
  out += "failures: " + std::to_string(failures.size()) + "\n";
  for (const auto& f : failures)
    out += "  at " + spell(input_alphabet, f.input) + ": residual " + format(residual_alphabet, f.residual) + "\n";
  return out;
}

namespace {

Report collect(std::string subject, const std::vector<Sentence>& inputs, std::vector<Element>& residuals,
               std::vector<std::size_t>& dropped) {
  Report r;
  r.subject = std::move(subject);
  r.checked = inputs.size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    r.dropped += dropped[i];
    if (!residuals[i].empty()) r.failures.push_back({inputs[i], std::move(residuals[i])});
  }
  r.ok = r.failures.empty();
  return r;
}

}  // namespace

Report verify_blinfty(const OperatorFamily& p, const TruncationPolicy& t, unsigned threads) {
  auto inputs = spanning_sentences(p.alphabet(), t);
  std::vector<Element> residuals(inputs.size());
  std::vector<std::size_t> dropped(inputs.size(), 0);
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    TruncationLog log;
    Element once = assemble_hat(p, single(inputs[i]), t.ring, &log);
    residuals[i] = assemble_hat(p, once, t.ring, &log);
    dropped[i] = log.dropped;
  });
  return collect("p̂∘p̂", inputs, residuals, dropped);
}

Report verify_morphism(const MorphismFamily& phi, const OperatorFamily& p, const OperatorFamily& p_target,
                       const TruncationPolicy& t, unsigned threads) {
  auto inputs = spanning_sentences(p.alphabet(), t);
  std::vector<Element> residuals(inputs.size());
  std::vector<std::size_t> dropped(inputs.size(), 0);
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    TruncationLog log;
    Element x = single(inputs[i]);
    Element lhs = assemble_morphism(phi, assemble_hat(p, x, t.ring, &log), t.ring, &log);
    Element rhs = assemble_hat(p_target, assemble_morphism(phi, x, t.ring, &log), t.ring, &log);
    residuals[i] = difference(lhs, rhs);
    dropped[i] = log.dropped;
  });
  return collect("φ̂∘p̂ − p̂′∘φ̂", inputs, residuals, dropped);
}

AugmentationValue apply_augmentation(const MorphismFamily& eps, const Element& x) {
  AugmentationValue v;
  v.image = assemble_morphism(eps, x);
  for (const auto& [s, c] : v.image) v.value += c;
  return v;
}

MorphismFamily compose(const MorphismFamily& phi, const MorphismFamily& psi, std::size_t max_input_letters) {
  MorphismFamily out(psi.source_ptr(), phi.target_ptr());
  for (const Word& v : words_up_to(psi.source(), max_input_letters)) {
    if (v.scalar()) continue;
    Sentence s;
    for (GenId g : v.letters) s.words.push_back(letter_word(g));
    Element y = assemble_morphism(phi, assemble_morphism(psi, s));
    for (const auto& [t, c] : y)
      if (t.words.size() == 1) out.add(v.letters, t.words[0].letters, c);
  }
  return out;
}

}  // namespace blinfty
