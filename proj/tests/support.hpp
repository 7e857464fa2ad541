#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "blinfty/dsl.hpp"
#include "blinfty/tree_calculus.hpp"
#include "oracle.hpp"

namespace testing {

using namespace blinfty;

inline std::string source_path(const std::string& rel) { return std::string(BLINFTY_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline ModelSpec load_model(const std::string& rel) {
  ParseResult r = parse_model(slurp(source_path(rel)));
  if (!r.ok()) throw std::runtime_error(rel + ": " + r.diagnostics.front().render(rel));
  return std::move(*r.spec);
}

inline ModelSpec parse_text(const std::string& text) {
  ParseResult r = parse_model(text);
  if (!r.ok()) throw std::runtime_error(r.diagnostics.front().render("<text>"));
  return std::move(*r.spec);
}

// {p(a1 ... ak b) = 1}: torsion exactly k.
inline std::string ladder_text(std::size_t k) {
  std::string gens, input;
  for (std::size_t i = 1; i <= k; ++i) {
    gens += "a" + std::to_string(i) + " z2=0 q=2 action=1\n";
    input += "a" + std::to_string(i) + " ";
  }
  return "[model]\nname = ladder" + std::to_string(k) + "\nn = 4\naction_decreasing = true\n\n[generators]\n" +
         gens + "b z2=1 q=1 action=1\n\n[operators]\n" + input + "b -> 1\n";
}

inline AlphabetPtr alphabet(std::initializer_list<std::pair<const char*, int>> gens) {
  std::vector<Generator> v;
  for (const auto& [name, z2] : gens) {
    Generator g;
    g.name = name;
    g.z2 = z2;
    v.push_back(g);
  }
  return std::make_shared<Alphabet>(std::move(v));
}

inline Sentence sentence(const Alphabet& a, std::initializer_list<std::vector<std::string>> words) {
  std::vector<Word> ws;
  for (const auto& names : words) ws.push_back(canonicalize_word(a, names).word);
  return canonicalize_sentence(a, std::move(ws)).sentence;
}

inline Element element(const Alphabet& a, std::initializer_list<std::vector<std::string>> words, long c = 1) {
  return single(sentence(a, words), Coeff(c));
}

// ---- conversion to the oracle ----

inline oracle::OWord to_oracle(const Word& w) { return oracle::OWord(w.letters.begin(), w.letters.end()); }

inline oracle::OSentence to_oracle(const Sentence& s) {
  oracle::OSentence out;
  for (const auto& w : s.words) out.push_back(to_oracle(w));
  return out;
}

inline oracle::OElement to_oracle(const Element& x) {
  oracle::OElement out;
  for (const auto& [s, c] : x) out[to_oracle(s)] = c.scalar();
  return out;
}

inline oracle::Model to_oracle(const OperatorFamily& p) {
  oracle::Model m;
  for (const auto& g : p.alphabet().generators()) m.parity.push_back(g.z2);
  for (const auto& [in, row] : p.table())
    for (const auto& [out, c] : row) m.p[to_oracle(in)][to_oracle(out)] = c.scalar();
  return m;
}

inline oracle::OTerms to_oracle_at_unit(const WordSum& a) {
  oracle::OTerms out;
  for (const auto& [w, c] : a) out.emplace_back(to_oracle(w), c.at_unit());
  return out;
}

inline std::map<oracle::OWord, oracle::OWordSum> table_at_unit(const OperatorFamily& p) {
  std::map<oracle::OWord, oracle::OWordSum> out;
  for (const auto& [in, row] : p.table())
    for (const auto& [w, c] : row)
      if (c.at_unit() != 0) out[to_oracle(in)][to_oracle(w)] = c.at_unit();
  return out;
}

// ---- random models ----

inline Rational random_coeff(std::mt19937& rng) {
  static const long num[] = {-2, -1, 1, 2, 1, 3};
  static const long den[] = {1, 1, 1, 1, 2, 1};
  std::size_t i = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
  return Rational(num[i], den[i]);
}

inline std::vector<GenId> random_letters(std::mt19937& rng, std::size_t count, const std::vector<GenId>& pool) {
  std::vector<GenId> out;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  return out;
}

inline AlphabetPtr random_alphabet(std::mt19937& rng, std::size_t size, const std::string& prefix = "g") {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < size; ++i) {
    Generator g;
    g.name = prefix + std::to_string(i + 1);
    g.z2 = std::uniform_int_distribution<int>(0, 1)(rng);
    gens.push_back(g);
  }
  return std::make_shared<Alphabet>(std::move(gens));
}

// Parity-respecting entries with no other constraint (p̂∘p̂ need not vanish).
inline OperatorFamily random_family(std::mt19937& rng, std::size_t generators, std::size_t entries) {
  AlphabetPtr a = random_alphabet(rng, generators);
  OperatorFamily p(a);
  std::vector<GenId> all;
  for (std::size_t i = 0; i < a->size(); ++i) all.push_back(static_cast<GenId>(i));
  for (std::size_t e = 0, tries = 0; e < entries && tries < 200; ++tries) {
    auto in = random_letters(rng, std::uniform_int_distribution<std::size_t>(1, 3)(rng), all);
    auto out = random_letters(rng, std::uniform_int_distribution<std::size_t>(0, 2)(rng), all);
    auto ci = canonicalize_word(*a, in), co = canonicalize_word(*a, out);
    if (ci.sign.value == 0 || co.sign.value == 0) continue;
    if (parity(*a, co.word) != (parity(*a, ci.word) ^ 1)) continue;
    p.add(in, out, Coeff(random_coeff(rng)));
    ++e;
  }
  return p;
}

struct LayeredModel {
  OperatorFamily p;
  WordSum mc;
};

// Inputs drawn from X, outputs from Y, so every composite of two operations
// vanishes; the Maurer-Cartan element lives on M ⊂ X and no input lies in M
// entirely, so p̂(e^mc − 1) = 0 while p_mc differs from p.
inline LayeredModel layered_model(std::mt19937& rng) {
  std::size_t nx = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  std::size_t ny = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < nx + ny; ++i) {
    Generator g;
    g.name = (i < nx ? "x" : "y") + std::to_string(i < nx ? i + 1 : i - nx + 1);
    g.z2 = std::uniform_int_distribution<int>(0, 1)(rng);
    gens.push_back(g);
  }
  gens[0].z2 = 0;  // M = {x1} or {x1, x2}: at least one even letter for mc
  AlphabetPtr a = std::make_shared<Alphabet>(std::move(gens));
  std::vector<GenId> xs, ys, ms;
  for (std::size_t i = 0; i < nx; ++i) xs.push_back(static_cast<GenId>(i));
  for (std::size_t i = 0; i < ny; ++i) ys.push_back(static_cast<GenId>(nx + i));
  std::size_t nm = std::uniform_int_distribution<std::size_t>(1, nx - 1)(rng);
  for (std::size_t i = 0; i < nm; ++i) ms.push_back(static_cast<GenId>(i));
  auto in_m = [&](const std::vector<GenId>& w) {
    for (GenId g : w)
      if (g >= nm) return false;
    return true;
  };
  LayeredModel out{OperatorFamily(a), {}};
  std::size_t entries = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
  for (std::size_t e = 0, tries = 0; e < entries && tries < 400; ++tries) {
    auto in = random_letters(rng, std::uniform_int_distribution<std::size_t>(1, 3)(rng), xs);
    if (in_m(in)) continue;
    auto outw = random_letters(rng, std::uniform_int_distribution<std::size_t>(0, 2)(rng), ys);
    auto ci = canonicalize_word(*a, in), co = canonicalize_word(*a, outw);
    if (ci.sign.value == 0 || co.sign.value == 0) continue;
    if (parity(*a, co.word) != (parity(*a, ci.word) ^ 1)) continue;
    out.p.add(in, outw, Coeff(random_coeff(rng)));
    ++e;
  }
  std::size_t terms = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  for (std::size_t t = 0, tries = 0; t < terms && tries < 100; ++tries) {
    auto w = random_letters(rng, std::uniform_int_distribution<std::size_t>(1, 2)(rng), ms);
    auto cw = canonicalize_word(*a, w);
    if (cw.sign.value == 0 || parity(*a, cw.word) != 0) continue;
    Monomial m;
    m.energy = std::uniform_int_distribution<int>(1, 2)(rng);
    add_to(out.mc, cw.word, Coeff::monomial(random_coeff(rng), m));
    ++t;
  }
  return out;
}

}  // namespace testing
