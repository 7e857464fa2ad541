#pragma once

// Reference p̂ built from the recursive Leibniz rule and the shuffle sum.
// Letters are generator indices and words are normalized by bubble sort with
// an explicit sign per transposition.  Shares no code with the library.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;
using OWord = std::vector<int>;
using OSentence = std::vector<OWord>;
using OWordSum = std::map<OWord, Q>;
using OElement = std::map<OSentence, Q>;

struct Model {
  std::vector<int> parity;               // per generator
  std::map<OWord, OWordSum> p;           // normalized input -> outputs
};

inline int word_parity(const Model& m, const OWord& w) {
  int s = 0;
  for (int g : w) s += m.parity[g];
  return s & 1;
}

inline bool word_less(const OWord& a, const OWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Returns the sign (0 when an odd letter repeats).
inline int bubble_word(const Model& m, OWord& w) {
  int sign = 1;
  for (std::size_t pass = 0; pass < w.size(); ++pass)
    for (std::size_t j = 0; j + 1 < w.size(); ++j)
      if (w[j] > w[j + 1]) {
        if (m.parity[w[j]] && m.parity[w[j + 1]]) sign = -sign;
        std::swap(w[j], w[j + 1]);
      }
  for (std::size_t j = 0; j + 1 < w.size(); ++j)
    if (w[j] == w[j + 1] && m.parity[w[j]]) return 0;
  return sign;
}

inline int bubble_sentence(const Model& m, OSentence& s) {
  int sign = 1;
  for (std::size_t pass = 0; pass < s.size(); ++pass)
    for (std::size_t j = 0; j + 1 < s.size(); ++j)
      if (word_less(s[j + 1], s[j])) {
        if (word_parity(m, s[j]) && word_parity(m, s[j + 1])) sign = -sign;
        std::swap(s[j], s[j + 1]);
      }
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    if (s[j] == s[j + 1] && word_parity(m, s[j])) return 0;
  return sign;
}

// (-1)^{number of odd pairs (i<j) with i unselected and j selected}
inline int front_sign(const std::vector<int>& parities, const std::vector<bool>& selected) {
  int count = 0;
  for (std::size_t j = 0; j < parities.size(); ++j) {
    if (!selected[j] || !parities[j]) continue;
    for (std::size_t i = 0; i < j; ++i)
      if (!selected[i] && parities[i]) ++count;
  }
  return count % 2 ? -1 : 1;
}

inline void add(OElement& x, OSentence s, const Q& c) {
  if (c == 0) return;
  Q& slot = x[s];
  slot += c;
  if (slot == 0) x.erase(s);
}

// p̂^k on k words by the Leibniz rule: expand the first word with more than
// one letter, recurse until every argument is a single letter, then look up p.
inline OWordSum hat_block(const Model& m, const std::vector<OWord>& words) {
  OWordSum out;
  for (const auto& w : words)
    if (w.empty()) return out;
  std::size_t i = 0;
  while (i < words.size() && words[i].size() == 1) ++i;
  if (i == words.size()) {
    OWord in;
    for (const auto& w : words) in.push_back(w[0]);
    const int sign = bubble_word(m, in);
    if (sign == 0) return out;
    auto it = m.p.find(in);
    if (it == m.p.end()) return out;
    for (const auto& [u, c] : it->second) out[u] += c * sign;
    return out;
  }
  const OWord& w = words[i];
  int before_words = 0, after_words = 0;
  for (std::size_t s = 0; s < i; ++s) before_words += word_parity(m, words[s]);
  for (std::size_t s = i + 1; s < words.size(); ++s) after_words += word_parity(m, words[s]);
  for (std::size_t j = 0; j < w.size(); ++j) {
    int before = 0, after = 0;
    for (std::size_t t = 0; t < j; ++t) before += m.parity[w[t]];
    for (std::size_t t = j + 1; t < w.size(); ++t) after += m.parity[w[t]];
    const int box = before_words * before + before + after_words * after;
    std::vector<OWord> sub = words;
    sub[i] = OWord{w[j]};
    for (const auto& [u, c] : hat_block(m, sub)) {
      OWord merged(w.begin(), w.begin() + j);
      merged.insert(merged.end(), u.begin(), u.end());
      merged.insert(merged.end(), w.begin() + j + 1, w.end());
      const int sign = bubble_word(m, merged);
      if (sign == 0) continue;
      out[merged] += c * sign * (box % 2 ? -1 : 1);
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

// p̂ on one sentence: shuffle each subset of words to the front.
inline OElement hat(const Model& m, const OSentence& s) {
  OElement out;
  const std::size_t k = s.size();
  std::vector<int> wpar(k);
  for (std::size_t i = 0; i < k; ++i) wpar[i] = word_parity(m, s[i]);
  for (std::uint32_t wmask = 1; wmask < (1u << k); ++wmask) {
    std::vector<bool> wsel(k);
    std::vector<OWord> chosen;
    OSentence rest;
    for (std::size_t i = 0; i < k; ++i) {
      wsel[i] = (wmask >> i) & 1u;
      if (wsel[i])
        chosen.push_back(s[i]);
      else
        rest.push_back(s[i]);
    }
    const int diamond = front_sign(wpar, wsel);
    for (const auto& [u, c] : hat_block(m, chosen)) {
      OSentence sent{u};
      sent.insert(sent.end(), rest.begin(), rest.end());
      const int sign = bubble_sentence(m, sent);
      if (sign == 0) continue;
      add(out, sent, c * diamond * sign);
    }
  }
  return out;
}

inline OElement hat(const Model& m, const OElement& x) {
  OElement out;
  for (const auto& [s, c] : x)
    for (const auto& [t, d] : hat(m, s)) add(out, t, c * d);
  return out;
}

// ---- truncated homology by brute force ----

// All canonical sentences with at most k words and n letters in total.
inline std::vector<OSentence> sentences(const Model& m, std::size_t k, std::size_t n) {
  std::vector<OWord> words{OWord{}};
  for (std::size_t len = 1; len <= n; ++len) {
    std::vector<OWord> next;
    for (const auto& w : words) {
      if (w.size() != len - 1) continue;
      const int start = w.empty() ? 0 : w.back();
      for (int g = start; g < static_cast<int>(m.parity.size()); ++g) {
        if (!w.empty() && g == w.back() && m.parity[g]) continue;
        OWord v = w;
        v.push_back(g);
        next.push_back(v);
      }
    }
    words.insert(words.end(), next.begin(), next.end());
  }
  std::sort(words.begin(), words.end(), word_less);
  std::vector<OSentence> out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t from, std::size_t letters) {
    if (!pick.empty()) {
      OSentence s;
      for (std::size_t i : pick) s.push_back(words[i]);
      out.push_back(s);
    }
    if (pick.size() == k) return;
    for (std::size_t i = from; i < words.size(); ++i) {
      if (letters + words[i].size() > n) continue;
      if (!pick.empty() && pick.back() == i && word_parity(m, words[i])) continue;
      pick.push_back(i);
      grow(i, letters + words[i].size());
      pick.pop_back();
    }
  };
  grow(0, 0);
  return out;
}

// Echelon basis keyed by pivot; reduce() returns the remainder.
struct Span {
  std::map<OSentence, OElement> rows;
  OElement reduce(OElement v) const {
    while (!v.empty()) {
      auto lead = v.rbegin();
      auto it = rows.find(lead->first);
      if (it == rows.end()) break;
      const Q f = lead->second / it->second.at(lead->first);
      for (const auto& [s, c] : it->second) add(v, s, -f * c);
    }
    return v;
  }
  bool insert(const OElement& v) {
    OElement r = reduce(v);
    if (r.empty()) return false;
    rows[r.rbegin()->first] = r;
    return true;
  }
};

// Whether the unit 1 is p̂ of something built from at most k words and n letters.
inline bool unit_bounded(const Model& m, std::size_t k, std::size_t n) {
  Span image;
  for (const auto& s : sentences(m, k, n)) image.insert(hat(m, s));
  OElement unit;
  unit[OSentence{OWord{}}] = 1;
  return image.reduce(unit).empty();
}

// Smallest j < k_max with the unit bounded at level j + 1; k_max if none.
inline std::size_t torsion(const Model& m, std::size_t k_max, std::size_t n) {
  for (std::size_t j = 0; j < k_max; ++j)
    if (unit_bounded(m, j + 1, n)) return j;
  return k_max;
}

// ---- deformation at T = 1 ----

using OTerms = std::vector<std::pair<OWord, Q>>;

// p_a(v) = full gluings of v1⊙…⊙vk⊙e^a, expanding e^a over multisets of the
// even terms of a with weight Π c^n / n!.
inline std::map<OWord, OWordSum> deform(const Model& m, const OTerms& a, std::size_t arity) {
  std::map<OWord, OWordSum> out;
  std::vector<OWord> inputs{OWord{}};
  for (std::size_t len = 1; len <= arity; ++len)
    for (const auto& w : std::vector<OWord>(inputs))
      if (w.size() == len - 1)
        for (int g = w.empty() ? 0 : w.back(); g < static_cast<int>(m.parity.size()); ++g) {
          if (!w.empty() && g == w.back() && m.parity[g]) continue;
          OWord v = w;
          v.push_back(g);
          inputs.push_back(v);
        }
  std::vector<std::size_t> counts(a.size(), 0);
  for (const auto& v : inputs) {
    if (v.empty()) continue;
    OWordSum entry;
    std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t i, std::size_t used) {
      if (i == a.size()) {
        OSentence s;
        for (int g : v) s.push_back(OWord{g});
        Q weight = 1;
        for (std::size_t t = 0; t < a.size(); ++t)
          for (std::size_t r = 1; r <= counts[t]; ++r) {
            s.push_back(a[t].first);
            weight *= a[t].second / Q(static_cast<long>(r));
          }
        for (const auto& [sent, c] : hat(m, s))
          if (sent.size() == 1) entry[sent[0]] += c * weight;
        return;
      }
      for (std::size_t n = 0; used + n <= arity; ++n) {
        counts[i] = n;
        grow(i + 1, used + n);
      }
      counts[i] = 0;
    };
    grow(0, v.size());
    for (auto it = entry.begin(); it != entry.end();) it = it->second == 0 ? entry.erase(it) : std::next(it);
    if (!entry.empty()) out[v] = entry;
  }
  return out;
}

}  // namespace oracle
