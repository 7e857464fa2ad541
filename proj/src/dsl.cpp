#include "blinfty/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace blinfty {

namespace {

const std::string kOdot = "\xE2\x8A\x99";

struct Token {
  std::string text;
  int col = 1;
};

struct SourceLine {
  int number = 0;
  std::string raw;
  std::string content;  // comment stripped
};

struct Section {
  std::string name;
  int line = 0;
  std::string raw;
  std::vector<SourceLine> body;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

int first_col(const std::string& s, std::size_t from = 0) {
  std::size_t i = from;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return static_cast<int>(i) + 1;
}

bool is_separator(const std::string& t) { return t == kOdot || t == "|"; }

std::vector<Token> tokenize(const std::string& s, std::size_t from = 0, std::size_t to = std::string::npos) {
  std::vector<Token> out;
  if (to > s.size()) to = s.size();
  std::size_t i = from;
  auto special = [&](std::size_t j) {
    return s[j] == '|' || s.compare(j, 3, kOdot) == 0 || s.compare(j, 2, "->") == 0;
  };
  while (i < to) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    int col = static_cast<int>(i) + 1;
    if (s.compare(i, 3, kOdot) == 0) {
      out.push_back({kOdot, col});
      i += 3;
    } else if (s[i] == '|') {
      out.push_back({"|", col});
      ++i;
    } else if (s.compare(i, 2, "->") == 0) {
      out.push_back({"->", col});
      i += 2;
    } else {
      std::size_t j = i;
      while (j < to && !std::isspace(static_cast<unsigned char>(s[j])) && !special(j)) ++j;
      out.push_back({s.substr(i, j - i), col});
      i = j;
    }
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'')) return false;
  return true;
}

bool is_reserved(const std::string& s) {
  if (s == "T" || s == "G") return true;
  if (s.size() >= 2 && s[0] == 't' &&
      std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return true;
  return false;
}

std::optional<Rational> number(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::optional<long> integer(const std::string& s) {
  auto r = number(s);
  if (!r || r->get_den() != 1 || !r->get_num().fits_slong_p()) return std::nullopt;
  return r->get_num().get_si();
}

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

class Ctx {
 public:
  std::vector<Diagnostic> diags;

  void error(const char* code, std::string message, int line, int col, const std::string& raw) {
    Diagnostic d;
    d.code = code;
    d.message = std::move(message);
    d.line = line;
    d.column = col;
    d.excerpt = raw;
    diags.push_back(std::move(d));
  }
  void error(const char* code, std::string message, const SourceLine& l, int col) {
    error(code, std::move(message), l.number, col, l.raw);
  }
  bool failed() const { return !diags.empty(); }
};

struct KeyValue {
  std::string key, value;
  int key_col = 1, value_col = 1;
};

std::optional<KeyValue> split_key_value(const SourceLine& l, Ctx& ctx) {
  auto eq = l.content.find('=');
  if (eq == std::string::npos) {
    ctx.error(diag::Syntax, "expected 'key = value'", l, first_col(l.content));
    return std::nullopt;
  }
  KeyValue kv;
  kv.key = trim(std::string_view(l.content).substr(0, eq));
  kv.value = trim(std::string_view(l.content).substr(eq + 1));
  kv.key_col = first_col(l.content);
  kv.value_col = first_col(l.content, eq + 1);
  if (kv.key.empty() || kv.value.empty()) {
    ctx.error(diag::Syntax, "expected 'key = value'", l, kv.key.empty() ? kv.key_col : kv.value_col);
    return std::nullopt;
  }
  return kv;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// ---- expressions ----

struct RawTerm {
  Coeff coeff;
  std::vector<std::vector<GenId>> words;
};

bool parse_monomial_marker(const Token& t, Monomial& m, CoeffKind kind, const SourceLine& l, Ctx& ctx, bool& ok) {
  const std::string& s = t.text;
  if (s.rfind("T^", 0) == 0) {
    if (kind == CoeffKind::Rational) {
      ctx.error(diag::InvalidValue, "Novikov exponent needs coefficients = novikov or group", l, t.col);
      ok = false;
      return true;
    }
    auto r = number(s.substr(2));
    if (!r) {
      ctx.error(diag::InvalidValue, "invalid exponent in '" + s + "'", l, t.col);
      ok = false;
      return true;
    }
    m.energy += *r;
    return true;
  }
  if (s.rfind("G^", 0) == 0) {
    if (kind != CoeffKind::Group) {
      ctx.error(diag::InvalidValue, "group exponent needs coefficients = group", l, t.col);
      ok = false;
      return true;
    }
    if (s.size() < 5 || s[2] != '(' || s.back() != ')') {
      ctx.error(diag::Syntax, "expected G^(e1,...,er)", l, t.col);
      ok = false;
      return true;
    }
    auto parts = split_list(s.substr(3, s.size() - 4));
    if (m.group.size() < parts.size()) m.group.resize(parts.size(), 0);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto v = integer(parts[i]);
      if (!v) {
        ctx.error(diag::InvalidValue, "group exponents must be integers", l, t.col);
        ok = false;
        return true;
      }
      m.group[i] += *v;
    }
    return true;
  }
  if (s.size() >= 2 && s[0] == 't' && std::isdigit(static_cast<unsigned char>(s[1]))) {
    std::size_t caret = s.find('^');
    auto idx = integer(s.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
    long e = 1;
    if (caret != std::string::npos) {
      auto v = integer(s.substr(caret + 1));
      if (!v || *v < 0) {
        ctx.error(diag::InvalidValue, "invalid weight exponent in '" + s + "'", l, t.col);
        ok = false;
        return true;
      }
      e = *v;
    }
    if (!idx || *idx < 1 || *idx > 64) {
      ctx.error(diag::InvalidValue, "weight variables are t1 ... t64", l, t.col);
      ok = false;
      return true;
    }
    if (m.weights.size() < std::size_t(*idx)) m.weights.resize(*idx, 0);
    m.weights[*idx - 1] += static_cast<int>(e);
    return true;
  }
  return false;
}

bool parse_term(const Alphabet& alphabet, const std::vector<Token>& t, CoeffKind kind, bool allow_sentences,
                const SourceLine& l, Ctx& ctx, RawTerm& out) {
  std::size_t i = 0;
  Rational c = 1;
  if (looks_numeric(t[0].text) && (t.size() == 1 || !is_separator(t[1].text))) {
    auto r = number(t[0].text);
    if (!r) {
      ctx.error(diag::InvalidValue, "invalid number '" + t[0].text + "'", l, t[0].col);
      return false;
    }
    c = *r;
    i = 1;
  }
  Monomial m;
  bool ok = true;
  while (i < t.size() && parse_monomial_marker(t[i], m, kind, l, ctx, ok)) ++i;
  if (!ok) return false;
  m.trim();
  out.coeff = Coeff::monomial(c, m);
  out.words.clear();
  if (i == t.size()) {
    out.words.push_back({});
    return true;
  }
  std::vector<GenId> cur;
  bool scalar = false;
  std::size_t in_word = 0;
  auto close = [&](int col) {
    if (in_word == 0) {
      ctx.error(diag::Syntax, "empty word", l, col);
      return false;
    }
    out.words.push_back(scalar ? std::vector<GenId>{} : cur);
    cur.clear();
    scalar = false;
    in_word = 0;
    return true;
  };
  for (; i < t.size(); ++i) {
    const Token& tok = t[i];
    if (is_separator(tok.text)) {
      if (!allow_sentences) {
        ctx.error(diag::Syntax, "a product of words is not allowed here", l, tok.col);
        return false;
      }
      if (!close(tok.col)) return false;
      continue;
    }
    if (tok.text == "1") {
      if (in_word != 0) {
        ctx.error(diag::Syntax, "the scalar word 1 must stand alone", l, tok.col);
        return false;
      }
      scalar = true;
      ++in_word;
      continue;
    }
    if (scalar) {
      ctx.error(diag::Syntax, "the scalar word 1 must stand alone", l, tok.col);
      return false;
    }
    if (looks_numeric(tok.text)) {
      ctx.error(diag::Syntax, "unexpected number '" + tok.text + "'", l, tok.col);
      return false;
    }
    if (tok.text == "->" || tok.text.find('=') != std::string::npos) {
      ctx.error(diag::Syntax, "unexpected '" + tok.text + "'", l, tok.col);
      return false;
    }
    auto id = alphabet.find(tok.text);
    if (!id) {
      ctx.error(diag::UnknownGenerator, "unknown generator '" + tok.text + "'", l, tok.col);
      return false;
    }
    cur.push_back(*id);
    ++in_word;
  }
  return close(t.back().col);
}

// Terms are separated by standalone + and - tokens.
bool parse_expr(const Alphabet& alphabet, const std::vector<Token>& toks, std::size_t begin, CoeffKind kind,
                bool allow_sentences, const SourceLine& l, Ctx& ctx, std::vector<RawTerm>& out) {
  int sign = 1;
  std::vector<Token> cur;
  bool any = false;
  auto flush = [&](int col) {
    if (cur.empty()) {
      ctx.error(diag::Syntax, "expected a term", l, col);
      return false;
    }
    RawTerm term;
    if (!parse_term(alphabet, cur, kind, allow_sentences, l, ctx, term)) return false;
    if (sign < 0) term.coeff = -term.coeff;
    out.push_back(std::move(term));
    cur.clear();
    sign = 1;
    any = true;
    return true;
  };
  bool pending_sign = false;
  for (std::size_t i = begin; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.text == "+" || t.text == "-") {
      if (!cur.empty() && !flush(t.col)) return false;
      if (t.text == "-") sign = -sign;
      pending_sign = true;
      continue;
    }
    pending_sign = false;
    cur.push_back(t);
  }
  int end_col = toks.empty() ? 1 : toks.back().col;
  if (!cur.empty()) return flush(end_col);
  if (pending_sign || !any) {
    ctx.error(diag::Syntax, "expected a term", l, begin < toks.size() ? toks.back().col + 1 : int(l.raw.size()) + 1);
    return false;
  }
  return true;
}

WordSum to_word_sum(const Alphabet& alphabet, const std::vector<RawTerm>& terms) {
  WordSum out;
  for (const auto& t : terms) {
    auto cw = canonicalize_word(alphabet, t.words.front());
    if (cw.sign.value == 0) continue;
    add_to(out, cw.word, t.coeff * Coeff(cw.sign.value));
  }
  return out;
}

Element to_element(const Alphabet& alphabet, const std::vector<RawTerm>& terms) {
  Element out;
  for (const auto& t : terms) {
    int sign = 1;
    std::vector<Word> words;
    for (const auto& w : t.words) {
      auto cw = canonicalize_word(alphabet, w);
      sign *= cw.sign.value;
      words.push_back(cw.word);
    }
    if (sign == 0) continue;
    auto cs = canonicalize_sentence(alphabet, std::move(words));
    if (cs.sign.value == 0) continue;
    add_to(out, cs.sentence, t.coeff * Coeff(sign * cs.sign.value));
  }
  return out;
}

// ---- section splitting ----

std::vector<Section> split_sections(std::string_view text, Ctx& ctx, bool& stray) {
  std::vector<Section> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  stray = false;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    SourceLine l{number, raw, raw.substr(0, raw.find('#'))};
    std::string t = trim(l.content);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        ctx.error(diag::Syntax, "unterminated section header", l, first_col(l.content));
        continue;
      }
      out.push_back({trim(t.substr(1, t.size() - 2)), number, raw, {}});
      continue;
    }
    if (out.empty()) {
      ctx.error(diag::Syntax, "content outside a section", l, first_col(l.content));
      stray = true;
      continue;
    }
    out.back().body.push_back(std::move(l));
  }
  return out;
}

const Section* find_section(const std::vector<Section>& sections, const std::string& name) {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

void check_sections(const std::vector<Section>& sections, const std::set<std::string>& known, Ctx& ctx) {
  std::set<std::string> seen;
  for (const auto& s : sections) {
    SourceLine l{s.line, s.raw, s.raw};
    if (!known.count(s.name)) {
      ctx.error(diag::UnknownSection, "unknown section [" + s.name + "]", l, first_col(s.raw));
      continue;
    }
    if (!seen.insert(s.name).second)
      ctx.error(diag::DuplicateSection, "section [" + s.name + "] appears twice", l, first_col(s.raw));
  }
}

// ---- individual sections ----

void parse_model_section(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  for (const auto& l : sec.body) {
    auto kv = split_key_value(l, ctx);
    if (!kv) continue;
    const std::string& v = kv->value;
    auto bad = [&](const std::string& what) { ctx.error(diag::InvalidValue, what, l, kv->value_col); };
    if (kv->key == "name") {
      spec.name = v;
    } else if (kv->key == "n") {
      auto n = integer(v);
      if (!n || *n < 1 || *n > 1000)
        bad("n must be a positive integer");
      else
        spec.n = static_cast<int>(*n);
    } else if (kv->key == "gradings") {
      if (v == "coupled")
        spec.independent_gradings = false;
      else if (v == "independent")
        spec.independent_gradings = true;
      else
        bad("gradings must be 'coupled' or 'independent'");
    } else if (kv->key == "action_decreasing") {
      if (v == "true")
        spec.action_decreasing = true;
      else if (v == "false")
        spec.action_decreasing = false;
      else
        bad("action_decreasing must be 'true' or 'false'");
    } else if (kv->key == "coefficients") {
      if (v == "rational")
        spec.coefficients = CoeffKind::Rational;
      else if (v == "novikov")
        spec.coefficients = CoeffKind::Novikov;
      else if (v == "group")
        spec.coefficients = CoeffKind::Group;
      else
        bad("coefficients must be 'rational', 'novikov' or 'group'");
    } else if (kv->key == "novikov_order") {
      auto r = number(v);
      if (!r || *r < 0)
        bad("novikov_order must be a non-negative rational");
      else
        spec.novikov_order = *r;
    } else if (kv->key == "pairing") {
      spec.pairing.clear();
      for (const auto& t : tokenize(v)) {
        auto r = number(t.text);
        if (!r) {
          bad("pairing must be a list of rationals");
          break;
        }
        spec.pairing.push_back(*r);
      }
    } else {
      ctx.error(diag::UnknownKey, "unknown key '" + kv->key + "' in [model]", l, kv->key_col);
    }
  }
}

std::vector<Generator> parse_generators(const Section& sec, const ModelSpec& spec, Ctx& ctx) {
  std::vector<Generator> gens;
  std::set<std::string> names;
  for (const auto& l : sec.body) {
    auto toks = tokenize(l.content);
    const Token& nt = toks.front();
    if (!is_identifier(nt.text)) {
      ctx.error(diag::Syntax, "invalid generator name '" + nt.text + "'", l, nt.col);
      continue;
    }
    if (is_reserved(nt.text)) {
      ctx.error(diag::ReservedName, "generator name '" + nt.text + "' is reserved for coefficients", l, nt.col);
      continue;
    }
    if (!names.insert(nt.text).second) {
      ctx.error(diag::DuplicateName, "duplicate generator '" + nt.text + "'", l, nt.col);
      continue;
    }
    Generator g;
    g.name = nt.text;
    bool ok = true, has_z2 = false;
    int z2_col = nt.col;
    for (std::size_t i = 1; i < toks.size() && ok; ++i) {
      const Token& t = toks[i];
      auto eq = t.text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size()) {
        ctx.error(diag::Syntax, "expected attribute=value, got '" + t.text + "'", l, t.col);
        ok = false;
        break;
      }
      std::string key = t.text.substr(0, eq), val = t.text.substr(eq + 1);
      int vcol = t.col + static_cast<int>(eq) + 1;
      auto bad = [&](const std::string& what) {
        ctx.error(diag::InvalidValue, what, l, vcol);
        ok = false;
      };
      if (key == "z2") {
        auto v = integer(val);
        if (!v || (*v != 0 && *v != 1))
          bad("z2 must be 0 or 1");
        else
          g.z2 = static_cast<int>(*v), has_z2 = true, z2_col = vcol;
      } else if (key == "q" || key == "action" || key == "cz" || key == "multiplicity") {
        auto r = number(val);
        if (!r) {
          bad("invalid number '" + val + "'");
        } else if (key == "q") {
          g.q = *r;
        } else if (key == "action") {
          if (*r <= 0)
            bad("action must be positive");
          else
            g.action = *r;
        } else if (key == "cz") {
          g.cz = *r;
        } else {
          if (*r <= 0)
            bad("multiplicity must be positive");
          else
            g.multiplicity = *r;
        }
      } else if (key == "label") {
        for (const auto& part : split_list(val)) {
          auto v = integer(part);
          if (!v) {
            bad("label must be a comma-separated list of integers");
            break;
          }
          g.label.push_back(*v);
        }
      } else if (key == "flags") {
        for (const auto& part : split_list(val)) {
          if (!is_identifier(part)) {
            bad("invalid flag '" + part + "'");
            break;
          }
          g.flags.push_back(part);
        }
      } else {
        ctx.error(diag::UnknownKey, "unknown generator attribute '" + key + "'", l, t.col);
        ok = false;
      }
    }
    if (!ok) continue;
    if (g.q && !spec.independent_gradings) {
      if (g.q->get_den() != 1) {
        ctx.error(diag::DegreeViolation, "non-integral degree needs gradings = independent", l, nt.col);
        continue;
      }
      int parity = mpz_odd_p(g.q->get_num_mpz_t()) ? 1 : 0;
      if (!has_z2) {
        g.z2 = parity;
      } else if (g.z2 != parity) {
        ctx.error(diag::DegreeViolation,
                  "degree violation: z2=" + std::to_string(g.z2) + " disagrees with q=" + to_string(*g.q), l, z2_col);
        continue;
      }
    }
    gens.push_back(std::move(g));
  }
  return gens;
}

void parse_operators(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  const Alphabet& a = *spec.alphabet;
  for (const auto& l : sec.body) {
    auto toks = tokenize(l.content);
    auto arrow = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.text == "->"; });
    if (arrow == toks.end()) {
      ctx.error(diag::Syntax, "expected 'inputs -> expression'", l, toks.front().col);
      continue;
    }
    if (arrow == toks.begin()) {
      ctx.error(diag::Syntax, "operator input must have at least one letter", l, arrow->col);
      continue;
    }
    std::vector<GenId> input;
    bool ok = true;
    for (auto it = toks.begin(); it != arrow; ++it) {
      auto id = a.find(it->text);
      if (!id) {
        if (it->text == "1")
          ctx.error(diag::Syntax, "operator input must have at least one letter", l, it->col);
        else
          ctx.error(diag::UnknownGenerator, "unknown generator '" + it->text + "'", l, it->col);
        ok = false;
        break;
      }
      input.push_back(*id);
    }
    if (!ok) continue;
    std::vector<RawTerm> terms;
    std::size_t begin = static_cast<std::size_t>(arrow - toks.begin()) + 1;
    if (!parse_expr(a, toks, begin, spec.coefficients, false, l, ctx, terms)) continue;
    for (const auto& t : terms) {
      try {
        spec.operators.add(input, t.words.front(), t.coeff);
      } catch (const ContractError& e) {
        ctx.error(diag::DegreeViolation, e.what(), l, arrow->col);
        break;
      }
    }
  }
}

void parse_augmentation(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  const Alphabet& a = *spec.alphabet;
  MorphismFamily eps = make_augmentation(spec.alphabet);
  Alphabet empty;
  for (const auto& l : sec.body) {
    auto eq = l.content.find('=');
    if (eq == std::string::npos) {
      ctx.error(diag::Syntax, "expected 'inputs = value'", l, first_col(l.content));
      continue;
    }
    auto lhs = tokenize(l.content, 0, eq);
    if (lhs.empty()) {
      ctx.error(diag::Syntax, "augmentation input must have at least one letter", l, first_col(l.content));
      continue;
    }
    std::vector<GenId> input;
    bool ok = true;
    for (const auto& t : lhs) {
      auto id = a.find(t.text);
      if (!id) {
        ctx.error(diag::UnknownGenerator, "unknown generator '" + t.text + "'", l, t.col);
        ok = false;
        break;
      }
      input.push_back(*id);
    }
    if (!ok) continue;
    auto rhs = tokenize(l.content, eq + 1);
    std::vector<RawTerm> terms;
    if (!parse_expr(empty, rhs, 0, spec.coefficients, false, l, ctx, terms)) continue;
    for (const auto& t : terms) {
      try {
        eps.add(input, std::vector<GenId>{}, t.coeff);
      } catch (const ContractError& e) {
        ctx.error(diag::DegreeViolation, e.what(), l, first_col(l.content));
        break;
      }
    }
  }
  spec.augmentation = std::move(eps);
}

void parse_mc(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  const Alphabet& a = *spec.alphabet;
  WordSum mc;
  for (const auto& l : sec.body) {
    auto toks = tokenize(l.content);
    std::vector<RawTerm> terms;
    if (!parse_expr(a, toks, 0, spec.coefficients, false, l, ctx, terms)) continue;
    for (const auto& t : terms) {
      Word w{t.words.front()};
      if (w.scalar() || parity(a, canonicalize_word(a, w.letters).word) != 0) {
        ctx.error(diag::DegreeViolation, "Maurer-Cartan terms must be nonempty even words", l, toks.front().col);
        break;
      }
    }
    WordSum part = to_word_sum(a, terms);
    for (const auto& [w, c] : part) add_to(mc, w, c);
  }
  spec.mc = std::move(mc);
}

void parse_witness(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  for (const auto& l : sec.body) {
    auto kv = split_key_value(l, ctx);
    if (!kv) continue;
    if (kv->key == "weights") {
      auto k = integer(kv->value);
      if (!k || *k < 1 || *k > 64)
        ctx.error(diag::InvalidValue, "weights must be an integer in 1..64", l, kv->value_col);
      else
        spec.weights = static_cast<int>(*k);
    } else if (kv->key == "seed") {
      auto toks = tokenize(l.content, l.content.find('=') + 1);
      std::vector<RawTerm> terms;
      if (!parse_expr(*spec.alphabet, toks, 0, spec.coefficients, true, l, ctx, terms)) continue;
      spec.seed = to_element(*spec.alphabet, terms);
    } else {
      ctx.error(diag::UnknownKey, "unknown key '" + kv->key + "' in [witness]", l, kv->key_col);
    }
  }
}

void parse_truncation(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  for (const auto& l : sec.body) {
    auto kv = split_key_value(l, ctx);
    if (!kv) continue;
    if (kv->key == "letters" || kv->key == "sentences") {
      auto v = integer(kv->value);
      if (!v || *v < 1 || *v > 64) {
        ctx.error(diag::InvalidValue, kv->key + " must be an integer in 1..64", l, kv->value_col);
        continue;
      }
      (kv->key == "letters" ? spec.trunc_letters : spec.trunc_sentences) = static_cast<std::size_t>(*v);
    } else if (kv->key == "action") {
      auto r = number(kv->value);
      if (!r || *r <= 0)
        ctx.error(diag::InvalidValue, "action must be a positive rational", l, kv->value_col);
      else
        spec.trunc_action = *r;
    } else {
      ctx.error(diag::UnknownKey, "unknown key '" + kv->key + "' in [truncation]", l, kv->key_col);
    }
  }
}

// Reads `name key=value ...` records in the geometry section.
std::map<std::string, std::string> record_attrs(const std::vector<Token>& toks, std::size_t from, const SourceLine& l,
                                                Ctx& ctx, bool& ok) {
  std::map<std::string, std::string> out;
  for (std::size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == toks[i].text.size()) {
      ctx.error(diag::Syntax, "expected attribute=value, got '" + toks[i].text + "'", l, toks[i].col);
      ok = false;
      return out;
    }
    out[toks[i].text.substr(0, eq)] = toks[i].text.substr(eq + 1);
  }
  return out;
}

void parse_geometry(const Section& sec, ModelSpec& spec, Ctx& ctx) {
  Geometry g;
  SourceLine header{sec.line, sec.raw, sec.raw};
  std::size_t before = ctx.diags.size();
  struct PendingDiff {
    std::string from, to;
    long c;
    SourceLine line;
    int col;
  };
  std::vector<PendingDiff> diffs;
  std::set<std::string> keys;
  for (const auto& l : sec.body) {
    auto toks = tokenize(l.content);
    const std::string& head = toks.front().text;
    if (head == "crit" || head == "base") {
      if (toks.size() < 2 || !is_identifier(toks[1].text)) {
        ctx.error(diag::Syntax, "expected '" + head + " NAME attribute=value ...'", l, toks.front().col);
        continue;
      }
      bool ok = true;
      auto attrs = record_attrs(toks, 2, l, ctx, ok);
      if (!ok) continue;
      const std::vector<std::string> want =
          head == "crit" ? std::vector<std::string>{"index", "value"} : std::vector<std::string>{"cz", "period"};
      for (const auto& [k, v] : attrs)
        if (std::find(want.begin(), want.end(), k) == want.end()) {
          ctx.error(diag::UnknownKey, "unknown attribute '" + k + "'", l, toks[1].col);
          ok = false;
        }
      for (const auto& k : want)
        if (!attrs.count(k)) {
          ctx.error(diag::MissingKey, "missing attribute '" + k + "'", l, toks[1].col);
          ok = false;
        }
      if (!ok) continue;
      if (head == "crit") {
        auto idx = integer(attrs["index"]);
        auto val = number(attrs["value"]);
        if (!idx || !val) {
          ctx.error(diag::InvalidValue, "crit needs an integer index and a rational value", l, toks[1].col);
          continue;
        }
        g.morse.points.push_back({toks[1].text, static_cast<int>(*idx), *val});
      } else {
        auto cz = number(attrs["cz"]);
        auto period = number(attrs["period"]);
        if (!cz || !period || *period <= 0) {
          ctx.error(diag::InvalidValue, "base needs a rational cz and a positive period", l, toks[1].col);
          continue;
        }
        OrbitRecord o;
        o.name = toks[1].text;
        o.cz = *cz;
        o.period = *period;
        g.base.push_back(std::move(o));
      }
      continue;
    }
    if (head == "diff") {
      auto eq = l.content.find('=');
      auto lhs = tokenize(l.content, 0, eq);
      if (eq == std::string::npos || lhs.size() != 3) {
        ctx.error(diag::Syntax, "expected 'diff FROM TO = coefficient'", l, toks.front().col);
        continue;
      }
      auto c = integer(trim(l.content.substr(eq + 1)));
      if (!c) {
        ctx.error(diag::InvalidValue, "Morse coefficients must be integers", l, first_col(l.content, eq + 1));
        continue;
      }
      diffs.push_back({lhs[1].text, lhs[2].text, *c, l, lhs[1].col});
      continue;
    }
    auto kv = split_key_value(l, ctx);
    if (!kv) continue;
    keys.insert(kv->key);
    auto bad = [&](const std::string& what) { ctx.error(diag::InvalidValue, what, l, kv->value_col); };
    if (kv->key == "kind") {
      if (kv->value != "morse" && kv->value != "handle" && kv->value != "spinal")
        bad("kind must be 'morse', 'handle' or 'spinal'");
      else
        g.kind = kv->value;
    } else if (kv->key == "complex_dim" || kv->key == "n" || kv->key == "regions") {
      auto v = integer(kv->value);
      if (!v || *v < 0 || *v > 1000) {
        bad(kv->key + " must be a non-negative integer");
        continue;
      }
      if (kv->key == "complex_dim")
        g.morse.complex_dim = static_cast<int>(*v);
      else if (kv->key == "n")
        g.handle_n = g.sft_n = static_cast<int>(*v);
      else
        g.regions = static_cast<int>(*v);
    } else if (kv->key == "bound" || kv->key == "period_bound" || kv->key == "period" ||
               kv->key == "cz_hypothesis") {
      auto r = number(kv->value);
      if (!r) {
        bad("invalid number '" + kv->value + "'");
        continue;
      }
      if (kv->key == "period")
        g.tau = *r;
      else if (kv->key == "cz_hypothesis")
        g.cz_hypothesis = *r;
      else
        g.bound = *r;
    } else {
      ctx.error(diag::UnknownKey, "unknown key '" + kv->key + "' in [geometry]", l, kv->key_col);
    }
  }
  if (g.kind.empty()) {
    if (ctx.diags.size() == before)
      ctx.error(diag::MissingKey, "[geometry] needs 'kind = morse|handle|spinal'", header, first_col(sec.raw));
    return;
  }
  for (const auto& d : diffs) {
    auto pos = [&](const std::string& name) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < g.morse.points.size(); ++i)
        if (g.morse.points[i].name == name) return i;
      return std::nullopt;
    };
    auto from = pos(d.from), to = pos(d.to);
    if (!from || !to) {
      ctx.error(diag::Geometry, "unknown critical point '" + (from ? d.to : d.from) + "'", d.line, d.col);
      continue;
    }
    g.morse.differential.push_back({*from, *to, d.c});
  }
  if (ctx.diags.size() != before) return;
  try {
    (void)g.spectrum();
  } catch (const GeometryError& e) {
    ctx.error(diag::Geometry, e.what(), header, first_col(sec.raw));
    return;
  }
  spec.geometry = std::move(g);
}

std::string join_longs(const std::vector<long>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

OrbitSpectrum Geometry::spectrum() const {
  if (kind == "morse") return product_boundary_spectrum(morse, bound);
  if (kind == "handle") return handle_spectrum(handle_n, bound, tau);
  if (kind == "spinal") {
    OrbitSpectrum base;
    base.sft_n = sft_n;
    base.threshold = bound;
    base.orbits = this->base;
    return spinal_spectrum(base, regions, bound);
  }
  throw GeometryError("unknown geometry kind '" + kind + "'");
}

CoeffRing ModelSpec::ring() const {
  CoeffRing r;
  r.order = novikov_order;
  r.pairing = pairing;
  return r;
}

TruncationPolicy ModelSpec::policy() const {
  TruncationPolicy t;
  if (trunc_letters) t.max_letters = *trunc_letters;
  if (trunc_sentences) t.max_words = *trunc_sentences;
  t.max_action = trunc_action;
  t.ring = ring();
  return t;
}

std::string Diagnostic::render(const std::string& file) const {
  std::string out = file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + severity + "[" + code +
                    "]: " + message + "\n";
  if (!excerpt.empty()) {
    out += "  " + excerpt + "\n  ";
    // caret under the byte column, counting UTF-8 code points
    for (int i = 0; i + 1 < column && i < static_cast<int>(excerpt.size()); ++i) {
      unsigned char ch = static_cast<unsigned char>(excerpt[i]);
      if ((ch & 0xC0) != 0x80) out += ch == '\t' ? '\t' : ' ';
    }
    out += "^\n";
  }
  return out;
}

ParseResult parse_model(std::string_view text) {
  Ctx ctx;
  bool stray = false;
  auto sections = split_sections(text, ctx, stray);
  check_sections(sections,
                 {"model", "generators", "operators", "augmentation", "mc", "witness", "geometry", "truncation"}, ctx);
  const Section* gens = find_section(sections, "generators");
  if (!gens) {
    ctx.error(diag::MissingSection, "missing [generators] section", 1, 1, "");
    return {std::nullopt, std::move(ctx.diags)};
  }
  ModelSpec spec;
  if (const Section* s = find_section(sections, "model")) parse_model_section(*s, spec, ctx);
  auto generators = parse_generators(*gens, spec, ctx);
  try {
    spec.alphabet = std::make_shared<Alphabet>(std::move(generators));
  } catch (const std::invalid_argument& e) {
    ctx.error(diag::InvalidValue, e.what(), gens->line, 1, gens->raw);
    return {std::nullopt, std::move(ctx.diags)};
  }
  spec.operators = OperatorFamily(spec.alphabet, spec.n, spec.action_decreasing);
  if (const Section* s = find_section(sections, "operators")) parse_operators(*s, spec, ctx);
  if (const Section* s = find_section(sections, "augmentation")) parse_augmentation(*s, spec, ctx);
  if (const Section* s = find_section(sections, "mc")) parse_mc(*s, spec, ctx);
  if (const Section* s = find_section(sections, "witness")) parse_witness(*s, spec, ctx);
  if (const Section* s = find_section(sections, "geometry")) parse_geometry(*s, spec, ctx);
  if (const Section* s = find_section(sections, "truncation")) parse_truncation(*s, spec, ctx);
  if (ctx.failed()) return {std::nullopt, std::move(ctx.diags)};
  return {std::move(spec), {}};
}

std::string print_model(const ModelSpec& spec) {
  std::ostringstream out;
  const Alphabet& a = *spec.alphabet;
  out << "[model]\n";
  if (!spec.name.empty()) out << "name = " << spec.name << "\n";
  if (spec.n) out << "n = " << *spec.n << "\n";
  if (spec.independent_gradings) out << "gradings = independent\n";
  if (spec.action_decreasing) out << "action_decreasing = true\n";
  if (spec.coefficients != CoeffKind::Rational)
    out << "coefficients = " << (spec.coefficients == CoeffKind::Novikov ? "novikov" : "group") << "\n";
  if (spec.novikov_order) out << "novikov_order = " << to_string(*spec.novikov_order) << "\n";
  if (!spec.pairing.empty()) {
    out << "pairing =";
    for (const auto& r : spec.pairing) out << " " << to_string(r);
    out << "\n";
  }

  out << "\n[generators]\n";
  for (const auto& g : a.generators()) {
    out << g.name << " z2=" << g.z2;
    if (g.q) out << " q=" << to_string(*g.q);
    out << " action=" << to_string(g.action);
    if (g.cz) out << " cz=" << to_string(*g.cz);
    if (g.multiplicity) out << " multiplicity=" << to_string(*g.multiplicity);
    if (!g.label.empty()) out << " label=" << join_longs(g.label);
    if (!g.flags.empty()) {
      out << " flags=";
      for (std::size_t i = 0; i < g.flags.size(); ++i) out << (i ? "," : "") << g.flags[i];
    }
    out << "\n";
  }

  if (!spec.operators.table().empty()) {
    out << "\n[operators]\n";
    for (const auto& [in, row] : spec.operators.table()) out << spell(a, in) << " -> " << format(a, row) << "\n";
  }
  if (spec.augmentation) {
    out << "\n[augmentation]\n";
    for (const auto& [in, row] : spec.augmentation->table()) {
      auto it = row.find(Word{});
      if (it != row.end()) out << spell(a, in) << " = " << it->second.str() << "\n";
    }
  }
  if (spec.mc && !spec.mc->empty()) out << "\n[mc]\n" << format(a, *spec.mc) << "\n";
  if (spec.weights || spec.seed) {
    out << "\n[witness]\n";
    if (spec.seed) out << "seed = " << format(a, *spec.seed) << "\n";
    if (spec.weights) out << "weights = " << *spec.weights << "\n";
  }
  if (spec.geometry) {
    const Geometry& g = *spec.geometry;
    out << "\n[geometry]\nkind = " << g.kind << "\n";
    if (g.kind == "morse") {
      out << "complex_dim = " << g.morse.complex_dim << "\n";
      out << "period_bound = " << to_string(g.bound) << "\n";
      for (const auto& p : g.morse.points)
        out << "crit " << p.name << " index=" << p.index << " value=" << to_string(p.value) << "\n";
      for (const auto& e : g.morse.differential)
        out << "diff " << g.morse.points[e.from].name << " " << g.morse.points[e.to].name << " = " << e.coefficient
            << "\n";
    } else if (g.kind == "handle") {
      out << "n = " << g.handle_n << "\nperiod = " << to_string(g.tau) << "\nbound = " << to_string(g.bound) << "\n";
    } else {
      out << "n = " << g.sft_n << "\nregions = " << g.regions << "\nbound = " << to_string(g.bound) << "\n";
      if (g.cz_hypothesis) out << "cz_hypothesis = " << to_string(*g.cz_hypothesis) << "\n";
      for (const auto& b : g.base)
        out << "base " << b.name << " cz=" << to_string(*b.cz) << " period=" << to_string(*b.period) << "\n";
    }
  }
  if (spec.trunc_letters || spec.trunc_sentences || spec.trunc_action) {
    out << "\n[truncation]\n";
    if (spec.trunc_letters) out << "letters = " << *spec.trunc_letters << "\n";
    if (spec.trunc_sentences) out << "sentences = " << *spec.trunc_sentences << "\n";
    if (spec.trunc_action) out << "action = " << to_string(*spec.trunc_action) << "\n";
  }
  return out.str();
}

bool is_morphism_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string t = trim(raw.substr(0, raw.find('#')));
    if (t.empty()) continue;
    return t == "[morphism]";
  }
  return false;
}

MorphismParseResult parse_morphism(std::string_view text,
                                   const std::function<ParseResult(const std::string&)>& load) {
  Ctx ctx;
  bool stray = false;
  auto sections = split_sections(text, ctx, stray);
  check_sections(sections, {"morphism", "map"}, ctx);
  const Section* head = find_section(sections, "morphism");
  if (!head) {
    ctx.error(diag::MissingSection, "missing [morphism] section", 1, 1, "");
    return {std::nullopt, std::move(ctx.diags)};
  }
  std::map<std::string, std::pair<std::string, SourceLine>> paths;
  for (const auto& l : head->body) {
    auto kv = split_key_value(l, ctx);
    if (!kv) continue;
    if (kv->key != "source" && kv->key != "target") {
      ctx.error(diag::UnknownKey, "unknown key '" + kv->key + "' in [morphism]", l, kv->key_col);
      continue;
    }
    paths[kv->key] = {kv->value, l};
  }
  for (const char* k : {"source", "target"})
    if (!paths.count(k))
      ctx.error(diag::MissingKey, std::string("[morphism] needs '") + k + " = FILE'", head->line, 1, head->raw);
  if (ctx.failed()) return {std::nullopt, std::move(ctx.diags)};

  MorphismSpec spec{ModelSpec{}, ModelSpec{}, paths["source"].first, paths["target"].first,
                    MorphismFamily(std::make_shared<Alphabet>(), std::make_shared<Alphabet>())};
  for (const char* k : {"source", "target"}) {
    const auto& [path, line] = paths[k];
    ParseResult r = load(path);
    if (!r.ok()) {
      std::string first = r.diagnostics.empty() ? "unreadable" : r.diagnostics.front().message;
      ctx.error(diag::InvalidValue, std::string(k) + " model '" + path + "' did not load: " + first, line,
                first_col(line.content, line.content.find('=') + 1));
      continue;
    }
    (std::string(k) == "source" ? spec.source : spec.target) = std::move(*r.spec);
  }
  if (ctx.failed()) return {std::nullopt, std::move(ctx.diags)};

  spec.map = MorphismFamily(spec.source.alphabet, spec.target.alphabet);
  const Alphabet& src = *spec.source.alphabet;
  const Alphabet& tgt = *spec.target.alphabet;
  if (const Section* map = find_section(sections, "map")) {
    for (const auto& l : map->body) {
      auto toks = tokenize(l.content);
      auto arrow = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.text == "->"; });
      if (arrow == toks.end() || arrow == toks.begin()) {
        ctx.error(diag::Syntax, "expected 'inputs -> expression'", l, toks.front().col);
        continue;
      }
      std::vector<GenId> input;
      bool ok = true;
      for (auto it = toks.begin(); it != arrow; ++it) {
        auto id = src.find(it->text);
        if (!id) {
          ctx.error(diag::UnknownGenerator, "unknown generator '" + it->text + "'", l, it->col);
          ok = false;
          break;
        }
        input.push_back(*id);
      }
      if (!ok) continue;
      std::vector<RawTerm> terms;
      std::size_t begin = static_cast<std::size_t>(arrow - toks.begin()) + 1;
      CoeffKind kind = std::max(spec.source.coefficients, spec.target.coefficients);
      if (!parse_expr(tgt, toks, begin, kind, false, l, ctx, terms)) continue;
      for (const auto& t : terms) {
        try {
          spec.map.add(input, t.words.front(), t.coeff);
        } catch (const ContractError& e) {
          ctx.error(diag::DegreeViolation, e.what(), l, arrow->col);
          break;
        }
      }
    }
  }
  if (ctx.failed()) return {std::nullopt, std::move(ctx.diags)};
  return {std::move(spec), {}};
}

}  // namespace blinfty
