// One PASS/FAIL line per acceptance criterion.
// Usage: acceptance <blinfty-cli> <source-root> [--update-golden]

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blinfty/deformation.hpp"
#include "blinfty/homology.hpp"
#include "blinfty/orbits.hpp"
#include "orbit_oracle.hpp"
#include "support.hpp"

using namespace blinfty;
namespace fs = std::filesystem;

namespace {

std::string g_cli, g_root;
bool g_update = false;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::fixed << v;
  return s.str();
}

ModelSpec load(const fs::path& p) {
  ParseResult r = parse_model(testing::slurp(p.string()));
  if (!r.ok()) throw std::runtime_error(r.diagnostics.front().render(p.string()));
  return std::move(*r.spec);
}

std::vector<fs::path> files_with(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t oracle_mismatches(const OperatorFamily& p, const TruncationPolicy& t) {
  oracle::Model m = testing::to_oracle(p);
  std::size_t bad = 0;
  for (const auto& s : spanning_sentences(p.alphabet(), t))
    if (testing::to_oracle(assemble_hat(p, s)) != oracle::hat(m, testing::to_oracle(s))) ++bad;
  return bad;
}

Outcome axiom_suite() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  TruncationPolicy t;
  t.max_letters = 4;
  t.max_words = 3;
  std::size_t models = 0, compared = 0;
  for (const auto& f : files_with(fs::path(g_root) / "models", ".model")) {
    ModelSpec m = load(f);
    ++models;
    if (!verify_blinfty(m.operators, m.policy()).ok) o.fail(f.filename().string() + " fails the axiom");
    if (m.alphabet->size() <= 4) {
      ++compared;
      if (std::size_t bad = oracle_mismatches(m.operators, t)) o.fail(f.filename().string() + ": " +
                                                                       std::to_string(bad) + " oracle mismatches");
    }
  }
  std::size_t corrupted = 0;
  for (const auto& f : files_with(fs::path(g_root) / "tests" / "data", ".model")) {
    ModelSpec m = load(f);
    ++corrupted;
    Report r = verify_blinfty(m.operators, m.policy());
    if (r.ok || r.failures.empty()) o.fail(f.filename().string() + " passes although corrupted");
    if (oracle_mismatches(m.operators, t)) o.fail(f.filename().string() + ": oracle mismatch");
    ++compared;
  }
  std::mt19937 rng(4);
  for (int i = 0; i < 30; ++i, ++compared) {
    OperatorFamily p = testing::random_family(rng, 1 + i % 4, 5);
    if (oracle_mismatches(p, t)) o.fail("random family " + std::to_string(i) + ": oracle mismatch");
  }
  if (corrupted < 3) o.fail("fewer than 3 corrupted variants");
  double secs = seconds_since(t0);
  if (secs >= 60) o.fail("took " + fixed(secs) + " s");
  if (o.pass)
    o.detail = std::to_string(models) + " corpus models pass, " + std::to_string(corrupted) +
               " corrupted variants fail, oracle agrees on " + std::to_string(compared) + " families, " + fixed(secs) +
               " s";
  return o;
}

Outcome torsion_ladder() {
  Outcome o;
  for (std::size_t k = 0; k <= 3; ++k) {
    ModelSpec m = testing::parse_text(testing::ladder_text(k));
    TorsionResult r = torsion(m.operators, 6, m.policy());
    std::size_t expected = oracle::torsion(testing::to_oracle(m.operators), 6, k + 1);
    if (!r.value || *r.value != k || expected != k)
      o.fail("ladder " + std::to_string(k) + ": library " + (r.value ? std::to_string(*r.value) : "none") +
             ", oracle " + std::to_string(expected));
    if (r.soundness != "exact (action-closed)") o.fail("ladder " + std::to_string(k) + " is " + r.soundness);
  }
  TorsionResult triv = torsion(trivial_family(), 6, {});
  if (triv.value || triv.render(Alphabet{}).rfind("T ≥ 6", 0) != 0) o.fail("trivial algebra: " + triv.render(Alphabet{}));
  if (o.pass) o.detail = "T = k for k = 0..3, trivial algebra T ≥ 6";
  return o;
}

Outcome functoriality() {
  Outcome o;
  auto loader = [](const std::string& rel) {
    return parse_model(testing::slurp((fs::path(g_root) / "models" / "morphisms" / rel).string()));
  };
  std::size_t verified = 0;
  bool equality = false, strict = false;
  for (const auto& f : files_with(fs::path(g_root) / "models" / "morphisms", ".morphism")) {
    MorphismParseResult r = parse_morphism(testing::slurp(f.string()), loader);
    if (!r.spec) {
      o.fail(f.filename().string() + " does not parse");
      continue;
    }
    const MorphismSpec& s = *r.spec;
    if (!verify_morphism(s.map, s.source.operators, s.target.operators, s.source.policy()).ok) {
      o.fail(f.filename().string() + " is not a morphism");
      continue;
    }
    ++verified;
    FunctorialityReport fr =
        functoriality_check(s.map, s.source.operators, s.target.operators, 3, s.source.policy());
    if (!fr.holds) o.fail(f.filename().string() + ": T(V) < T(V')");
    auto value = [](const TorsionResult& t) { return t.value ? long(*t.value) : 1000L; };
    if (f.filename() == "id_torsion1.morphism" && value(fr.source) == value(fr.target)) equality = true;
    if (f.filename() == "collapse.morphism" && value(fr.source) > value(fr.target)) strict = true;
  }
  if (verified < 5) o.fail("only " + std::to_string(verified) + " verified morphisms");
  if (!equality) o.fail("identity does not give equality");
  if (!strict) o.fail("collapse does not give a strict inequality");
  if (o.pass) o.detail = std::to_string(verified) + " verified morphisms, identity equal, collapse strict";
  return o;
}

Outcome deformation_identities() {
  Outcome o;
  std::mt19937 rng(100);
  CoeffRing ring;
  ring.order = Rational(4);
  TruncationPolicy t;
  t.max_letters = 3;
  t.max_words = 3;
  t.ring = ring;
  std::size_t changed = 0;
  for (int i = 0; i < 100; ++i) {
    testing::LayeredModel m = testing::layered_model(rng);
    const std::string tag = "model " + std::to_string(i);
    if (!verify_blinfty(m.p, t).ok || !verify_mc(m.p, m.mc, ring).vanishes()) {
      o.fail(tag + " is not a valid input");
      continue;
    }
    for (const auto& s : spanning_sentences(m.p.alphabet(), t)) {
      if (!check_pmc_identity(m.p, m.mc, single(s), ring).vanishes()) o.fail(tag + ": p_mc identity residual");
      if (!exp_chain_map_check(m.p, m.mc, single(s), ring).vanishes()) o.fail(tag + ": chain map residual");
    }
    OperatorFamily pmc = deform(m.p, m.mc, ring);
    if (!verify_blinfty(pmc, t).ok) o.fail(tag + ": deformed family fails the axiom");
    if (!(pmc == m.p)) ++changed;
    WordSum shifted = m.mc;
    add_to(shifted, scalar_word(), Coeff::monomial(Rational(5, 2), Monomial{1, {}, {}}));
    if (!(deform(m.p, shifted, ring) == pmc)) o.fail(tag + ": constant term changes the deformation");
    auto expected = oracle::deform(testing::to_oracle(m.p), testing::to_oracle_at_unit(m.mc), m.p.max_arity());
    if (testing::table_at_unit(pmc) != expected) o.fail(tag + ": deformation differs from the oracle");
  }
  if (o.pass)
    o.detail = "100 models, residuals vanish to order 4, " + std::to_string(changed) +
               " nontrivial deformations re-verified";
  return o;
}

Outcome handle_law() {
  Outcome o;
  for (int n = 2; n <= 6; ++n)
    for (int k0 = 1; k0 <= 5; ++k0) {
      std::vector<Rational> got;
      for (const auto& orb : handle_spectrum(n, k0, 1).orbits) got.push_back(*orb.cz);
      std::sort(got.begin(), got.end());
      std::vector<Rational> want;
      for (int c = n + 1; c <= 2 * k0 * n + n - 1; c += 2) want.push_back(c);
      if (got != want) o.fail("n = " + std::to_string(n) + ", k0 = " + std::to_string(k0));
    }
  if (o.pass) o.detail = "25 cases, CZ = {n+1, n+3, ..., 2 k0 n + n - 1} once each";
  return o;
}

Outcome morse_consistency() {
  Outcome o;
  for (int n : {2, 3}) {
    ModelSpec m = load(fs::path(g_root) / "models" / ("product_s" + std::to_string(n) + ".model"));
    const MorseData& md = m.geometry->morse;
    OrbitSpectrum s = product_boundary_spectrum(md, m.geometry->bound);
    if (s.orbits.size() != md.points.size()) o.fail("S" + std::to_string(n) + ": orbit count");
    for (std::size_t i = 0; i < s.orbits.size() && i < md.points.size(); ++i) {
      const auto& p = md.points[i];
      if (*s.orbits[i].cz != md.complex_dim - p.index + 2) o.fail("S" + std::to_string(n) + ": CZ of " + p.name);
      for (std::size_t j = 0; j < md.points.size(); ++j)
        if (md.points[j].value > p.value && !(*s.orbits[j].period < *s.orbits[i].period))
          o.fail("S" + std::to_string(n) + ": periods not anti-monotone");
    }
    MorseHomology h = morse_homology(md);
    for (std::size_t d = 0; d < h.dims.size(); ++d) {
      std::size_t want = (d == 0 || d == std::size_t(n)) ? 1 : 0;
      if (h.dims[d] != want) o.fail("S" + std::to_string(n) + ": H^" + std::to_string(d));
    }
  }
  if (o.pass) o.detail = "n = 2, 3: CZ = dim - ind + 2, periods anti-monotone, H^0 = H^n = Q";
  return o;
}

Outcome certifier() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  ModelSpec m = load(fs::path(g_root) / "models" / "spinal_k3.model");
  OrbitSpectrum s = m.geometry->spectrum();
  const Rational D = m.geometry->bound;
  CertificateResult r = certify_lower_bound(s, m.geometry->regions, 1, D, m.geometry->cz_hypothesis);
  if (r.kind != CertificateResult::Kind::Certificate) o.fail("no certificate");
  if (!r.hypothesis_violations.empty()) o.fail("spine CZ hypothesis violated");
  std::vector<oracle::SpineOrbit> spine;
  for (const auto& orb : s.orbits) spine.push_back({*orb.cz, *orb.period});
  std::set<oracle::OrbitConfiguration> got;
  for (const auto& c : r.configurations) {
    oracle::OrbitConfiguration oc{c.orbits, c.vdim};
    std::sort(oc.orbits.begin(), oc.orbits.end());
    got.insert(oc);
  }
  auto want = oracle::configurations(spine, s.sft_n, 2, D);
  if (got != want || got.size() != r.configurations.size()) o.fail("configuration list differs from the oracle");
  OrbitSpectrum flipped = s;
  for (auto& orb : flipped.orbits)
    if (orb.name == "g1_hat") orb.cz = Rational(5);
  if (certify_lower_bound(flipped, m.geometry->regions, 1, D).kind != CertificateResult::Kind::Counterexample)
    o.fail("flipped spine orbit gives no counterexample");
  double secs = seconds_since(t0);
  if (secs >= 10) o.fail("took " + fixed(secs) + " s");
  if (o.pass)
    o.detail = std::to_string(r.configurations.size()) + " configurations match the oracle, CZ +5 flip refuted, " +
               fixed(secs) + " s";
  return o;
}

Outcome weighted_witness_check() {
  Outcome o;
  ModelSpec m = load(fs::path(g_root) / "models" / "cobordism2.model");
  WeightedWitness w = weighted_witness(m.operators, *m.mc, *m.seed, std::size_t(*m.weights), m.ring());
  if (w.length != 3) o.fail("sentence length " + std::to_string(w.length));
  if (!w.torsion_bound || *w.torsion_bound != 2) o.fail("no bound T ≤ 2");
  TorsionResult t = torsion(m.operators, 4, m.policy());
  if (!t.value || *t.value > 2) o.fail("torsion() does not return ≤ 2");
  if (o.pass) o.detail = "length 3, bound T ≤ 2, torsion() = " + std::to_string(*t.value);
  return o;
}

std::pair<std::string, int> run_cli(const std::string& args) {
  std::string cmd = "cd '" + g_root + "' && '" + g_cli + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

Outcome cli_determinism() {
  Outcome o;
  std::ifstream list(fs::path(g_root) / "tests" / "golden" / "commands.txt");
  std::string line;
  std::size_t commands = 0, runs = 0;
  while (std::getline(list, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto bar = line.find(" | ");
    std::string name = line.substr(0, bar), args = line.substr(bar + 3);
    const bool threaded = args.rfind("print", 0) != 0 && args.rfind("vdim", 0) != 0;
    fs::path golden = fs::path(g_root) / "tests" / "golden" / (name + ".out");
    ++commands;
    if (g_update) {
      auto [out, code] = run_cli(args);
      std::ofstream(golden, std::ios::binary) << out << "exit: " << code << "\n";
    }
    std::string expected = testing::slurp(golden.string());
    for (int run = 0; run < 3; ++run)
      for (int threads : {1, 4, 8}) {
        if (!threaded && threads != 1) continue;
        auto [out, code] = run_cli(args + (threaded ? " --threads " + std::to_string(threads) : ""));
        ++runs;
        if (out + "exit: " + std::to_string(code) + "\n" != expected)
          o.fail(name + " differs (threads " + std::to_string(threads) + ", run " + std::to_string(run + 1) + ")");
      }
  }
  if (commands == 0) o.fail("no golden commands");
  if (o.pass)
    o.detail = std::to_string(commands) + " commands, " + std::to_string(runs) + " runs byte-identical to golden";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <blinfty-cli> <source-root> [--update-golden]\n";
    return 2;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_root = fs::absolute(argv[2]).string();
  g_update = argc > 3 && std::string(argv[3]) == "--update-golden";
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"axiom suite", axiom_suite},
      {"torsion ladder", torsion_ladder},
      {"functoriality", functoriality},
      {"deformation identities", deformation_identities},
      {"handle spectrum law", handle_law},
      {"Morse spectrum consistency", morse_consistency},
      {"lower-bound certifier", certifier},
      {"weighted witness", weighted_witness_check},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << index << " [" << c.name << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail
              << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
