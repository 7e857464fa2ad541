#include <CLI11.hpp>

#include <iostream>

#include "blinfty/commands.hpp"

namespace {

std::vector<blinfty::Rational> parse_list(const std::string& s) {
  std::vector<blinfty::Rational> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(blinfty::parse_rational(cur));
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blinfty: BL-infinity models, torsion and orbit spectra"};
  app.require_subcommand(1);

  blinfty::CommandOptions o;
  std::string novikov, period, plus, minus;
  std::size_t level = 0, kmax = 0, letters = 0, sentences = 0, weights = 0;
  int m = -1;

  auto common = [&](CLI::App* sub, bool file = true) {
    if (file) sub->add_option("file", o.file, "model file")->required();
    sub->add_option("--trunc-letters", letters, "maximum letters per sentence (N)");
    sub->add_option("--trunc-sentences", sentences, "maximum words per sentence (K)");
    sub->add_option("--novikov-order", novikov, "drop coefficient terms above this filtration");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
  };

  auto* check = app.add_subcommand("check", "verify the BL-infinity relation, augmentation, MC element or morphism");
  common(check);
  check->add_option("--kmax", kmax, "torsion search bound for morphism files");
  auto* hom = app.add_subcommand("homology", "homology of a filtration level");
  common(hom);
  hom->add_option("--level", level, "filtration level k");
  auto* tor = app.add_subcommand("torsion", "algebraic planar torsion");
  common(tor);
  tor->add_option("--kmax", kmax, "search bound");
  tor->add_option("--weights", weights, "weighted witness with k weight variables");
  auto* def = app.add_subcommand("deform", "deform by the [mc] element");
  common(def);
  auto* lin = app.add_subcommand("linearize", "linearize at the [augmentation]");
  common(lin);
  auto* spec = app.add_subcommand("spectrum", "orbit spectrum of a [geometry] section");
  common(spec);
  spec->add_option("--period", period, "period bound D");
  auto* cert = app.add_subcommand("certify", "lower-bound certificate for a spinal geometry");
  common(cert);
  cert->add_option("--period", period, "period bound D");
  cert->add_option("--m", m, "candidate torsion m");
  auto* prn = app.add_subcommand("print", "print the canonical form of a model");
  prn->add_option("file", o.file, "model file")->required();
  auto* vd = app.add_subcommand("vdim", "virtual dimension of a configuration");
  vd->add_option("--n", o.n, "dim Y = 2n - 1")->required();
  vd->add_option("--plus", plus, "comma-separated CZ indices of positive orbits")->required();
  vd->add_option("--minus", minus, "comma-separated CZ indices of negative orbits");
  vd->add_option("--plus-names", o.plus_names, "names of positive orbits")->delimiter(',');
  vd->add_option("--minus-names", o.minus_names, "names of negative orbits")->delimiter(',');
  vd->add_option("--genus", o.genus, "genus");
  vd->add_flag("--point", o.point, "impose a point constraint");
  vd->add_option("--constraint-dim", o.constraint_dim, "dimension of the constraining cycle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : blinfty::InputError;
  }

  try {
    o.command = app.get_subcommands().front()->get_name();
    if (letters) o.trunc_letters = letters;
    if (sentences) o.trunc_sentences = sentences;
    if (level) o.level = level;
    if (kmax) o.kmax = kmax;
    if (weights) o.weights = weights;
    if (m >= 0) o.m = m;
    if (!novikov.empty()) o.novikov_order = blinfty::parse_rational(novikov);
    if (!period.empty()) o.period = blinfty::parse_rational(period);
    if (!plus.empty()) o.plus = parse_list(plus);
    if (!minus.empty()) o.minus = parse_list(minus);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return blinfty::InputError;
  }

  blinfty::CommandResult r = blinfty::run_command(o);
  std::cout << r.out;
  std::cerr << r.err;
  return r.status;
}
