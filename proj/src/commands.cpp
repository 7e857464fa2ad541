#include "blinfty/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blinfty/deformation.hpp"
#include "blinfty/dsl.hpp"
#include "blinfty/homology.hpp"
#include "blinfty/orbits.hpp"

namespace blinfty {

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string diagnostics(const std::vector<Diagnostic>& diags, const std::string& origin) {
  std::string out;
  for (const auto& d : diags) out += d.render(origin);
  return out;
}

TruncationPolicy policy_for(const ModelSpec& spec, const CommandOptions& o) {
  TruncationPolicy t = spec.policy();
  if (o.trunc_letters) t.max_letters = *o.trunc_letters;
  if (o.trunc_sentences) t.max_words = *o.trunc_sentences;
  if (o.novikov_order) t.ring.order = *o.novikov_order;
  return t;
}

std::string truncation_line(const TruncationPolicy& t) {
  std::string out = "truncation: N = " + std::to_string(t.max_letters) + " letters, K = " +
                    std::to_string(t.max_words) + " words";
  if (t.max_action) out += ", action ≤ " + to_string(*t.max_action);
  if (t.ring.order) out += ", filtration ≤ " + to_string(*t.ring.order);
  return out + "\n";
}

CommandResult check_model(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  TruncationPolicy t = policy_for(spec, o);
  const Alphabet& a = *spec.alphabet;
  r.out += truncation_line(t);
  Report rep = verify_blinfty(spec.operators, t, o.threads);
  r.out += rep.render(a, a);
  r.out += rep.ok ? "BL_∞ axiom verified up to truncation\n" : "BL_∞ axiom FAILS\n";
  if (!rep.ok) r.status = MathFailure;
  if (spec.augmentation) {
    Report aug = verify_morphism(*spec.augmentation, spec.operators, trivial_family(), t, o.threads);
    r.out += aug.render(a, Alphabet());
    r.out += aug.ok ? "augmentation verified up to truncation\n" : "augmentation FAILS\n";
    if (!aug.ok) r.status = MathFailure;
  }
  if (spec.mc) {
    try {
      OrderedResidual mc = verify_mc(spec.operators, *spec.mc, t.ring);
      r.out += "Maurer-Cartan equation: " + mc.render(a);
      if (!mc.vanishes()) r.status = MathFailure;
    } catch (const std::invalid_argument& e) {
      r.err += std::string("error: ") + e.what() + "\n";
      r.status = InputError;
    }
  }
  return r;
}

CommandResult check_morphism(const MorphismSpec& spec, const CommandOptions& o) {
  CommandResult r;
  TruncationPolicy t = policy_for(spec.source, o);
  const Alphabet& sa = *spec.source.alphabet;
  const Alphabet& ta = *spec.target.alphabet;
  r.out += truncation_line(t);
  for (const auto* side : {&spec.source, &spec.target}) {
    Report rep = verify_blinfty(side->operators, t, o.threads);
    if (!rep.ok) {
      r.out += rep.render(*side->alphabet, *side->alphabet);
      r.out += "BL_∞ axiom FAILS on " + (side == &spec.source ? spec.source_path : spec.target_path) + "\n";
      r.status = MathFailure;
      return r;
    }
  }
  Report rep = verify_morphism(spec.map, spec.source.operators, spec.target.operators, t, o.threads);
  r.out += rep.render(sa, ta);
  r.out += rep.ok ? "morphism equation verified up to truncation\n" : "morphism equation FAILS\n";
  if (!rep.ok) {
    r.status = MathFailure;
    return r;
  }
  FunctorialityReport f =
      functoriality_check(spec.map, spec.source.operators, spec.target.operators, o.kmax.value_or(3), t, o.threads);
  r.out += f.render(sa, ta);
  if (!f.holds || (f.witness_maps && !*f.witness_maps)) r.status = MathFailure;
  return r;
}

CommandResult homology_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  TruncationPolicy t = policy_for(spec, o);
  r.out += truncation_line(t);
  TruncatedComplex c = build_complex(spec.operators, o.level.value_or(1), t, o.threads);
  r.out += render(homology(c), c);
  return r;
}

CommandResult torsion_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  TruncationPolicy t = policy_for(spec, o);
  const Alphabet& a = *spec.alphabet;
  r.out += truncation_line(t);
  TorsionResult tr = torsion(spec.operators, o.kmax.value_or(3), t, o.threads);
  r.out += tr.render(a) + "\n";
  std::optional<std::size_t> k = o.weights;
  if (!k && spec.weights) k = static_cast<std::size_t>(*spec.weights);
  if (!k) return r;
  if (!spec.mc) {
    r.err = "error: a weighted witness needs an [mc] section\n";
    r.status = InputError;
    return r;
  }
  WeightedWitness w = weighted_witness(spec.operators, *spec.mc, spec.seed.value_or(Element{}), *k, t.ring);
  r.out += "weighted witness, k = " + std::to_string(*k) + ":\n" + w.render(a);
  return r;
}

CommandResult deform_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  if (!spec.mc) {
    r.err = "error: deform needs an [mc] section\n";
    r.status = InputError;
    return r;
  }
  TruncationPolicy t = policy_for(spec, o);
  const Alphabet& a = *spec.alphabet;
  OrderedResidual mc = verify_mc(spec.operators, *spec.mc, t.ring);
  r.out += "Maurer-Cartan equation: " + mc.render(a);
  if (!mc.vanishes()) {
    r.out += "not a Maurer-Cartan element; no deformation\n";
    r.status = MathFailure;
    return r;
  }
  ModelSpec out = spec;
  out.operators = deform(spec.operators, *spec.mc, t.ring);
  out.mc.reset();
  out.name = spec.name.empty() ? "deformed" : spec.name + "_deformed";
  Report rep = verify_blinfty(out.operators, t, o.threads);
  r.out += rep.render(a, a);
  r.out += rep.ok ? "deformed BL_∞ axiom verified up to truncation\n" : "deformed BL_∞ axiom FAILS\n";
  if (!rep.ok) r.status = MathFailure;
  r.out += "\n" + print_model(out);
  return r;
}

CommandResult linearize_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  TruncationPolicy t = policy_for(spec, o);
  const Alphabet& a = *spec.alphabet;
  if (!spec.augmentation) {
    AugmentationSearch s = search_augmentations(spec.operators, {Rational(-1), Rational(0), Rational(1)},
                                                t.max_action, t);
    r.out += "no [augmentation] section\n" + s.render(a);
    if (s.solutions.empty()) r.status = MathFailure;
    return r;
  }
  Report aug = verify_morphism(*spec.augmentation, spec.operators, trivial_family(), t, o.threads);
  if (!aug.ok) {
    r.out += aug.render(a, Alphabet()) + "augmentation FAILS\n";
    r.status = MathFailure;
    return r;
  }
  Linearization lin = linearize(spec.operators, *spec.augmentation);
  r.out += lin.render();
  if (!lin.constant_terms.empty() || !lin.differential_squares_to_zero) r.status = MathFailure;
  return r;
}

std::string spectrum_header(const OrbitSpectrum& s) {
  std::string out = "spectrum: " + std::to_string(s.orbits.size()) + " orbits below period " +
                    to_string(s.threshold) + ", n = " + std::to_string(s.sft_n) + "\n";
  for (const auto& w : s.warnings) out += "warning: " + w + "\n";
  for (const auto& sym : s.symbolic) {
    out += "symbolic class " + sym.name + " label=";
    for (std::size_t i = 0; i < sym.label.size(); ++i) out += (i ? "," : "") + std::to_string(sym.label[i]);
    out += "\n";
  }
  return out;
}

CommandResult spectrum_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  if (!spec.geometry) {
    r.err = "error: spectrum needs a [geometry] section\n";
    r.status = InputError;
    return r;
  }
  Geometry g = *spec.geometry;
  if (o.period) g.bound = *o.period;
  OrbitSpectrum s = g.spectrum();
  if (g.kind == "morse") {
    MorseHomology h = morse_homology(g.morse);
    r.out += "Morse homology by index:";
    for (std::size_t i = 0; i < h.dims.size(); ++i) r.out += " " + std::to_string(h.dims[i]);
    r.out += "\n";
  }
  r.out += spectrum_header(s) + "\n" + s.dsl();
  return r;
}

CommandResult certify_cmd(const ModelSpec& spec, const CommandOptions& o) {
  CommandResult r;
  if (!spec.geometry || spec.geometry->kind != "spinal") {
    r.err = "error: certify needs a spinal [geometry] section\n";
    r.status = InputError;
    return r;
  }
  const Geometry& g = *spec.geometry;
  OrbitSpectrum s = g.spectrum();
  CertificateResult c = certify_lower_bound(s, g.regions, o.m.value_or(1), o.period.value_or(g.bound), g.cz_hypothesis);
  r.out += c.render(s);
  if (c.kind != CertificateResult::Kind::Certificate) r.status = MathFailure;
  return r;
}

CommandResult vdim_cmd(const CommandOptions& o) {
  CommandResult r;
  ConfigurationQuery q;
  q.n = o.n;
  q.plus = o.plus;
  q.minus = o.minus;
  q.plus_names = o.plus_names;
  q.minus_names = o.minus_names;
  q.genus = o.genus;
  q.point_constraint = o.point;
  q.constraint_dim = o.constraint_dim;
  VdimResult v = vdim(q);
  r.out += "vdim = " + to_string(v.value) + "\n";
  if (v.trivial_cylinder) r.out += "note: trivial cylinder (excluded from counts)\n";
  return r;
}

CommandResult dispatch(const CommandOptions& o, const std::string& text, const std::string& origin) {
  CommandResult r;
  if (is_morphism_file(text)) {
    if (o.command != "check") {
      r.err = origin + ": error: morphism files support only 'check'\n";
      r.status = InputError;
      return r;
    }
    std::filesystem::path base = std::filesystem::path(origin).parent_path();
    std::vector<Diagnostic> nested;
    auto load = [&](const std::string& rel) {
      std::filesystem::path p = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : base / rel;
      auto body = read_file(p.string());
      ParseResult pr;
      if (!body) {
        Diagnostic d;
        d.code = diag::MissingSection;
        d.message = "cannot read '" + p.string() + "'";
        pr.diagnostics.push_back(d);
        return pr;
      }
      pr = parse_model(*body);
      for (const auto& d : pr.diagnostics) r.err += d.render(p.string());
      return pr;
    };
    MorphismParseResult mp = parse_morphism(text, load);
    if (!mp.spec) {
      r.err += diagnostics(mp.diagnostics, origin);
      r.status = InputError;
      return r;
    }
    return check_morphism(*mp.spec, o);
  }
  ParseResult pr = parse_model(text);
  if (!pr.spec) {
    r.err = diagnostics(pr.diagnostics, origin);
    r.status = InputError;
    return r;
  }
  const ModelSpec& spec = *pr.spec;
  if (o.command == "check") return check_model(spec, o);
  if (o.command == "homology") return homology_cmd(spec, o);
  if (o.command == "torsion") return torsion_cmd(spec, o);
  if (o.command == "deform") return deform_cmd(spec, o);
  if (o.command == "linearize") return linearize_cmd(spec, o);
  if (o.command == "spectrum") return spectrum_cmd(spec, o);
  if (o.command == "certify") return certify_cmd(spec, o);
  if (o.command == "print") {
    r.out = print_model(spec);
    return r;
  }
  r.err = "error: unknown command '" + o.command + "'\n";
  r.status = InputError;
  return r;
}

CommandResult guarded(const std::function<CommandResult()>& f) {
  try {
    return f();
  } catch (const GeometryError& e) {
    return {InputError, "", std::string("error: ") + e.what() + "\n"};
  } catch (const ContractError& e) {
    return {InputError, "", std::string("error: ") + e.what() + "\n"};
  } catch (const BoundaryError& e) {
    return {MathFailure, "", std::string("error: ") + e.what() + "\n"};
  } catch (const std::invalid_argument& e) {
    return {InputError, "", std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace

CommandResult run_command_text(const CommandOptions& options, const std::string& text, const std::string& origin) {
  return guarded([&] { return dispatch(options, text, origin); });
}

CommandResult run_command(const CommandOptions& options) {
  if (options.command == "vdim") return guarded([&] { return vdim_cmd(options); });
  auto text = read_file(options.file);
  if (!text) return {InputError, "", "error: cannot read '" + options.file + "'\n"};
  return run_command_text(options, *text, options.file);
}

}  // namespace blinfty
