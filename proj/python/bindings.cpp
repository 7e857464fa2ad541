#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blinfty/commands.hpp"
#include "blinfty/dsl.hpp"
#include "blinfty/homology.hpp"
#include "blinfty/orbits.hpp"

namespace py = pybind11;
using namespace blinfty;

namespace {

// Rationals cross the boundary as fractions.Fraction.
py::object fraction(const Rational& r) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_string(r));
}

Rational rational(const py::handle& h) { return parse_rational(py::str(h).cast<std::string>()); }

std::vector<Rational> rationals(const py::sequence& s) {
  std::vector<Rational> out;
  for (const auto& h : s) out.push_back(rational(h));
  return out;
}

ModelSpec parse_or_raise(const std::string& text) {
  ParseResult r = parse_model(text);
  if (!r.ok()) throw py::value_error(r.diagnostics.front().render("<model>"));
  return std::move(*r.spec);
}

py::tuple result_tuple(const CommandResult& r) { return py::make_tuple(r.status, r.out, r.err); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "BL-infinity model toolkit";

  m.def(
      "parse_model",
      [](const std::string& text) {
        ParseResult r = parse_model(text);
        py::dict out;
        py::list diags;
        for (const auto& d : r.diagnostics) diags.append(d.render("<model>"));
        out["ok"] = r.ok();
        out["diagnostics"] = diags;
        if (r.ok()) {
          py::list gens;
          for (const auto& g : r.spec->alphabet->generators()) gens.append(g.name);
          out["name"] = r.spec->name;
          out["generators"] = gens;
          out["operators"] = r.spec->operators.table().size();
        }
        return out;
      },
      py::arg("text"));

  m.def(
      "print_model", [](const std::string& text) { return print_model(parse_or_raise(text)); }, py::arg("text"));

  m.def(
      "run",
      [](const std::string& command, const std::string& file, std::optional<std::size_t> kmax,
         std::optional<std::size_t> level, unsigned threads) {
        CommandOptions o;
        o.command = command;
        o.file = file;
        o.kmax = kmax;
        o.level = level;
        o.threads = threads;
        return result_tuple(run_command(o));
      },
      py::arg("command"), py::arg("file"), py::arg("kmax") = py::none(), py::arg("level") = py::none(),
      py::arg("threads") = 1u, "Run a CLI command; returns (status, stdout, stderr).");

  m.def(
      "torsion",
      [](const std::string& text, std::size_t kmax) {
        ModelSpec spec = parse_or_raise(text);
        TorsionResult r = torsion(spec.operators, kmax, spec.policy());
        py::dict out;
        out["value"] = r.value ? py::cast(*r.value) : py::none();
        out["soundness"] = r.soundness;
        out["witness"] = r.witness ? py::cast(format(*spec.alphabet, *r.witness)) : py::none();
        out["report"] = r.render(*spec.alphabet);
        return out;
      },
      py::arg("text"), py::arg("kmax") = 3);

  m.def(
      "vdim",
      [](int n, const py::sequence& plus, const py::sequence& minus, int genus, bool point, int constraint_dim) {
        ConfigurationQuery q;
        q.n = n;
        q.plus = rationals(plus);
        q.minus = rationals(minus);
        q.genus = genus;
        q.point_constraint = point;
        q.constraint_dim = constraint_dim;
        VdimResult r;
        try {
          r = vdim(q);
        } catch (const GeometryError& e) {
          throw py::value_error(e.what());
        }
        return py::make_tuple(fraction(r.value), r.trivial_cylinder);
      },
      py::arg("n"), py::arg("plus"), py::arg("minus") = py::list(), py::arg("genus") = 0, py::arg("point") = false,
      py::arg("constraint_dim") = 0);

  m.def(
      "handle_cz",
      [](int n, const py::object& bound, const py::object& tau) {
        py::list out;
        for (const auto& o : handle_spectrum(n, rational(bound), rational(tau)).orbits) out.append(fraction(*o.cz));
        return out;
      },
      py::arg("n"), py::arg("bound"), py::arg("tau") = 1);
}
