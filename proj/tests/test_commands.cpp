#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blinfty/commands.hpp"
#include "support.hpp"

using namespace blinfty;

namespace {

CommandResult run(const std::string& command, const std::string& rel) {
  CommandOptions o;
  o.command = command;
  o.file = testing::source_path(rel);
  return run_command(o);
}

}  // namespace

TEST_CASE("check reports success") {
  CommandResult r = run("check", "models/trivial.model");
  CHECK(r.status == Ok);
  CHECK(r.out.find("BL_∞ axiom verified up to truncation") != std::string::npos);
}

TEST_CASE("torsion golden line") {
  CommandOptions o;
  o.command = "torsion";
  o.file = testing::source_path("models/torsion1.model");
  o.kmax = 4;
  CommandResult r = run_command(o);
  CHECK(r.status == Ok);
  CHECK(r.out.find("T = 1 (exact, action-closed); witness: a⊙b") != std::string::npos);
}

TEST_CASE("axiom violation exits with a mathematical failure") {
  CommandOptions o;
  o.command = "check";
  std::string text = "[generators]\na z2=0\nb z2=1\nc z2=0\n[operators]\na -> b\nb -> c\n";
  CommandResult r = run_command_text(o, text, "chain.model");
  CHECK(r.status == MathFailure);
}

TEST_CASE("input errors exit with status 2") {
  CHECK(run("check", "models/does_not_exist.model").status == InputError);
  CommandOptions o;
  o.command = "check";
  CommandResult r = run_command_text(o, "[generators]\na z2=0\n[operators]\nz -> 1\n", "bad.model");
  CHECK(r.status == InputError);
  CHECK(r.err.find("bad.model:4:1: error[E104]") != std::string::npos);
  CommandOptions v;
  v.command = "vdim";
  CHECK(run_command(v).status == InputError);
}

TEST_CASE("certify and vdim") {
  CommandOptions o;
  o.command = "certify";
  o.file = testing::source_path("models/spinal_k3.model");
  o.m = 1;
  o.period = Rational(2);
  CommandResult r = run_command(o);
  CHECK(r.status == Ok);
  CHECK(r.out.rfind("certificate: all", 0) == 0);
  CommandOptions v;
  v.command = "vdim";
  v.n = 3;
  v.plus = {5};
  CommandResult rv = run_command(v);
  CHECK(rv.status == Ok);
  CHECK(rv.out.find("4") != std::string::npos);
}

TEST_CASE("reports do not depend on the thread count") {
  for (const char* f : {"models/ladder3.model", "models/torsion1plus.model", "models/cobordism2.model"}) {
    CommandOptions o;
    o.command = "torsion";
    o.file = testing::source_path(f);
    o.threads = 1;
    std::string one = run_command(o).out;
    o.threads = 4;
    CHECK(run_command(o).out == one);
  }
}
