#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blinfty/coeff.hpp"

namespace blinfty {

// Exit statuses shared by the CLI and the bindings.
enum Status : int { Ok = 0, MathFailure = 1, InputError = 2 };

struct CommandOptions {
  std::string command;  // check, homology, torsion, deform, linearize, spectrum, vdim, certify, print
  std::string file;
  std::optional<std::size_t> level, kmax, trunc_letters, trunc_sentences, weights;
  std::optional<Rational> novikov_order, period;
  std::optional<int> m;
  unsigned threads = 1;
  // vdim
  int n = 3;
  std::vector<Rational> plus, minus;
  std::vector<std::string> plus_names, minus_names;
  int genus = 0;
  bool point = false;
  int constraint_dim = 0;
};

struct CommandResult {
  int status = Ok;
  std::string out;  // report, deterministic for fixed inputs
  std::string err;  // diagnostics
};

CommandResult run_command(const CommandOptions& options);
// As above, with the model text given directly; `origin` names it in diagnostics
// and anchors relative paths of morphism files.
CommandResult run_command_text(const CommandOptions& options, const std::string& text, const std::string& origin);

}  // namespace blinfty
