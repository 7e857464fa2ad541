#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blinfty/orbits.hpp"
#include "blinfty/tree_calculus.hpp"

namespace blinfty {

enum class CoeffKind { Rational, Novikov, Group };

struct Geometry {
  std::string kind;  // "morse", "handle" or "spinal"
  // morse
  MorseData morse;
  // handle
  int handle_n = 2;
  Rational tau = 1;
  // spinal
  int regions = 1;
  int sft_n = 3;
  std::vector<OrbitRecord> base;
  std::optional<Rational> cz_hypothesis;
  // shared period bound D
  Rational bound = 1;

  OrbitSpectrum spectrum() const;  // throws GeometryError
};

struct ModelSpec {
  std::string name;
  std::optional<int> n;
  bool independent_gradings = false;
  bool action_decreasing = false;
  CoeffKind coefficients = CoeffKind::Rational;
  std::optional<Rational> novikov_order;
  std::vector<Rational> pairing;

  AlphabetPtr alphabet = std::make_shared<Alphabet>();
  OperatorFamily operators;
  std::optional<MorphismFamily> augmentation;
  std::optional<WordSum> mc;
  std::optional<Element> seed;
  std::optional<int> weights;
  std::optional<Geometry> geometry;

  std::optional<std::size_t> trunc_letters, trunc_sentences;
  std::optional<Rational> trunc_action;

  CoeffRing ring() const;
  TruncationPolicy policy() const;  // defaults: 4 letters, 3 sentences
};

struct Diagnostic {
  std::string severity = "error";
  std::string code;
  std::string message;
  int line = 0;
  int column = 0;
  std::string excerpt;

  std::string render(const std::string& file) const;
};

struct ParseResult {
  std::optional<ModelSpec> spec;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return spec.has_value(); }
};

// Error codes, one per failure class.
namespace diag {
inline constexpr const char* Syntax = "E100";
inline constexpr const char* UnknownSection = "E101";
inline constexpr const char* MissingSection = "E102";
inline constexpr const char* DuplicateName = "E103";
inline constexpr const char* UnknownGenerator = "E104";
inline constexpr const char* DegreeViolation = "E105";
inline constexpr const char* InvalidValue = "E106";
inline constexpr const char* UnknownKey = "E107";
inline constexpr const char* ReservedName = "E108";
inline constexpr const char* DuplicateSection = "E109";
inline constexpr const char* Geometry = "E110";
inline constexpr const char* MissingKey = "E111";
}  // namespace diag

ParseResult parse_model(std::string_view text);
std::string print_model(const ModelSpec& spec);

// A morphism file names its source and target model files (resolved by
// `load`) and lists the components in a [map] section.
struct MorphismSpec {
  ModelSpec source, target;
  std::string source_path, target_path;
  MorphismFamily map;
};

struct MorphismParseResult {
  std::optional<MorphismSpec> spec;
  std::vector<Diagnostic> diagnostics;
};

bool is_morphism_file(std::string_view text);
MorphismParseResult parse_morphism(std::string_view text,
                                   const std::function<ParseResult(const std::string&)>& load);

}  // namespace blinfty
