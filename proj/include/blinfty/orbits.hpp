#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blinfty/graded.hpp"

namespace blinfty {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CriticalPoint {
  std::string name;
  int index = 0;
  Rational value;  // f(p) in (0,1)
};

struct MorseEntry {
  std::size_t from, to;
  long coefficient;
};

struct MorseData {
  int complex_dim = 1;  // dim_C Σ
  std::vector<CriticalPoint> points;
  std::vector<MorseEntry> differential;

  void validate() const;  // self-indexing, unique minimum, values in (0,1), uniform index step
  int step() const;       // +1 or -1; 0 for an empty differential
};

struct MorseHomology {
  std::vector<std::size_t> dims;  // by Morse index
};

MorseHomology morse_homology(const MorseData& m);  // throws GeometryError when d∘d ≠ 0

struct OrbitRecord {
  std::string name;
  std::optional<Rational> cz;      // absent for symbolic paper/collar classes
  std::optional<Rational> period;  // absent for symbolic classes
  std::vector<long> label;
  std::vector<std::string> flags;
  bool has_flag(const std::string& f) const;
};

struct OrbitSpectrum {
  int sft_n = 3;                     // dim Y = 2n − 1
  Rational threshold;                // all periods < threshold (handles: ≤)
  std::vector<OrbitRecord> orbits;   // with CZ and period
  std::vector<OrbitRecord> symbolic; // paper/collar classes
  std::vector<std::string> warnings;

  std::vector<Generator> generators() const;  // SFT degree |q| = CZ + n − 3
  std::string dsl() const;                    // a [generators] section
};

OrbitSpectrum product_boundary_spectrum(const MorseData& m, const Rational& D);
OrbitSpectrum handle_spectrum(int n, const Rational& D, const Rational& tau);
OrbitSpectrum spinal_spectrum(const OrbitSpectrum& base, int k, const Rational& D);

struct ConfigurationQuery {
  int n = 3;
  std::vector<Rational> plus, minus;
  std::vector<std::string> plus_names, minus_names;  // optional, used for the trivial-cylinder flag
  int genus = 0;
  bool point_constraint = false;
  int constraint_dim = 0;  // dimension of the constraining cycle (0: a point)
};

struct VdimResult {
  Rational value;
  bool trivial_cylinder = false;
};

VdimResult vdim(const ConfigurationQuery& q);  // throws GeometryError on empty Γ₊

struct Configuration {
  std::vector<std::size_t> orbits;  // indices into OrbitSpectrum::orbits, nondecreasing
  Rational period;
  Rational vdim;
};

struct CertificateResult {
  enum class Kind { Certificate, Counterexample, Obstructed };
  Kind kind = Kind::Certificate;
  int regions = 1;
  int m = 0;
  std::vector<Configuration> configurations;
  std::optional<Configuration> counterexample;
  std::vector<std::string> hypothesis_violations;

  std::string render(const OrbitSpectrum& s) const;
};

CertificateResult certify_lower_bound(const OrbitSpectrum& spinal, int regions, int m, const Rational& D,
                                      std::optional<Rational> cz_hypothesis = std::nullopt);

}  // namespace blinfty
