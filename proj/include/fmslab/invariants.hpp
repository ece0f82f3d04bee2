#pragma once

#include <gmpxx.h>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmslab {

struct SaitoScan;

using Exponent = std::array<int, 3>;

// Exact polynomial in up to three variables; terms with zero coefficient are never stored.
struct PolyGerm {
  int nvars = 1;
  std::vector<std::string> names;  // variable names, index order
  std::map<Exponent, mpq_class> terms;

  // Plain-text polynomial over single-letter variables, e.g. "x^4 + y^4 + (1/3)*x^2*y^2".
  // Variables are indexed alphabetically. Throws ConfigError on syntax errors.
  static PolyGerm parse(std::string_view text);

  void add(const Exponent& e, const mpq_class& c);
  int min_degree() const;
  std::string to_string() const;
  void check() const;  // throws ConfigError unless f(0) = 0 and f != 0
};

std::vector<PolyGerm> jacobian(const PolyGerm& f);

struct QuotientStep {
  int degree = 0;     // truncation degree D
  long dimension = 0; // dim O / (I + m^D)
  bool absorbed = false;
};

struct QuotientResult {
  long dimension = 0;
  int truncation_degree = 0;
  std::vector<QuotientStep> trace;
};

// dim O / <generators>, via truncation degrees 6, 8, ..., 24; throws NumericalError when the
// quotient does not stabilize (non-isolated germ).
QuotientResult local_quotient(const std::vector<PolyGerm>& generators, int nvars);

long milnor(const PolyGerm& f);
long tjurina(const PolyGerm& f);

struct InvariantReport {
  std::string germ;
  long milnor = 0;
  long tjurina = 0;
  long modality_gap = 0;
  int truncation_degree_used = 0;
  long predicted_peaks = 0;
  std::optional<long> claimed_tjurina;
  bool tjurina_discrepancy = false;
  std::vector<QuotientStep> milnor_trace;
};

InvariantReport analyze_germ(const PolyGerm& f, std::optional<long> claimed_tjurina = std::nullopt);

bool peak_consistency(const PolyGerm& f, const SaitoScan& scan);

}  // namespace fmslab
