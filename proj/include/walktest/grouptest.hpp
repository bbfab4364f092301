#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "walktest/designs.hpp"
#include "walktest/random.hpp"
#include "walktest/walks.hpp"

namespace walktest {

struct DefectiveSet {
  ItemKind kind = ItemKind::Vertex;
  std::vector<int> items;  // ascending
};

struct NoiseModel {
  enum class Kind { Noiseless, Flip, Dilution, Adversarial };
  Kind kind = Kind::Noiseless;
  double q = 0.0;          // flip or dilution probability
  std::vector<int> flips;  // adversarial: outcome indices to invert

  static NoiseModel noiseless() { return {}; }
  static NoiseModel flip(double q) { return {Kind::Flip, q, {}}; }
  static NoiseModel dilution(double q) { return {Kind::Dilution, q, {}}; }
  static NoiseModel adversarial(std::vector<int> idx) {
    return {Kind::Adversarial, 0.0, std::move(idx)};
  }
  /// Parses "none", "flip:q" or "dilute:q".
  static NoiseModel parse(const std::string& spec);
  std::string to_string() const;
};

struct OutcomeVector {
  std::vector<std::uint8_t> bits;
  NoiseModel noise;
  ItemKind item_kind = ItemKind::Vertex;

  int size() const { return static_cast<int>(bits.size()); }
  int positives() const;
};

/// OR of each pool against the defective set, then the noise model.
OutcomeVector simulate_tests(const MeasurementMatrix& M, const DefectiveSet& defectives,
                             const NoiseModel& noise, Rng& rng);

struct DisjunctWitness {
  int s0 = 0;                // item id of the covered column
  std::vector<int> others;   // item ids of the d covering columns
  int residual = 0;          // |S0 \ (S1 | ... | Sd)|
};

struct DisjunctCertificate {
  bool disjunct = false;
  int d = 0;
  int e = 0;
  std::optional<DisjunctWitness> witness;
};

struct DisjunctOptions {
  double budget = 1e8;  // max n * C(n - 1, d) subset evaluations
  int workers = 0;
};

/// Exhaustive (d, e)-disjunctness over the non-stripped columns. On violation
/// the witness is the lexicographically first (S0, {S1..Sd}).
DisjunctCertificate is_disjunct(const MeasurementMatrix& M, int d, int e = 0,
                                const DisjunctOptions& options = {});

/// Same check restricted to the listed item columns.
DisjunctCertificate is_disjunct_on(const MeasurementMatrix& M, const std::vector<int>& columns,
                                   int d, int e = 0, const DisjunctOptions& options = {});

/// n * C(n - 1, d) as a double.
double disjunct_work(int columns, int d);

/// Replays a witness against the matrix: true iff it shows |S0 \ OR Si| <= e.
bool witness_holds(const MeasurementMatrix& M, const DisjunctWitness& w, int d, int e);

struct DecodeResult {
  DefectiveSet set;
  bool oversized = false;  // more than d items returned
};

/// Items that appear in no negative test. `d` (if >= 0) only sets the flag.
DecodeResult decode_cover(const MeasurementMatrix& M, const OutcomeVector& y, int d = -1);

/// Items contained in at most `tau` negative tests.
DecodeResult decode_threshold(const MeasurementMatrix& M, const OutcomeVector& y, long long tau,
                              int d = -1);

/// Smallest x with P[Binomial(trials, p) <= x] >= confidence.
long long binomial_quantile(long long trials, double p, double confidence);

struct EtaChoice {
  double eta = 0.0;
  long long e = 0;
  long long tau = 0;
  long long flips = 0;  // binomial quantile the tolerance must cover
};

/// Smallest eta whose tolerance floor((e(eta) - 1) / 2) covers the
/// `confidence` quantile of Binomial(m, q) flips.
EtaChoice eta_for_flip_noise(double q, long long m, double confidence,
                             const std::function<long long(double)>& e_of_eta);

/// e(eta) taken from table1_params with the other inputs of `base`.
EtaChoice eta_for_flip_noise(double q, long long m, double confidence, const DesignParams& base,
                             int design);

std::string outcomes_to_json(const OutcomeVector& y);
OutcomeVector outcomes_from_json(const std::string& text);

}  // namespace walktest
