#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "walktest/graph.hpp"
#include "walktest/walks.hpp"

namespace walktest {

/// Multipliers for the hidden constants of the asymptotic parameter table.
struct DesignConstants {
  double kappa_t = 1.0;
  double kappa_m = 1.0;
  double kappa_e = 1.0;
  double kappa_d = 1.0;
};

/// Derived parameters for Designs 1-4. Index k of the arrays is Design k+1.
struct DesignParams {
  int n = 0;
  int d = 0;
  int min_degree = 0;  // D
  double c = 1.0;
  int mixing = 1;      // T(n)
  double eta = 0.0;
  DesignConstants constants;

  long long d0 = 0;
  int t1 = 0;
  int t2 = 0;
  std::array<long long, 4> m{};
  std::array<long long, 4> m_noisy{};
  std::array<long long, 4> e{};

  bool degree_sufficient() const { return min_degree >= d0; }
  /// Decoder threshold floor((e - 1) / 2) for Design `design` (1-based).
  long long tau(int design) const;
};

DesignParams table1_params(int n, int d, int min_degree, double c, int mixing, double eta,
                           const DesignConstants& constants = {});

struct MatrixDesign {
  int id = 1;
  int t = 0;           // walk length (Designs 1, 2)
  int sink = -1;       // Designs 3, 4
  long long cap = 0;   // sink-walk cap (Designs 3, 4)
  std::vector<int> designated;
  std::string start = "uniform";
  long long e = 0;     // disjunctness tolerance the parameters were chosen for
};

/// Pooled tests over vertices or edges.
///
/// `rows` hold the full walk footprint, including stripped items; the column
/// view used by simulation, decoding and disjunctness excludes `stripped`.
struct MeasurementMatrix {
  ItemKind item_kind = ItemKind::Vertex;
  int n_items = 0;
  std::vector<std::vector<int>> rows;  // each sorted ascending, unique
  std::vector<int> stripped;           // sorted ascending
  MatrixDesign design;
  std::uint64_t seed = 0;
  /// Recorded walks, one per row. Kept in memory only.
  std::vector<Walk> walks;

  int num_rows() const { return static_cast<int>(rows.size()); }
  bool is_stripped(int item) const;
  /// Items that remain as columns, ascending.
  std::vector<int> columns() const;
};

/// Design 1: vertex sets of fixed-length walks; designated columns stripped.
MeasurementMatrix design1(const Graph& g, const std::vector<int>& designated, int m, int t,
                          std::uint64_t seed, int workers = 0);
/// Design 1 with an explicit start rule (designated columns still stripped).
MeasurementMatrix design1(const Graph& g, const StartRule& start, int m, int t,
                          std::uint64_t seed, int workers = 0);

/// Design 2: edge sets of fixed-length walks from `start`.
MeasurementMatrix design2(const Graph& g, const StartRule& start, int m, int t,
                          std::uint64_t seed, int workers = 0);

/// Design 3: vertex sets of walks run to `sink`; designated and sink columns
/// stripped. Capped walks are regenerated (up to 100 attempts per row).
MeasurementMatrix design3(const Graph& g, const StartRule& start, int sink, int m,
                          long long cap, std::uint64_t seed, int workers = 0);

/// Design 4: edge sets of walks run to `sink`. Nothing is stripped.
MeasurementMatrix design4(const Graph& g, const StartRule& start, int sink, int m,
                          long long cap, std::uint64_t seed, int workers = 0);

/// Replays every recorded walk against g and the row it produced.
bool rows_match_walks(const Graph& g, const MeasurementMatrix& M);

/// Walk-free consistency check: a vertex set is the footprint of some walk
/// iff it induces a connected subgraph; an edge set iff its edges form a
/// connected subgraph.
bool rows_consistent(const Graph& g, const MeasurementMatrix& M);

/// Edges incident to `sink`, ascending.
std::vector<int> sink_incident_edges(const Graph& g, int sink);

std::string matrix_to_json(const MeasurementMatrix& M);
MeasurementMatrix matrix_from_json(const std::string& text);
MeasurementMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const MeasurementMatrix& M, const std::string& path);

std::string to_string(ItemKind kind);
ItemKind item_kind_from_string(const std::string& s);

}  // namespace walktest
