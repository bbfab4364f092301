#include "walktest/designs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "walktest/error.hpp"

namespace walktest {

using nlohmann::json;

long long DesignParams::tau(int design) const {
  require(design >= 1 && design <= 4, ErrorKind::InvalidParameter, "design must be 1..4");
  return e[design - 1] >= 1 ? (e[design - 1] - 1) / 2 : 0;
}

DesignParams table1_params(int n, int d, int min_degree, double c, int mixing, double eta,
                           const DesignConstants& k) {
  require(d >= 1 && d < n, ErrorKind::InvalidParameter, "need 1 <= d < n");
  require(eta >= 0.0 && eta < 1.0, ErrorKind::InvalidParameter, "need 0 <= eta < 1");
  require(mixing >= 1, ErrorKind::InvalidParameter, "need T >= 1");
  require(c >= 1.0, ErrorKind::InvalidParameter, "need c >= 1");
  require(min_degree >= 1, ErrorKind::InvalidParameter, "need D >= 1");

  DesignParams p;
  p.n = n;
  p.d = d;
  p.min_degree = min_degree;
  p.c = c;
  p.mixing = mixing;
  p.eta = eta;
  p.constants = k;

  const double T = mixing, D = min_degree, dd = d;
  const double log_term = std::log(static_cast<double>(n) / d);
  auto up = [](double x) { return static_cast<long long>(std::ceil(x)); };

  p.d0 = up(k.kappa_d * c * c * dd * T * T);
  const long long m12 = up(k.kappa_m * std::pow(c, 4) * dd * dd * T * T * log_term);
  p.m[0] = p.m[1] = m12;
  p.m[2] = up(k.kappa_m * std::pow(c, 8) * dd * dd * dd * std::pow(T, 4) * log_term);
  p.m[3] = up(k.kappa_m * std::pow(c, 9) * dd * dd * dd * D * std::pow(T, 4) * log_term);

  // Walks must outlast the 2T(n) prefix during which visits are correlated
  // with the start.
  const long long min_t = 2LL * mixing + 1;
  p.t1 = static_cast<int>(std::max(min_t, up(k.kappa_t * n / (std::pow(c, 3) * dd * T))));
  p.t2 = static_cast<int>(std::max(min_t, up(k.kappa_t * n * D / (std::pow(c, 3) * dd * T))));

  const double noise = (1.0 - eta) * (1.0 - eta);
  // Clamped so that eta close to 1 cannot overflow.
  const long long e = static_cast<long long>(
      std::min(1e15, std::floor(k.kappa_e * eta * dd * log_term / noise)));
  for (int i = 0; i < 4; ++i) {
    p.m_noisy[i] = up(std::min(1e15, static_cast<double>(p.m[i]) / noise));
    p.e[i] = e;
  }
  return p;
}

bool MeasurementMatrix::is_stripped(int item) const {
  return std::binary_search(stripped.begin(), stripped.end(), item);
}

std::vector<int> MeasurementMatrix::columns() const {
  std::vector<int> cols;
  cols.reserve(n_items);
  for (int i = 0; i < n_items; ++i)
    if (!is_stripped(i)) cols.push_back(i);
  return cols;
}

namespace {

std::vector<int> footprint(const Walk& w, ItemKind kind) {
  std::vector<int> row = kind == ItemKind::Vertex ? w.vertices : w.edges;
  std::sort(row.begin(), row.end());
  row.erase(std::unique(row.begin(), row.end()), row.end());
  return row;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

constexpr int kSinkRetries = 100;

// Builds m rows; row i is produced by make_walk(i, attempt, rng) on stream
// (seed, i, attempt) until accept() holds.
template <typename MakeWalk>
void build_rows(MeasurementMatrix& M, int m, int workers, MakeWalk&& make_walk) {
  require(m >= 0, ErrorKind::InvalidParameter, "row count must be >= 0");
  M.rows.assign(m, {});
  M.walks.assign(m, {});
  parallel_for(static_cast<std::size_t>(m), resolve_workers(workers), [&](std::size_t i) {
    for (int attempt = 0; attempt < kSinkRetries; ++attempt) {
      Rng rng = stream_rng(M.seed, i, attempt);
      Walk w = make_walk(i, rng);
      if (w.terminated_by == Termination::CapExceeded) continue;
      M.rows[i] = footprint(w, M.item_kind);
      M.walks[i] = std::move(w);
      return;
    }
    throw Error(ErrorKind::GenerationFailure,
                "row " + std::to_string(i) + ": sink walk exceeded its cap " +
                    std::to_string(kSinkRetries) + " times");
  });
}

std::string start_name(const StartRule& s) {
  switch (s.kind) {
    case StartRule::Kind::Uniform: return "uniform";
    case StartRule::Kind::Fixed: return "fixed:" + std::to_string(s.fixed);
    case StartRule::Kind::DesignatedRoundRobin: return "designated-round-robin";
    case StartRule::Kind::DesignatedUniform: return "designated-uniform";
  }
  return "uniform";
}

}  // namespace

MeasurementMatrix design1(const Graph& g, const std::vector<int>& designated, int m, int t,
                          std::uint64_t seed, int workers) {
  const StartRule start =
      designated.empty() ? StartRule::uniform() : StartRule::round_robin(designated);
  return design1(g, start, m, t, seed, workers);
}

MeasurementMatrix design1(const Graph& g, const StartRule& start, int m, int t,
                          std::uint64_t seed, int workers) {
  require(t >= 0, ErrorKind::InvalidParameter, "walk length must be >= 0");
  start.validate(g);
  MeasurementMatrix M;
  M.item_kind = ItemKind::Vertex;
  M.n_items = g.num_vertices();
  M.seed = seed;
  M.design = {1, t, -1, 0, start.designated, start_name(start), 0};
  M.stripped = sorted_unique(start.designated);
  build_rows(M, m, workers, [&](std::size_t i, Rng& rng) {
    return walk_fixed(g, start.resolve(g, i, rng), t, rng);
  });
  return M;
}

MeasurementMatrix design2(const Graph& g, const StartRule& start, int m, int t,
                          std::uint64_t seed, int workers) {
  require(t >= 0, ErrorKind::InvalidParameter, "walk length must be >= 0");
  start.validate(g);
  MeasurementMatrix M;
  M.item_kind = ItemKind::Edge;
  M.n_items = g.num_edges();
  M.seed = seed;
  M.design = {2, t, -1, 0, {}, start_name(start), 0};
  build_rows(M, m, workers, [&](std::size_t i, Rng& rng) {
    return walk_fixed(g, start.resolve(g, i, rng), t, rng);
  });
  return M;
}

MeasurementMatrix design3(const Graph& g, const StartRule& start, int sink, int m,
                          long long cap, std::uint64_t seed, int workers) {
  start.validate(g);
  require(g.has_vertex(sink), ErrorKind::InvalidParameter, "sink out of range");
  require(std::find(start.designated.begin(), start.designated.end(), sink) ==
              start.designated.end(),
          ErrorKind::InvalidParameter, "sink must not be a designated vertex");
  MeasurementMatrix M;
  M.item_kind = ItemKind::Vertex;
  M.n_items = g.num_vertices();
  M.seed = seed;
  M.design = {3, 0, sink, cap, start.designated, start_name(start), 0};
  auto stripped = start.designated;
  stripped.push_back(sink);
  M.stripped = sorted_unique(std::move(stripped));
  build_rows(M, m, workers, [&](std::size_t i, Rng& rng) {
    return walk_to_sink(g, start.resolve(g, i, rng), sink, cap, rng);
  });
  return M;
}

MeasurementMatrix design4(const Graph& g, const StartRule& start, int sink, int m,
                          long long cap, std::uint64_t seed, int workers) {
  start.validate(g);
  require(g.has_vertex(sink), ErrorKind::InvalidParameter, "sink out of range");
  MeasurementMatrix M;
  M.item_kind = ItemKind::Edge;
  M.n_items = g.num_edges();
  M.seed = seed;
  M.design = {4, 0, sink, cap, {}, start_name(start), 0};
  build_rows(M, m, workers, [&](std::size_t i, Rng& rng) {
    return walk_to_sink(g, start.resolve(g, i, rng), sink, cap, rng);
  });
  return M;
}

bool rows_match_walks(const Graph& g, const MeasurementMatrix& M) {
  if (M.walks.size() != M.rows.size()) return false;
  for (std::size_t i = 0; i < M.rows.size(); ++i) {
    const Walk& w = M.walks[i];
    if (!walk_consistent(g, w)) return false;
    std::vector<int> replay = M.item_kind == ItemKind::Vertex ? w.vertices : w.edges;
    if (sorted_unique(std::move(replay)) != M.rows[i]) return false;
  }
  return true;
}

namespace {

// Union-find connectivity of a vertex subset under the given edges.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool rows_consistent(const Graph& g, const MeasurementMatrix& M) {
  for (const auto& row : M.rows) {
    if (M.item_kind == ItemKind::Vertex) {
      if (row.empty()) return false;  // every walk visits its start
      std::vector<int> local(g.num_vertices(), -1);
      for (std::size_t k = 0; k < row.size(); ++k) local[row[k]] = static_cast<int>(k);
      Dsu dsu(static_cast<int>(row.size()));
      for (int v : row)
        for (int w : g.neighbors(v))
          if (local[w] >= 0) dsu.unite(local[v], local[w]);
      for (std::size_t k = 1; k < row.size(); ++k)
        if (dsu.find(0) != dsu.find(static_cast<int>(k))) return false;
    } else {
      if (row.empty()) continue;  // zero-length walk
      Dsu dsu(g.num_vertices());
      for (int e : row) dsu.unite(g.edge(e).first, g.edge(e).second);
      const int root = dsu.find(g.edge(row[0]).first);
      for (int e : row)
        if (dsu.find(g.edge(e).first) != root) return false;
    }
  }
  return true;
}

std::vector<int> sink_incident_edges(const Graph& g, int sink) {
  const auto ids = g.incident_edges(sink);
  return sorted_unique({ids.begin(), ids.end()});
}

std::string to_string(ItemKind kind) { return kind == ItemKind::Vertex ? "vertex" : "edge"; }

ItemKind item_kind_from_string(const std::string& s) {
  if (s == "vertex") return ItemKind::Vertex;
  if (s == "edge") return ItemKind::Edge;
  throw Error(ErrorKind::InvalidParameter, "unknown item kind: " + s);
}

std::string matrix_to_json(const MeasurementMatrix& M) {
  json design{{"id", M.design.id},       {"t", M.design.t},
              {"sink", M.design.sink},   {"cap", M.design.cap},
              {"designated", M.design.designated}, {"start", M.design.start},
              {"e", M.design.e}};
  json j{{"item_kind", to_string(M.item_kind)},
         {"n_items", M.n_items},
         {"stripped", M.stripped},
         {"rows", M.rows},
         {"design", std::move(design)},
         {"seed", M.seed}};
  return j.dump();
}

MeasurementMatrix matrix_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("matrix JSON parse error: ") + e.what());
  }
  require(j.is_object() && j.contains("item_kind") && j.contains("n_items") &&
              j.contains("rows") && j["rows"].is_array(),
          ErrorKind::Io, "matrix JSON needs item_kind, n_items and rows");
  MeasurementMatrix M;
  try {
    M.item_kind = item_kind_from_string(j["item_kind"].get<std::string>());
    M.n_items = j["n_items"].get<int>();
    M.stripped = sorted_unique(j.value("stripped", std::vector<int>{}));
    for (const auto& r : j["rows"]) M.rows.push_back(sorted_unique(r.get<std::vector<int>>()));
    M.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("design")) {
      const auto& d = j["design"];
      M.design.id = d.value("id", 0);
      M.design.t = d.value("t", 0);
      M.design.sink = d.value("sink", -1);
      M.design.cap = d.value("cap", 0LL);
      M.design.designated = d.value("designated", std::vector<int>{});
      M.design.start = d.value("start", std::string("uniform"));
      M.design.e = d.value("e", 0LL);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("matrix JSON schema error: ") + e.what());
  }
  require(M.n_items >= 0, ErrorKind::Io, "n_items must be >= 0");
  for (const auto& r : M.rows)
    for (int id : r)
      require(id >= 0 && id < M.n_items, ErrorKind::Io, "row item out of range");
  for (int id : M.stripped)
    require(id >= 0 && id < M.n_items, ErrorKind::Io, "stripped item out of range");
  return M;
}

MeasurementMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open matrix file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return matrix_from_json(buf.str());
}

void write_matrix_file(const MeasurementMatrix& M, const std::string& path) {
  const std::string text = matrix_to_json(M);
  matrix_from_json(text);  // schema check before writing
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write matrix file " + path);
  out << text << '\n';
}

}  // namespace walktest
