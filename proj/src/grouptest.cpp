#include "walktest/grouptest.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "walktest/error.hpp"

namespace walktest {

using nlohmann::json;

NoiseModel NoiseModel::parse(const std::string& spec) {
  if (spec == "none" || spec == "noiseless") return noiseless();
  const auto colon = spec.find(':');
  require(colon != std::string::npos, ErrorKind::InvalidParameter,
          "noise must be none, flip:q or dilute:q");
  const std::string kind = spec.substr(0, colon);
  double q = 0;
  try {
    q = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidParameter, "bad noise probability in " + spec);
  }
  if (kind == "flip") {
    require(q >= 0.0 && q < 0.5, ErrorKind::InvalidParameter, "flip noise needs 0 <= q < 1/2");
    return flip(q);
  }
  if (kind == "dilute" || kind == "dilution") {
    require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidParameter, "dilution needs 0 <= q <= 1");
    return dilution(q);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown noise kind: " + kind);
}

std::string NoiseModel::to_string() const {
  switch (kind) {
    case Kind::Noiseless: return "none";
    case Kind::Flip: return "flip:" + json(q).dump();
    case Kind::Dilution: return "dilute:" + json(q).dump();
    case Kind::Adversarial: return "adversarial:" + json(flips).dump();
  }
  return "none";
}

int OutcomeVector::positives() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

OutcomeVector simulate_tests(const MeasurementMatrix& M, const DefectiveSet& defectives,
                             const NoiseModel& noise, Rng& rng) {
  require(M.item_kind == defectives.kind, ErrorKind::InvalidParameter,
          "defective kind " + to_string(defectives.kind) + " does not match matrix kind " +
              to_string(M.item_kind));
  std::vector<char> is_def(M.n_items, 0);
  for (int x : defectives.items) {
    require(x >= 0 && x < M.n_items, ErrorKind::InvalidParameter,
            "defective item out of range: " + std::to_string(x));
    require(!M.is_stripped(x), ErrorKind::InvalidParameter,
            "defective item " + std::to_string(x) + " is a stripped column");
    is_def[x] = 1;
  }
  OutcomeVector y;
  y.noise = noise;
  y.item_kind = M.item_kind;
  y.bits.assign(M.num_rows(), 0);
  switch (noise.kind) {
    case NoiseModel::Kind::Flip:
      require(noise.q >= 0.0 && noise.q < 0.5, ErrorKind::InvalidParameter,
              "flip noise needs 0 <= q < 1/2");
      break;
    case NoiseModel::Kind::Dilution:
      require(noise.q >= 0.0 && noise.q <= 1.0, ErrorKind::InvalidParameter,
              "dilution needs 0 <= q <= 1");
      break;
    default: break;
  }
  const bool dilute = noise.kind == NoiseModel::Kind::Dilution;
  for (int r = 0; r < M.num_rows(); ++r) {
    bool positive = false;
    for (int x : M.rows[r]) {
      if (!is_def[x]) continue;
      // Under dilution every defective in the pool draws independently.
      if (dilute && bernoulli(rng, noise.q)) continue;
      positive = true;
      if (!dilute) break;
    }
    y.bits[r] = positive;
  }
  if (noise.kind == NoiseModel::Kind::Flip) {
    for (auto& b : y.bits)
      if (bernoulli(rng, noise.q)) b ^= 1;
  } else if (noise.kind == NoiseModel::Kind::Adversarial) {
    for (int idx : noise.flips) {
      require(idx >= 0 && idx < y.size(), ErrorKind::InvalidParameter,
              "adversarial flip index out of range");
      y.bits[idx] ^= 1;
    }
  }
  return y;
}

// --- disjunctness ---------------------------------------------------------

double disjunct_work(int columns, int d) {
  if (columns <= 0) return 0.0;
  double c = 1.0;
  for (int i = 0; i < d; ++i) c = c * (columns - 1 - i) / (i + 1);
  return columns * std::max(0.0, c);
}

namespace {

// Column-major bitsets over the rows of M for a chosen list of items.
struct ColumnBits {
  int words = 0;
  std::vector<int> items;
  std::vector<std::uint64_t> data;

  ColumnBits(const MeasurementMatrix& M, std::vector<int> cols) : items(std::move(cols)) {
    words = (M.num_rows() + 63) / 64;
    std::vector<int> slot(M.n_items, -1);
    for (std::size_t k = 0; k < items.size(); ++k) slot[items[k]] = static_cast<int>(k);
    data.assign(items.size() * words, 0);
    for (int r = 0; r < M.num_rows(); ++r)
      for (int x : M.rows[r])
        if (slot[x] >= 0) data[slot[x] * words + r / 64] |= 1ULL << (r % 64);
  }
  const std::uint64_t* col(int k) const { return data.data() + static_cast<std::size_t>(k) * words; }
  int size() const { return static_cast<int>(items.size()); }
};

int popcount(const std::uint64_t* a, int words) {
  int c = 0;
  for (int w = 0; w < words; ++w) c += std::popcount(a[w]);
  return c;
}

int overlap(const std::uint64_t* a, const std::uint64_t* b, int words) {
  int c = 0;
  for (int w = 0; w < words; ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

// Columns of the other items restricted to the rows where S0 is set.
struct Restricted {
  int width = 0;  // words per mask
  int bits = 0;   // |S0|
  std::vector<std::uint64_t> masks;
  std::vector<int> pop;
  std::vector<int> column;  // source column index per mask

  const std::uint64_t* mask(int k) const { return masks.data() + static_cast<std::size_t>(k) * width; }
};

Restricted restrict_to(const ColumnBits& cb, int s0, const std::vector<int>& others) {
  Restricted r;
  const std::uint64_t* base = cb.col(s0);
  std::vector<int> rows;
  for (int w = 0; w < cb.words; ++w)
    for (std::uint64_t x = base[w]; x; x &= x - 1) rows.push_back(w * 64 + std::countr_zero(x));
  r.bits = static_cast<int>(rows.size());
  r.width = std::max(1, (r.bits + 63) / 64);
  r.masks.assign(others.size() * r.width, 0);
  for (std::size_t k = 0; k < others.size(); ++k) {
    const std::uint64_t* c = cb.col(others[k]);
    std::uint64_t* out = r.masks.data() + k * r.width;
    int p = 0;
    for (int b = 0; b < r.bits; ++b) {
      const int row = rows[b];
      if ((c[row / 64] >> (row % 64)) & 1ULL) {
        out[b / 64] |= 1ULL << (b % 64);
        ++p;
      }
    }
    r.pop.push_back(p);
    r.column.push_back(others[k]);
  }
  return r;
}

int covered_count(const std::vector<std::uint64_t>& covered) {
  int c = 0;
  for (auto w : covered) c += std::popcount(w);
  return c;
}

// Depth-first search for <= depth_left masks (taken from index `from` on, in
// descending popcount order) whose union covers >= target bits.
bool cover_search(const Restricted& r, const std::vector<int>& order, std::size_t from,
                  int depth_left, std::vector<std::uint64_t>& covered, int target) {
  const int have = covered_count(covered);
  if (have >= target) return true;
  if (depth_left == 0) return false;
  std::vector<std::uint64_t> next(r.width);
  for (std::size_t i = from; i < order.size(); ++i) {
    const int k = order[i];
    if (have + depth_left * r.pop[k] < target) break;
    const std::uint64_t* m = r.mask(k);
    bool gains = false;
    for (int w = 0; w < r.width; ++w) {
      next[w] = covered[w] | m[w];
      gains = gains || next[w] != covered[w];
    }
    if (!gains) continue;
    if (cover_search(r, order, i + 1, depth_left - 1, next, target)) return true;
  }
  return false;
}

// Whether column s0 is covered, up to e rows, by some d other columns.
bool column_violated(const ColumnBits& cb, int s0, int d, int e) {
  const int n = cb.size();
  if (n - 1 < d) return false;  // no choice of d other columns exists
  const std::uint64_t* base = cb.col(s0);
  const int k = popcount(base, cb.words);
  const int target = k - e;
  if (target <= 0 || d == 0) return target <= 0;

  std::vector<int> others;
  std::vector<int> ov;
  for (int j = 0; j < n; ++j) {
    if (j == s0) continue;
    const int o = overlap(base, cb.col(j), cb.words);
    if (o > 0) {
      others.push_back(j);
      ov.push_back(o);
    }
  }
  std::vector<int> top = ov;
  const int take = std::min<int>(d, static_cast<int>(top.size()));
  std::partial_sort(top.begin(), top.begin() + take, top.end(), std::greater<>());
  long long best = 0;
  for (int i = 0; i < take; ++i) best += top[i];
  if (best < target) return false;

  Restricted r = restrict_to(cb, s0, others);
  // Deduplicate identical masks; keep the first occurrence.
  std::vector<int> order(others.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (r.pop[a] != r.pop[b]) return r.pop[a] > r.pop[b];
    return std::lexicographical_compare(r.mask(a), r.mask(a) + r.width, r.mask(b),
                                        r.mask(b) + r.width);
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](int a, int b) {
                            return std::equal(r.mask(a), r.mask(a) + r.width, r.mask(b));
                          }),
              order.end());
  std::vector<std::uint64_t> covered(r.width, 0);
  return cover_search(r, order, 0, d, covered, target);
}

// Lexicographically first d-subset (column indices) violating at s0.
bool first_witness(const ColumnBits& cb, int s0, int d, int e, std::vector<int>& pick,
                   int& residual) {
  std::vector<int> others;
  for (int j = 0; j < cb.size(); ++j)
    if (j != s0) others.push_back(j);
  const Restricted r = restrict_to(cb, s0, others);
  const int target = r.bits - e;
  std::vector<int> suffix_max(others.size() + 1, 0);
  for (int i = static_cast<int>(others.size()) - 1; i >= 0; --i)
    suffix_max[i] = std::max(suffix_max[i + 1], r.pop[i]);

  std::vector<int> chosen;
  std::vector<std::vector<std::uint64_t>> stack(d + 1, std::vector<std::uint64_t>(r.width, 0));
  std::function<bool(int, int)> rec = [&](int from, int depth) -> bool {
    const int have = covered_count(stack[depth]);
    if (depth == d) {
      if (have >= target) {
        residual = r.bits - have;
        return true;
      }
      return false;
    }
    const int left = d - depth;
    for (int i = from; i + left <= static_cast<int>(others.size()); ++i) {
      if (have + left * suffix_max[i] < target) break;
      for (int w = 0; w < r.width; ++w) stack[depth + 1][w] = stack[depth][w] | r.mask(i)[w];
      chosen.push_back(i);
      if (rec(i + 1, depth + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!rec(0, 0)) return false;
  pick.clear();
  for (int i : chosen) pick.push_back(others[i]);
  return true;
}

}  // namespace

DisjunctCertificate is_disjunct(const MeasurementMatrix& M, int d, int e,
                                const DisjunctOptions& options) {
  return is_disjunct_on(M, M.columns(), d, e, options);
}

DisjunctCertificate is_disjunct_on(const MeasurementMatrix& M, const std::vector<int>& columns,
                                   int d, int e, const DisjunctOptions& options) {
  require(d >= 0 && e >= 0, ErrorKind::InvalidParameter, "need d >= 0 and e >= 0");
  const int n = static_cast<int>(columns.size());
  const double work = disjunct_work(n, d);
  require(work <= options.budget, ErrorKind::SizeExceeded,
          "disjunctness check needs " + json(work).dump() + " subset evaluations over " +
              std::to_string(n) + " columns (budget " + json(options.budget).dump() + ")");
  for (int x : columns)
    require(x >= 0 && x < M.n_items, ErrorKind::InvalidParameter, "column out of range");

  const ColumnBits cb(M, columns);
  std::atomic<int> first_bad{std::numeric_limits<int>::max()};
  parallel_for(static_cast<std::size_t>(n), resolve_workers(options.workers), [&](std::size_t i) {
    const int s0 = static_cast<int>(i);
    if (s0 > first_bad.load(std::memory_order_relaxed)) return;
    if (column_violated(cb, s0, d, e)) {
      int cur = first_bad.load();
      while (s0 < cur && !first_bad.compare_exchange_weak(cur, s0)) {
      }
    }
  });

  DisjunctCertificate cert;
  cert.d = d;
  cert.e = e;
  const int bad = first_bad.load();
  cert.disjunct = bad == std::numeric_limits<int>::max();
  if (!cert.disjunct) {
    std::vector<int> pick;
    int residual = 0;
    const bool found = first_witness(cb, bad, d, e, pick, residual);
    require(found, ErrorKind::NumericFailure, "internal: violation without witness");
    DisjunctWitness w;
    w.s0 = cb.items[bad];
    for (int k : pick) w.others.push_back(cb.items[k]);
    w.residual = residual;
    cert.witness = std::move(w);
  }
  return cert;
}

bool witness_holds(const MeasurementMatrix& M, const DisjunctWitness& w, int d, int e) {
  if (static_cast<int>(w.others.size()) != d) return false;
  std::vector<int> sorted = w.others;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  if (std::binary_search(sorted.begin(), sorted.end(), w.s0)) return false;
  int residual = 0;
  for (const auto& row : M.rows) {
    if (!std::binary_search(row.begin(), row.end(), w.s0)) continue;
    bool hit = false;
    for (int x : sorted) hit = hit || std::binary_search(row.begin(), row.end(), x);
    residual += !hit;
  }
  return residual == w.residual && residual <= e;
}

// --- decoding ---------------------------------------------------------------

namespace {

std::vector<long long> negative_counts(const MeasurementMatrix& M, const OutcomeVector& y) {
  require(y.item_kind == M.item_kind, ErrorKind::InvalidParameter,
          "outcome kind " + to_string(y.item_kind) + " does not match matrix kind " +
              to_string(M.item_kind));
  require(y.size() == M.num_rows(), ErrorKind::InvalidParameter,
          "outcome length " + std::to_string(y.size()) + " does not match " +
              std::to_string(M.num_rows()) + " rows");
  std::vector<long long> neg(M.n_items, 0);
  for (int r = 0; r < M.num_rows(); ++r)
    if (!y.bits[r])
      for (int x : M.rows[r]) ++neg[x];
  return neg;
}

}  // namespace

DecodeResult decode_threshold(const MeasurementMatrix& M, const OutcomeVector& y, long long tau,
                              int d) {
  require(tau >= 0, ErrorKind::InvalidParameter, "tau must be >= 0");
  const auto neg = negative_counts(M, y);
  DecodeResult out;
  out.set.kind = M.item_kind;
  for (int x : M.columns())
    if (neg[x] <= tau) out.set.items.push_back(x);
  out.oversized = d >= 0 && static_cast<int>(out.set.items.size()) > d;
  return out;
}

DecodeResult decode_cover(const MeasurementMatrix& M, const OutcomeVector& y, int d) {
  return decode_threshold(M, y, 0, d);
}

long long binomial_quantile(long long trials, double p, double confidence) {
  require(trials >= 0, ErrorKind::InvalidParameter, "trials must be >= 0");
  require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidParameter, "p must lie in [0, 1]");
  require(confidence > 0.0 && confidence <= 1.0, ErrorKind::InvalidParameter,
          "confidence must lie in (0, 1]");
  if (p == 0.0 || trials == 0) return 0;
  if (p == 1.0) return trials;
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(trials + 1.0);
  double cdf = 0.0;
  for (long long x = 0; x <= trials; ++x) {
    cdf += std::exp(lgn - std::lgamma(x + 1.0) - std::lgamma(trials - x + 1.0) + x * lp +
                    (trials - x) * lq);
    if (cdf >= confidence) return x;
  }
  return trials;
}

EtaChoice eta_for_flip_noise(double q, long long m, double confidence,
                             const std::function<long long(double)>& e_of_eta) {
  require(q >= 0.0 && q < 0.5, ErrorKind::InvalidParameter, "flip probability must be < 1/2");
  require(m >= 0, ErrorKind::InvalidParameter, "test count must be >= 0");
  require(confidence > 0.0 && confidence <= 1.0, ErrorKind::InvalidParameter,
          "confidence must lie in (0, 1]");
  EtaChoice out;
  if (q == 0.0 || m == 0) {
    out.e = e_of_eta(0.0);
    return out;
  }
  require(confidence < 1.0, ErrorKind::Infeasible,
          "no finite tolerance covers random flips with confidence 1");
  out.flips = binomial_quantile(m, q, confidence);
  auto tau_of = [&](double eta) {
    const long long e = e_of_eta(eta);
    return e >= 1 ? (e - 1) / 2 : 0;
  };
  auto ok = [&](double eta) { return tau_of(eta) >= out.flips; };
  double lo = 0.0, hi = 0.0;
  if (!ok(0.0)) {
    // Bracket with eta = 1 - 2^-k before bisecting, so e(eta) stays moderate.
    bool found = false;
    for (int k = 1; k <= 40 && !found; ++k) {
      lo = hi;
      hi = 1.0 - std::ldexp(1.0, -k);
      found = ok(hi);
    }
    require(found, ErrorKind::Infeasible,
            "no eta < 1 tolerates " + std::to_string(out.flips) + " flips");
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
  }
  out.eta = hi;
  out.e = e_of_eta(hi);
  out.tau = tau_of(hi);
  return out;
}

EtaChoice eta_for_flip_noise(double q, long long m, double confidence, const DesignParams& base,
                             int design) {
  require(design >= 1 && design <= 4, ErrorKind::InvalidParameter, "design must be 1..4");
  return eta_for_flip_noise(q, m, confidence, [&](double eta) {
    return table1_params(base.n, base.d, base.min_degree, base.c, base.mixing, eta,
                         base.constants)
        .e[design - 1];
  });
}

std::string outcomes_to_json(const OutcomeVector& y) {
  std::string bits;
  bits.reserve(y.bits.size());
  for (auto b : y.bits) bits.push_back(b ? '1' : '0');
  return json{{"bits", bits}, {"item_kind", to_string(y.item_kind)}, {"noise", y.noise.to_string()}}
      .dump();
}

OutcomeVector outcomes_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("outcomes JSON parse error: ") + e.what());
  }
  require(j.is_object() && j.contains("bits") && j["bits"].is_string(), ErrorKind::Io,
          "outcomes JSON needs a \"bits\" string");
  OutcomeVector y;
  for (char ch : j["bits"].get<std::string>()) {
    require(ch == '0' || ch == '1', ErrorKind::Io, "outcome bits must be 0/1");
    y.bits.push_back(ch == '1');
  }
  if (j.contains("item_kind")) y.item_kind = item_kind_from_string(j["item_kind"].get<std::string>());
  if (j.contains("noise") && j["noise"].is_string()) {
    const auto s = j["noise"].get<std::string>();
    if (s.rfind("adversarial", 0) != 0) y.noise = NoiseModel::parse(s);
  }
  return y;
}

}  // namespace walktest
