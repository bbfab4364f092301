#include "walktest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "walktest/error.hpp"
#include "walktest/experiments.hpp"

namespace walktest {

using nlohmann::json;
namespace fs = std::filesystem;

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  require(ctx != nullptr, ErrorKind::Io, "cannot allocate digest context");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path);
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidParameter, what + " is not valid JSON: " + e.what());
  }
}

// Every CSV line must have as many fields as the header.
void check_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto fields = [](const std::string& s) {
    std::size_t n = 1;
    bool quoted = false;
    for (char ch : s) {
      if (ch == '"') quoted = !quoted;
      if (ch == ',' && !quoted) ++n;
    }
    return n;
  };
  const std::size_t width = fields(line);
  while (std::getline(in, line))
    require(fields(line) == width, ErrorKind::Io, "malformed CSV row: " + line);
}

json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"trials", e.trials}, {"half_width", e.half_width}};
}

json params_json(const DesignParams& p) {
  return {{"n", p.n},           {"d", p.d},         {"min_degree", p.min_degree},
          {"c", p.c},           {"mixing", p.mixing}, {"eta", p.eta},
          {"d0", p.d0},         {"t1", p.t1},       {"t2", p.t2},
          {"m", p.m},           {"m_noisy", p.m_noisy}, {"e", p.e},
          {"degree_sufficient", p.degree_sufficient()},
          {"constants",
           {{"kappa_t", p.constants.kappa_t},
            {"kappa_m", p.constants.kappa_m},
            {"kappa_e", p.constants.kappa_e},
            {"kappa_d", p.constants.kappa_d}}}};
}

json certificate_json(const DisjunctCertificate& c, std::size_t columns) {
  json j{{"disjunct", c.disjunct}, {"d", c.d}, {"e", c.e}, {"columns", columns}};
  if (c.witness)
    j["witness"] = {{"s0", c.witness->s0},
                    {"others", c.witness->others},
                    {"residual", c.witness->residual}};
  else
    j["witness"] = nullptr;
  return j;
}

json sweep_json(const SweepResult& r) {
  json points = json::array();
  for (const auto& p : r.points)
    points.push_back({{"value", p.value},
                      {"success", p.success_rate},
                      {"trials", p.trials},
                      {"half_width", p.half_width}});
  return {{"axis", r.axis},
          {"criterion", r.criterion},
          {"family", r.family},
          {"design", r.design},
          {"d", r.d},
          {"seed", r.seed},
          {"points", points},
          {"min_m_95", r.min_m_95 ? json(*r.min_m_95) : json(nullptr)},
          {"trial_min_m", r.trial_min_m}};
}

FamilySpec family_from_json(const json& j) {
  require(j.is_object(), ErrorKind::InvalidParameter, "family must be an object");
  FamilySpec f;
  f.family = j.value("family", std::string("complete"));
  f.n = j.value("n", 0);
  f.p = j.value("p", 0.0);
  f.degree = j.value("degree", 0);
  return f;
}

json family_json(const FamilySpec& f) {
  return {{"family", f.family}, {"n", f.n}, {"p", f.p}, {"degree", f.degree}};
}

DesignConstants constants_from_json(const json& j) {
  DesignConstants k = calibrated_constants();
  if (!j.is_object()) return k;
  k.kappa_t = j.value("kappa_t", k.kappa_t);
  k.kappa_m = j.value("kappa_m", k.kappa_m);
  k.kappa_e = j.value("kappa_e", k.kappa_e);
  k.kappa_d = j.value("kappa_d", k.kappa_d);
  return k;
}

SweepConfig sweep_from_json(const json& j) {
  SweepConfig c;
  require(j.contains("family"), ErrorKind::InvalidParameter, "sweep config needs a family");
  c.family = family_from_json(j["family"]);
  c.design = j.value("design", 1);
  c.d = j.value("d", 2);
  c.eta = j.value("eta", 0.0);
  c.noise = NoiseModel::parse(j.value("noise", std::string("none")));
  c.m_grid = j.value("m_grid", std::vector<long long>{});
  c.trials = j.value("trials", 100);
  c.seed = j.value("seed", std::uint64_t{0});
  c.criterion = j.value("criterion", std::string("auto"));
  c.start = j.value("start", std::string("uniform"));
  c.budget = j.value("budget", 1e8);
  if (j.contains("constants")) c.constants = constants_from_json(j["constants"]);
  return c;
}

StartRule start_from_json(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "uniform")) return StartRule::uniform();
  if (j.is_number_integer()) return StartRule::at(j.get<int>());
  if (j.is_object() && j.contains("designated")) {
    auto vs = j["designated"].get<std::vector<int>>();
    return j.value("mode", std::string("round-robin")) == "uniform"
               ? StartRule::designated_uniform(std::move(vs))
               : StartRule::round_robin(std::move(vs));
  }
  throw Error(ErrorKind::InvalidParameter,
              "start must be \"uniform\", a vertex id or {\"designated\": [...]}");
}

StartRule start_from_string(const std::string& s, const std::vector<int>& designated) {
  if (s == "uniform") return designated.empty() ? StartRule::uniform() : StartRule::round_robin(designated);
  if (s == "designated-uniform") return StartRule::designated_uniform(designated);
  if (s == "round-robin") return StartRule::round_robin(designated);
  std::string v = s.rfind("fixed:", 0) == 0 ? s.substr(6) : s;
  try {
    std::size_t used = 0;
    const int id = std::stoi(v, &used);
    if (used == v.size()) return StartRule::at(id);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::InvalidParameter, "bad start rule: " + s);
}

// Options given on the command line, by long name.
json given_options(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->count() == 0) continue;
    std::string name = opt->get_name(false, true);
    if (name == "--help" || name == "-h") continue;
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    const auto& res = opt->results();
    if (opt->get_expected_min() == 0)
      j[name] = true;
    else if (res.size() == 1)
      j[name] = res[0];
    else
      j[name] = res;
  }
  return j;
}

struct Manifest {
  std::string subcommand;
  json parameters;
  std::uint64_t seed = 0;
  json inputs = json::object();
  std::vector<std::string> outputs;
  std::string start;

  void input(const std::string& path) { inputs[path] = file_sha256(path); }

  void write(const std::string& path) const {
    json j{{"subcommand", subcommand},
           {"parameters", parameters},
           {"seed", seed},
           {"version", kVersion},
           {"inputs", inputs},
           {"outputs", outputs},
           {"timestamps", {{"start", start}, {"end", utc_now()}}}};
    write_text(path, j.dump(2) + "\n");
  }
};

struct Options {
  int workers = 0;
  bool verbose = false;
  std::string manifest;
  std::uint64_t seed = 0;

  // gen-graph
  std::string family = "complete";
  int n = 0;
  double p = 0.0;
  int degree = 0;
  std::string out;

  // shared inputs
  std::string graph;
  std::string matrix;
  std::string outcomes;

  // mix
  double delta = 0.0;
  bool paper_delta = false;
  bool lazy = false;

  // walk-stats
  std::string quantity;
  std::string params = "{}";
  long long trials = 100000;

  // design
  int design = 1;
  int d = 2;
  double eta = 0.0;
  std::vector<int> designated;
  int sink = -1;
  long long m = -1;
  int t = -1;
  long long cap = 0;
  bool automatic = false;
  std::string start = "uniform";

  // simulate / decode / check-disjunct
  std::vector<int> defectives;
  std::string noise = "none";
  long long tau = -1;
  int e = 0;
  double budget = 1e8;

  // experiment
  std::string kind;
  std::string config;
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// --- subcommands ------------------------------------------------------------

void cmd_gen_graph(const Options& o, Manifest& mf, std::ostream& out) {
  Graph g = [&] {
    if (o.family == "path") return gen_path(o.n);
    if (o.family == "star") return gen_star(o.n);
    return sample_graph({o.family, o.n, o.p, o.degree}, o.seed);
  }();
  const std::string text = graph_to_json(g);
  graph_from_json(text);
  if (o.out.empty()) {
    out << text << '\n';
    return;
  }
  write_text(o.out, text + "\n");
  mf.outputs.push_back(o.out);
  emit(out, {{"out", o.out},
             {"n", g.num_vertices()},
             {"edges", g.num_edges()},
             {"connected", g.connected()},
             {"bipartite", g.bipartite()}});
}

void cmd_mix(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.graph);
  const Graph g = read_graph_file(o.graph);
  MixingOptions opts;
  opts.mode = o.lazy ? WalkMode::Lazy : WalkMode::Simple;
  const double delta = o.delta > 0 && !o.paper_delta ? o.delta : default_mixing_delta(g);
  const MixingReport r = mixing_time(g, delta, opts);
  json j{{"t_mix", r.t_mix},
         {"delta", r.delta},
         {"verified_horizon", r.verified_horizon},
         {"restarts", r.restarts},
         {"lazy", o.lazy}};
  if (!o.lazy) j["js_upper_bound"] = js_upper_bound(g, delta);
  emit(out, j);
}

Item item_from(const json& p, const Graph& g) {
  const std::string kind = p.value("kind", std::string("vertex"));
  Item item{item_kind_from_string(kind), 0};
  if (p.contains("item") && p["item"].is_array()) {
    const auto uv = p["item"].get<std::vector<int>>();
    require(item.kind == ItemKind::Edge && uv.size() == 2, ErrorKind::InvalidParameter,
            "[u, v] items are edges");
    const auto id = g.edge_id(uv[0], uv[1]);
    require(id.has_value(), ErrorKind::InvalidParameter, "no such edge");
    item.id = *id;
  } else {
    item.id = p.value("item", 0);
  }
  return item;
}

void cmd_walk_stats(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.graph);
  const Graph g = read_graph_file(o.graph);
  const json p = parse_json(o.params, "--params");
  require(p.is_object(), ErrorKind::InvalidParameter, "--params must be a JSON object");
  TrialConfig tc;
  tc.trials = o.trials;
  tc.seed = o.seed;
  tc.workers = o.workers;
  tc.mode = p.value("lazy", false) ? WalkMode::Lazy : WalkMode::Simple;
  const StartRule start = start_from_json(p.contains("start") ? p["start"] : json());
  const Item item = item_from(p, g);
  const auto avoid = p.value("avoid", std::vector<int>{});
  const int t = p.value("t", 1);
  const int k = p.value("k", 1);
  json j{{"quantity", o.quantity}};
  if (o.quantity == "pi") {
    j["estimate"] = estimate_json(estimate_pi_item(g, item, t, start, tc));
  } else if (o.quantity == "piA") {
    j["estimate"] = estimate_json(estimate_pi_item_avoiding(g, item, avoid, t, start, tc));
  } else if (o.quantity == "piSink") {
    require(p.contains("sink"), ErrorKind::InvalidParameter, "piSink needs \"sink\"");
    const auto s = estimate_pi_sink_avoiding(g, item, avoid, p["sink"].get<int>(),
                                             p.value("cap", default_sink_cap(g)), start, tc);
    j["estimate"] = estimate_json(s.estimate);
    j["cap_exceeded"] = s.cap_exceeded;
  } else if (o.quantity == "visits") {
    const auto r = check_visit_count_tail(g, item, t, k, start, tc);
    j.update({{"tail", estimate_json(r.tail)},
              {"pi", estimate_json(r.pi)},
              {"bound", r.bound},
              {"pass", r.pass}});
  } else if (o.quantity == "early") {
    const auto r = check_early_visit(g, item.id, k, start, tc);
    j.update({{"early", estimate_json(r.early)}, {"bound", r.bound}, {"pass", r.pass}});
  } else if (o.quantity == "influence") {
    const int T = p.contains("T") ? p["T"].get<int>() : mixing_time(g).t_mix;
    const int i = p.value("i", T);
    const int jj = p.value("j", i + T);
    const auto r = check_influence(g, i, jj, T, start, tc, p.value("min_conditional", 100));
    j.update({{"max_deviation", r.max_deviation},
              {"max_excess", r.max_excess},
              {"bound", r.bound},
              {"pairs_checked", r.pairs_checked},
              {"pairs_skipped", r.pairs_skipped},
              {"pass", r.pass}});
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown quantity: " + o.quantity);
  }
  emit(out, j);
}

void cmd_design(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.graph);
  const Graph g = read_graph_file(o.graph);
  const bool sink_design = o.design == 3 || o.design == 4;
  require(o.design >= 1 && o.design <= 4, ErrorKind::InvalidParameter, "design must be 1..4");
  require(!sink_design || g.has_vertex(o.sink), ErrorKind::InvalidParameter,
          "designs 3 and 4 need --sink");
  long long m = o.m;
  int t = o.t;
  long long e = 0;
  json params = nullptr;
  if (o.automatic) {
    const DesignParams p = auto_params(g, o.d, o.eta);
    m = p.m_noisy[o.design - 1];
    t = o.design == 1 ? p.t1 : p.t2;
    e = p.e[o.design - 1];
    params = params_json(p);
  } else {
    require(m >= 0 && (sink_design || t >= 0), ErrorKind::InvalidParameter,
            "give --m (and --t for designs 1 and 2) or --auto");
  }
  require(m <= std::numeric_limits<int>::max(), ErrorKind::SizeExceeded, "too many rows");
  const StartRule start = start_from_string(o.start, o.designated);
  const long long cap = o.cap > 0 ? o.cap : default_sink_cap(g);
  MeasurementMatrix M;
  const int rows = static_cast<int>(m);
  switch (o.design) {
    case 1: M = design1(g, start, rows, t, o.seed, o.workers); break;
    case 2: M = design2(g, start, rows, t, o.seed, o.workers); break;
    case 3: M = design3(g, start, o.sink, rows, cap, o.seed, o.workers); break;
    case 4: M = design4(g, start, o.sink, rows, cap, o.seed, o.workers); break;
  }
  M.design.e = e;
  require(!o.out.empty(), ErrorKind::InvalidParameter, "design needs --out");
  write_matrix_file(M, o.out);
  mf.outputs.push_back(o.out);
  emit(out, {{"out", o.out},
             {"design", o.design},
             {"item_kind", to_string(M.item_kind)},
             {"rows", M.num_rows()},
             {"columns", M.columns().size()},
             {"t", t},
             {"e", e},
             {"params", params}});
}

void cmd_simulate(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.matrix);
  const MeasurementMatrix M = read_matrix_file(o.matrix);
  std::vector<int> defs = o.defectives;
  std::sort(defs.begin(), defs.end());
  defs.erase(std::unique(defs.begin(), defs.end()), defs.end());
  Rng rng = stream_rng(o.seed, 0);
  const OutcomeVector y = simulate_tests(M, {M.item_kind, defs}, NoiseModel::parse(o.noise), rng);
  const std::string text = outcomes_to_json(y);
  outcomes_from_json(text);
  if (o.out.empty()) {
    out << text << '\n';
    return;
  }
  write_text(o.out, text + "\n");
  mf.outputs.push_back(o.out);
  emit(out, {{"out", o.out}, {"tests", y.size()}, {"positives", y.positives()}});
}

void cmd_decode(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.matrix);
  mf.input(o.outcomes);
  const MeasurementMatrix M = read_matrix_file(o.matrix);
  const OutcomeVector y = outcomes_from_json(read_text(o.outcomes));
  const long long tau = o.tau >= 0 ? o.tau : (M.design.e >= 1 ? (M.design.e - 1) / 2 : 0);
  const DecodeResult r = decode_threshold(M, y, tau, o.d);
  emit(out, {{"item_kind", to_string(r.set.kind)},
             {"items", r.set.items},
             {"tau", tau},
             {"oversized", r.oversized}});
}

void cmd_check_disjunct(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.matrix);
  const MeasurementMatrix M = read_matrix_file(o.matrix);
  DisjunctOptions opts;
  opts.budget = o.budget;
  opts.workers = o.workers;
  const auto cols = M.columns();
  json j = certificate_json(is_disjunct(M, o.d, o.e, opts), cols.size());
  // Design 4 rows all end with a sink edge; report both column sets.
  if (M.design.id == 4 && M.design.sink >= 0 && !o.graph.empty()) {
    mf.input(o.graph);
    const Graph g = read_graph_file(o.graph);
    const auto inc = sink_incident_edges(g, M.design.sink);
    std::vector<int> rest;
    std::set_difference(cols.begin(), cols.end(), inc.begin(), inc.end(), std::back_inserter(rest));
    j["without_sink_edges"] = certificate_json(is_disjunct_on(M, rest, o.d, o.e, opts), rest.size());
  }
  emit(out, j);
}

json mixing_json(const MixingScalingResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"t_mix", row.t_mix},
                    {"t_over_ln_n", row.ratio},
                    {"js_bound", row.js_bound},
                    {"conductance", row.conductance},
                    {"redraws", row.redraws}});
  return {{"family", family_json(r.family)},
          {"lazy", r.lazy},
          {"rows", rows},
          {"band", r.band},
          {"js_holds", r.js_holds}};
}

Graph graph_from_config(const json& cfg, Manifest& mf) {
  if (cfg.contains("graph")) {
    const std::string path = cfg["graph"].get<std::string>();
    mf.input(path);
    return read_graph_file(path);
  }
  require(cfg.contains("family"), ErrorKind::InvalidParameter, "config needs graph or family");
  return sample_graph(family_from_json(cfg["family"]), cfg.value("graph_seed", std::uint64_t{0}));
}

void cmd_experiment(const Options& o, Manifest& mf, std::ostream& out) {
  mf.input(o.config);
  const json cfg = parse_json(read_text(o.config), "experiment config");
  require(cfg.is_object(), ErrorKind::InvalidParameter, "experiment config must be an object");
  mf.parameters["config"] = cfg;
  mf.seed = cfg.value("seed", std::uint64_t{0});
  require(!o.out.empty(), ErrorKind::InvalidParameter, "experiment needs --out DIR");
  fs::create_directories(o.out);
  const auto path = [&](const std::string& name) { return (fs::path(o.out) / name).string(); };
  std::vector<std::pair<std::string, std::string>> csvs;
  json result;

  if (o.kind == "sweep") {
    SweepConfig sc = sweep_from_json(cfg);
    sc.workers = o.workers;
    const SweepResult r = success_sweep(sc);
    result = sweep_json(r);
    csvs.emplace_back("sweep.csv", sweep_to_csv(r));
  } else if (o.kind == "fixed-input") {
    SweepConfig sc = sweep_from_json(cfg);
    sc.workers = o.workers;
    const FixedInputResult r = fixed_input_experiment(sc);
    result = {{"gamma", r.gamma},
              {"m_full", r.m_full},
              {"m_scaled", r.m_scaled},
              {"recovery", sweep_json(r.recovery)},
              {"disjunct", sweep_json(r.disjunct)}};
    csvs.emplace_back("recovery.csv", sweep_to_csv(r.recovery));
    csvs.emplace_back("disjunct.csv", sweep_to_csv(r.disjunct));
  } else if (o.kind == "mixing") {
    require(cfg.contains("family") && cfg.contains("n_grid"), ErrorKind::InvalidParameter,
            "mixing config needs family and n_grid");
    const MixingScalingResult r =
        mixing_scaling(family_from_json(cfg["family"]), cfg["n_grid"].get<std::vector<int>>(),
                       mf.seed, cfg.value("lazy", false));
    result = mixing_json(r);
    csvs.emplace_back("mixing.csv", mixing_scaling_to_csv(r));
  } else if (o.kind == "verify") {
    const Graph g = graph_from_config(cfg, mf);
    VerifyConfig vc;
    vc.d = cfg.value("d", 2);
    vc.trials = cfg.value("trials", 100000LL);
    vc.influence_trials = cfg.value("influence_trials", 1000000LL);
    vc.seed = mf.seed;
    vc.workers = o.workers;
    const VerificationReport r = verification_suite(g, vc);
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"check", c.name},
                        {"status", to_string(c.status)},
                        {"measured", c.measured},
                        {"bound", c.bound},
                        {"half_width", c.half_width},
                        {"note", c.note}});
    result = {{"n", r.n},           {"min_degree", r.min_degree}, {"c", r.c},
              {"mixing", r.mixing}, {"all_pass", r.all_pass()},  {"checks", checks}};
    csvs.emplace_back("verify.csv", verification_to_csv(r));
  } else if (o.kind == "tomo") {
    const Graph g = graph_from_config(cfg, mf);
    const int d = cfg.value("d", 2);
    const double q = cfg.value("q", 0.0);
    TomographyConfig tc;
    tc.source = cfg.value("source", 0);
    const TomographyPlan plan = tomography_plan(g, tc.source, d, q, cfg.value("confidence", 0.99), mf.seed,
                                                cfg.value("estimate_walks", 100000));
    tc.q = q;
    tc.t = cfg.value("t", 0) > 0 ? cfg["t"].get<int>() : plan.t;
    tc.m = cfg.value("m", 0LL) > 0 ? cfg["m"].get<long long>() : plan.m;
    tc.tau = cfg.value("tau", -1LL) >= 0 ? cfg["tau"].get<long long>() : plan.tau;
    tc.seed = mf.seed;
    tc.workers = o.workers;
    if (cfg.contains("congested")) {
      for (const auto& e : cfg["congested"]) {
        if (e.is_array()) {
          const auto id = g.edge_id(e[0].get<int>(), e[1].get<int>());
          require(id.has_value(), ErrorKind::InvalidParameter, "congested pair is not an edge");
          tc.congested.push_back(*id);
        } else {
          tc.congested.push_back(e.get<int>());
        }
      }
    } else {
      Rng rng = stream_rng(mf.seed, 0, 0x636f6e67);
      const int k = std::min(cfg.value("congested_count", d), g.num_edges());
      while (static_cast<int>(tc.congested.size()) < k) {
        const int e = uniform_index(rng, g.num_edges());
        if (std::find(tc.congested.begin(), tc.congested.end(), e) == tc.congested.end())
          tc.congested.push_back(e);
      }
    }
    const TomographyReport r = tomography_demo(g, tc);
    json links = json::array();
    std::ostringstream csv;
    csv << "edge,u,v,congested,flagged,probes,returned\n";
    for (const auto& l : r.links) {
      links.push_back({{"edge", l.edge},
                       {"u", l.u},
                       {"v", l.v},
                       {"congested", l.congested},
                       {"flagged", l.flagged},
                       {"probes", l.probes},
                       {"returned", l.returned}});
      csv << l.edge << ',' << l.u << ',' << l.v << ',' << l.congested << ',' << l.flagged << ','
          << l.probes << ',' << l.returned << '\n';
    }
    result = {{"source", r.source},         {"t", r.t},
              {"probes", r.probes},         {"returned", r.returned},
              {"tau", r.tau},               {"eta", plan.eta},
              {"e", plan.e},                {"flips", plan.flips},
              {"pi_max", plan.pi_max},      {"pi_lo", plan.pi_lo},
              {"congested", r.congested},   {"identified", r.identified},
              {"exact", r.exact},           {"links", links}};
    csvs.emplace_back("links.csv", csv.str());
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown experiment kind: " + o.kind);
  }

  for (const auto& [name, text] : csvs) {
    check_csv(text);
    write_text(path(name), text);
    mf.outputs.push_back(path(name));
  }
  write_text(path("result.json"), result.dump(2) + "\n");
  mf.outputs.push_back(path("result.json"));
  emit(out, {{"kind", o.kind}, {"out", o.out}, {"outputs", mf.outputs}});
}

std::string default_manifest_path(const std::string& sub, const Options& o) {
  if (!o.manifest.empty()) return o.manifest;
  if (sub == "experiment") return (fs::path(o.out) / "manifest.json").string();
  if (!o.out.empty()) return o.out + ".manifest.json";
  return "";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Graph-constrained group testing with random-walk designs", "walktest"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", o.workers, "Worker threads (default: WALKTEST_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", o.verbose, "Human-readable error text in addition to JSON");
  app.add_option("--manifest", o.manifest, "Run manifest path (default: <out>.manifest.json)");

  auto* gen = app.add_subcommand("gen-graph", "Sample a graph");
  gen->add_option("--family", o.family, "complete, gnp, regular, cycle, path or star")
      ->check(CLI::IsMember({"complete", "gnp", "gnp-log", "regular", "cycle", "path", "star"}));
  gen->add_option("--n", o.n, "Vertex count")->required();
  gen->add_option("--p", o.p, "Edge probability (gnp)");
  gen->add_option("--degree", o.degree, "Degree (regular) or expected degree (gnp)");
  gen->add_option("--seed", o.seed, "Master seed");
  gen->add_option("--out", o.out, "Output graph JSON (default: standard output)");

  auto* mix = app.add_subcommand("mix", "Point-wise mixing time");
  mix->add_option("--graph", o.graph, "Graph file")->required();
  auto* delta = mix->add_option("--delta", o.delta, "Proximity parameter")->check(CLI::PositiveNumber);
  mix->add_flag("--paper-delta", o.paper_delta, "Use (1/(2cn))^2 (the default)")->excludes(delta);
  mix->add_flag("--lazy", o.lazy, "Lazy walk (stay put with probability 1/2)");

  auto* ws = app.add_subcommand("walk-stats", "Monte Carlo walk estimators");
  ws->add_option("--graph", o.graph, "Graph file")->required();
  ws->add_option("--quantity", o.quantity, "pi, piA, piSink, visits, early or influence")
      ->required()
      ->check(CLI::IsMember({"pi", "piA", "piSink", "visits", "early", "influence"}));
  ws->add_option("--params", o.params,
                 "JSON object: item, kind, t, k, avoid, sink, cap, i, j, T, start, lazy");
  ws->add_option("--trials", o.trials, "Trial count")->check(CLI::PositiveNumber);
  ws->add_option("--seed", o.seed, "Master seed");

  auto* des = app.add_subcommand("design", "Build a measurement matrix");
  des->add_option("--graph", o.graph, "Graph file")->required();
  des->add_option("--design", o.design, "Design 1, 2, 3 or 4")->check(CLI::Range(1, 4));
  des->add_option("--d", o.d, "Defective bound")->check(CLI::PositiveNumber);
  des->add_option("--eta", o.eta, "Noise parameter in [0, 1)")->check(CLI::Range(0.0, 0.999999));
  des->add_option("--designated", o.designated, "Designated start vertices")->delimiter(',');
  des->add_option("--sink", o.sink, "Sink vertex (designs 3, 4)");
  auto* mopt = des->add_option("--m", o.m, "Row count");
  des->add_option("--t", o.t, "Walk length (designs 1, 2)");
  des->add_option("--cap", o.cap, "Sink walk cap (default n^3)");
  des->add_flag("--auto", o.automatic, "Rows and walk length from the parameter table")
      ->excludes(mopt);
  des->add_option("--start", o.start, "uniform, round-robin, designated-uniform or fixed:V");
  des->add_option("--seed", o.seed, "Master seed");
  des->add_option("--out", o.out, "Output matrix JSON")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate test outcomes");
  sim->add_option("--matrix", o.matrix, "Matrix file")->required();
  sim->add_option("--defectives", o.defectives, "Defective item ids")->delimiter(',');
  sim->add_option("--noise", o.noise, "none, flip:q or dilute:q");
  sim->add_option("--seed", o.seed, "Master seed");
  sim->add_option("--out", o.out, "Output outcomes JSON (default: standard output)");

  auto* dec = app.add_subcommand("decode", "Decode defective items");
  dec->add_option("--matrix", o.matrix, "Matrix file")->required();
  dec->add_option("--outcomes", o.outcomes, "Outcomes file")->required();
  dec->add_option("--tau", o.tau, "Negative-test threshold (default from the matrix, else 0)");
  dec->add_option("--d", o.d, "Flag results larger than d");

  auto* chk = app.add_subcommand("check-disjunct", "Exhaustive (d, e)-disjunctness");
  chk->add_option("--matrix", o.matrix, "Matrix file")->required();
  chk->add_option("--d", o.d, "d")->required()->check(CLI::NonNegativeNumber);
  chk->add_option("--e", o.e, "e")->check(CLI::NonNegativeNumber);
  chk->add_option("--budget", o.budget, "Max subset evaluations");
  chk->add_option("--graph", o.graph, "Graph file; for design 4 also checks without sink edges");

  auto* exp = app.add_subcommand("experiment", "Run an experiment from a JSON config");
  exp->add_option("--kind", o.kind, "sweep, mixing, fixed-input, verify or tomo")
      ->required()
      ->check(CLI::IsMember({"sweep", "mixing", "fixed-input", "verify", "tomo"}));
  exp->add_option("--config", o.config, "Config JSON")->required();
  exp->add_option("--out", o.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Manifest mf;
  mf.subcommand = name;
  mf.parameters = given_options(sub);
  mf.seed = o.seed;
  mf.start = utc_now();
  try {
    if (name == "gen-graph") cmd_gen_graph(o, mf, out);
    else if (name == "mix") cmd_mix(o, mf, out);
    else if (name == "walk-stats") cmd_walk_stats(o, mf, out);
    else if (name == "design") cmd_design(o, mf, out);
    else if (name == "simulate") cmd_simulate(o, mf, out);
    else if (name == "decode") cmd_decode(o, mf, out);
    else if (name == "check-disjunct") cmd_check_disjunct(o, mf, out);
    else if (name == "experiment") cmd_experiment(o, mf, out);
    const std::string mpath = default_manifest_path(name, o);
    if (!mpath.empty()) mf.write(mpath);
  } catch (const Error& e) {
    err << json{{"error", to_string(e.kind())}, {"message", e.what()}, {"subcommand", name}}.dump()
        << '\n';
    if (o.verbose) err << "walktest " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << json{{"error", "invalid-parameter"}, {"message", e.what()}, {"subcommand", name}}.dump()
        << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << json{{"error", "io"}, {"message", e.what()}, {"subcommand", name}}.dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace walktest
