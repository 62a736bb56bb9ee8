// mmflow: command-line front end for the multiflow solvers.
//
// Exit codes: 0 success, 1 input/validation failure, 2 solver failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmflow/mmflow.hpp"

namespace {

using namespace mmflow;
using json = nlohmann::ordered_json;

constexpr int kInputError = 1;
constexpr int kSolverError = 2;

struct Failure {
  int code;
  std::string kind;
  std::string message;
  std::vector<std::string> details;
};

bool g_json_errors = false;

int report_failure(const Failure& f) {
  if (g_json_errors) {
    json err{{"error", {{"kind", f.kind}, {"message", f.message}, {"exit_code", f.code}}}};
    if (!f.details.empty()) err["error"]["details"] = f.details;
    std::cout << err.dump(2) << "\n";
  } else {
    std::cerr << "error (" << f.kind << "): " << f.message << "\n";
    for (const auto& d : f.details) std::cerr << "  " << d << "\n";
  }
  return f.code;
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(raw));
  } catch (const std::exception&) {
    throw Failure{kInputError, "config", std::string("environment variable ") + name + " is not a count", {}};
  }
}

BaselineLimits limits_from_env(BaselineLimits base = {}) {
  base.graph.max_vertices = env_size("MMFLOW_VERTEX_CAP", base.graph.max_vertices);
  base.max_cycles = env_size("MMFLOW_CYCLE_CAP", base.max_cycles);
  base.max_sets = env_size("MMFLOW_MIS_CAP", base.max_sets);
  return base;
}

// "-" reads standard input.
std::string slurp(const std::string& path) {
  std::stringstream buffer;
  if (path == "-") {
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path);
  if (!in) throw Failure{kInputError, "io", "cannot open '" + path + "'", {}};
  buffer << in.rdbuf();
  return buffer.str();
}

// Line of the netfile most likely responsible for a validation message.
std::size_t anchor_line(const std::string& text, const std::string& message) {
  std::smatch m;
  static const std::regex pair_re("\\('([^']*)', '([^']*)'\\)");
  static const std::regex name_re("'([^']*)'");
  auto line_of = [&](const std::regex& re) -> std::size_t {
    std::smatch hit;
    if (!std::regex_search(text, hit, re)) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + hit.position(0), '\n'));
  };
  if (std::regex_search(message, m, pair_re)) {
    const std::string from = m[1], to = m[2];
    if (message.find("delay defined") != std::string::npos) {
      if (auto l = line_of(std::regex("\"from\"\\s*:\\s*\"" + from + "\"\\s*,\\s*\"to\"\\s*:\\s*\"" + to + "\"")))
        return l;
    }
    if (auto l = line_of(std::regex("\"" + from + "\"\\s*:\\s*\\["))) return l;
  }
  if (std::regex_search(message, m, name_re)) {
    const std::string name = m[1];
    if (message.find("collision set") != std::string::npos || message.find("collides") != std::string::npos)
      if (auto l = line_of(std::regex("\"" + name + "\"\\s*:\\s*\\["))) return l;
    if (auto l = line_of(std::regex("\"" + name + "\""))) return l;
  }
  return 0;
}

Instance load_instance(const std::string& path) {
  const std::string text = slurp(path);
  Instance inst;
  try {
    inst = parse_netfile(text);
  } catch (const NetfileError& e) {
    throw Failure{kInputError, "parse", path + (e.line() ? ":" + std::to_string(e.line()) : "") + ": " +
                                            e.message(), {}};
  }
  auto violations = validate_network(inst.network);
  if (violations.empty()) violations = validate_sessions(inst.network, inst.sessions);
  if (!violations.empty()) {
    Failure f{kInputError, "validation", path + ": " + std::to_string(violations.size()) + " violation(s)", {}};
    for (const auto& v : violations) {
      const std::size_t line = anchor_line(text, v);
      f.details.push_back(path + ":" + (line ? std::to_string(line) : "?") + ": " + v);
    }
    throw f;
  }
  return inst;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure{kInputError, "io", "cannot write '" + path + "'", {}};
  out << content;
}

ProblemKind parse_kind(const std::string& s) {
  return s == "mcmf" ? ProblemKind::MaxConcurrentMultiflow : ProblemKind::MaxMultiflow;
}

SolveMode parse_mode(const std::string& s) {
  if (s == "zero-delay") return SolveMode::ZeroDelay;
  if (s == "delay") return SolveMode::Delay;
  return SolveMode::Auto;
}

// `source` is inline JSON when it starts with '[' or '{', else a file path.
std::vector<Rational> load_weights(const std::string& source, const Network& net) {
  json doc;
  const bool inline_json = !source.empty() && (source.front() == '[' || source.front() == '{');
  const std::string text = inline_json ? source : slurp(source);
  const std::string path = inline_json ? std::string("--weights") : source;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Failure{kInputError, "parse", path + ": " + e.what(), {}};
  }
  auto value = [&](const json& v, const std::string& where) {
    try {
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number_integer()) return Rational(v.get<long>());
      if (v.is_number()) return parse_rational(v.dump());
    } catch (const std::invalid_argument&) {
    }
    throw Failure{kInputError, "parse", path + ": " + where + " is not a number", {}};
  };
  std::vector<Rational> weights(net.num_links(), Rational(0));
  if (doc.is_array()) {
    if (doc.size() != net.num_links())
      throw Failure{kInputError, "validation",
                    path + ": expected " + std::to_string(net.num_links()) + " weights, got " +
                        std::to_string(doc.size()), {}};
    for (std::size_t l = 0; l < doc.size(); ++l) weights[l] = value(doc[l], "entry " + std::to_string(l));
  } else if (doc.is_object()) {
    for (const auto& [id, v] : doc.items()) {
      auto l = net.find_link(id);
      if (!l) throw Failure{kInputError, "validation", path + ": unknown link '" + id + "'", {}};
      weights[*l] = value(v, id);
    }
  } else {
    throw Failure{kInputError, "parse", path + ": weights must be an array or an object", {}};
  }
  return weights;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string kind = "mmf";
  std::string mode = "auto";
  bool trace = false;
  bool exact = false;
  std::size_t window = 0;
  std::string netfile;
};

void add_solve_options(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--kind", a.kind, "mmf or mcmf")->check(CLI::IsMember({"mmf", "mcmf"}));
  cmd->add_option("--mode", a.mode, "auto, zero-delay or delay")
      ->check(CLI::IsMember({"auto", "zero-delay", "delay"}));
  cmd->add_flag("--trace", a.trace, "include per-iteration duals and vertices");
  cmd->add_flag("--exact", a.exact, "exact rational simplex; print rationals");
  cmd->add_option("--window", a.window, "scheduling window T (delay mode; default: minimum)");
  cmd->add_option("netfile", a.netfile, "network file, - for standard input")->required();
}

int run_solve(const SolveArgs& a, bool baseline) {
  const Instance inst = load_instance(a.netfile);
  const auto limits = limits_from_env();
  SolveReport report;
  try {
    if (baseline) {
      BaselineOptions o;
      o.mode = parse_mode(a.mode);
      o.exact = a.exact;
      o.window = a.window;
      o.limits = limits;
      report = two_step_solve(inst.network, inst.sessions, parse_kind(a.kind), o);
    } else {
      SolveOptions o;
      o.mode = parse_mode(a.mode);
      o.exact = a.exact;
      o.window = a.window;
      o.limits = limits.graph;
      o.max_iterations = env_size("MMFLOW_ITERATION_CAP", o.max_iterations);
      report = joint_solve(inst.network, inst.sessions, parse_kind(a.kind), o);
    }
  } catch (const std::invalid_argument& e) {
    throw Failure{kInputError, "argument", e.what(), {}};
  } catch (const IterationCapExceeded& e) {
    throw Failure{kSolverError, "iteration-cap", e.what(), {}};
  } catch (const SchedulingGraphTooLarge& e) {
    throw Failure{kSolverError, "graph-too-large", e.what(), {}};
  } catch (const RegionOverflow& e) {
    throw Failure{kSolverError, "region-overflow", e.what(), {}};
  } catch (const LpError& e) {
    throw Failure{kSolverError, "lp", e.what(), {}};
  }
  RunMetadata meta{baseline ? "baseline" : "solve", a.netfile, std::nullopt};
  auto out = report_to_json(inst.network, inst.sessions, report, a.trace, meta);
  if (baseline) out["region"]["vertices_enumerated"] = report.region.size();
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- gen

int run_gen_line(int L, int K, std::int64_t d, const std::string& out) {
  try {
    write_output(out, write_netfile(line_instance(L, K, d)));
  } catch (const std::invalid_argument& e) {
    throw Failure{kInputError, "argument", e.what(), {}};
  }
  return 0;
}

int run_gen_bidir(int N, std::int64_t d, const std::string& gamma2, const std::string& out) {
  try {
    write_output(out, write_netfile(bidir_line_scd(N, d, parse_rational(gamma2))));
  } catch (const std::invalid_argument& e) {
    throw Failure{kInputError, "argument", e.what(), {}};
  }
  return 0;
}

int run_gen_random(int nodes, std::uint64_t seed, int sessions, double p, std::size_t max_links,
                   const std::string& out) {
  RandomNetworkOptions o;
  o.edge_probability = p;
  o.max_links = max_links;
  try {
    write_output(out, write_netfile(random_acyclic(nodes, seed, sessions, o)));
  } catch (const std::invalid_argument& e) {
    throw Failure{kInputError, "argument", e.what(), {}};
  } catch (const std::runtime_error& e) {
    throw Failure{kSolverError, "generator", e.what(), {}};
  }
  return 0;
}

// ---------------------------------------------------------------- oracles

int run_oracle_mwis(const std::string& netfile, const std::string& weights_path, bool exact) {
  const Instance inst = load_instance(netfile);
  if (inst.network.has_nonzero_delay())
    throw Failure{kInputError, "argument", "oracle-mwis needs a zero-delay network", {}};
  const auto weights = load_weights(weights_path, inst.network);
  const auto sol = mwis_solve(inst.network, weights);
  const NumberFormat fmt{exact};
  json out;
  json selected = json::array();
  for (LinkIndex l : sol.selected) selected.push_back(inst.network.links[l].id);
  out["selected"] = selected;
  out["value"] = fmt(sol.value);
  out["indicator"] = format_vector(sol.indicator, fmt);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_oracle_mmc(const std::string& netfile, const std::string& weights_path, std::size_t window,
                   bool dump_graph, bool exact) {
  const Instance inst = load_instance(netfile);
  const auto weights = load_weights(weights_path, inst.network);
  SchedulingGraph g;
  try {
    g = build_scheduling_graph(inst.network, window == 0 ? min_window(inst.network) : window,
                               limits_from_env().graph);
  } catch (const std::invalid_argument& e) {
    throw Failure{kInputError, "argument", e.what(), {}};
  } catch (const SchedulingGraphTooLarge& e) {
    throw Failure{kSolverError, "graph-too-large", e.what(), {}};
  }
  g = weight_graph(std::move(g), weights);
  const auto cycle = max_mean_cycle(g);
  const auto rate = cycle_to_rate_vector(g, cycle);
  const NumberFormat fmt{exact};
  json out;
  out["window"] = g.window;
  out["vertices"] = g.num_vertices();
  out["edges"] = g.num_edges;
  out["mean"] = fmt(cycle.mean);
  out["cycle"] = cycle.cycle;
  json blocks = json::array();
  for (std::size_t k = 0; k + 1 < cycle.cycle.size(); ++k) blocks.push_back(format_block(g, cycle.cycle[k]));
  out["cycle_blocks"] = blocks;
  out["rate_vector"] = format_vector(rate, fmt);
  out["score"] = fmt(dot(weights, rate));
  if (dump_graph) {
    json all = json::array();
    for (std::size_t v = 0; v < g.num_vertices(); ++v) all.push_back(format_block(g, v));
    out["blocks"] = all;
    std::istringstream rows(format_adjacency(g));
    json matrix = json::array();
    for (std::string row; std::getline(rows, row);) matrix.push_back(row);
    out["adjacency"] = matrix;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string suite = "lines";
  int max_L = 5;
  int min_L = 3;
  int seeds = 3;
  std::uint64_t seed = 1;
  std::string nodes = "6,8,10";
  bool exact = false;
};

struct BenchRow {
  std::string instance;
  std::size_t links = 0;
  std::string method;
  std::string objective;
  std::string vertices_used;
  std::string region_size;
  double millis = 0;
};

std::string csv_row(const BenchRow& r) {
  std::ostringstream s;
  s << r.instance << ',' << r.links << ',' << r.method << ',' << r.objective << ',' << r.vertices_used << ','
    << r.region_size << ',' << std::fixed << std::setprecision(3) << r.millis;
  return s.str();
}

void bench_instance(const std::string& name, const Instance& inst, ProblemKind kind, SolveMode mode,
                    bool exact, const BaselineLimits& limits) {
  BenchRow baseline_row{name, inst.network.num_links(), "two-step", "", "", "", 0};
  std::optional<std::size_t> region_size;
  const auto start = std::chrono::steady_clock::now();
  try {
    BaselineOptions o;
    o.mode = mode;
    o.exact = exact;
    o.limits = limits;
    const auto r = two_step_solve(inst.network, inst.sessions, kind, o);
    baseline_row.objective = NumberFormat{exact}(r.objective);
    baseline_row.vertices_used = std::to_string(r.region.size());
    baseline_row.region_size = std::to_string(r.region.size());
    baseline_row.millis = r.millis;
    region_size = r.region.size();
  } catch (const std::runtime_error& e) {
    baseline_row.objective = "cap-exceeded";
    baseline_row.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  SolveOptions o;
  o.mode = mode;
  o.exact = exact;
  o.limits = limits.graph;
  const auto r = joint_solve(inst.network, inst.sessions, kind, o);
  BenchRow joint_row{name, inst.network.num_links(), "joint", NumberFormat{exact}(r.objective),
                     std::to_string(r.region.size()), region_size ? std::to_string(*region_size) : "", r.millis};
  std::cout << csv_row(joint_row) << "\n" << csv_row(baseline_row) << "\n" << std::flush;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Failure{kInputError, "argument", "bad integer list '" + s + "'", {}};
    }
  }
  return out;
}

int run_bench(const BenchArgs& a) {
  BaselineLimits defaults;
  defaults.max_cycles = 2'000'000;
  const auto limits = limits_from_env(defaults);
  std::cout << "instance,|L|,method,objective,vertices_used,region_size_if_known,millis\n";
  if (a.suite == "lines") {
    for (int L = a.min_L; L <= a.max_L; ++L)
      bench_instance("line-L" + std::to_string(L) + "-K1-d1", line_instance(L, 1, 1),
                     ProblemKind::MaxMultiflow, SolveMode::Delay, a.exact, limits);
  } else if (a.suite == "bidir-mmf" || a.suite == "bidir-mcmf") {
    const bool mcmf = a.suite == "bidir-mcmf";
    for (int N = 2; N <= a.max_L; ++N) {
      const auto inst = bidir_line_scd(N, 0, mcmf ? Rational(1, 2) : Rational(1));
      bench_instance("bidir-N" + std::to_string(N) + (mcmf ? "-gamma-1:1/2" : ""), inst,
                     mcmf ? ProblemKind::MaxConcurrentMultiflow : ProblemKind::MaxMultiflow, SolveMode::ZeroDelay,
                     a.exact, limits);
    }
  } else if (a.suite == "random") {
    for (int n : parse_int_list(a.nodes))
      for (int k = 0; k < a.seeds; ++k) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
        const auto inst = random_acyclic(n, seed, 1);
        bench_instance("random-n" + std::to_string(n) + "-s" + std::to_string(seed), inst,
                       ProblemKind::MaxMultiflow, SolveMode::ZeroDelay, a.exact, limits);
      }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact maximum multiflow and maximum concurrent multiflow in interference-limited networks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json-errors", g_json_errors, "print errors as JSON objects on standard output");

  SolveArgs solve_args, baseline_args;
  auto* solve = app.add_subcommand("solve", "joint LP/oracle iteration");
  add_solve_options(solve, solve_args);
  auto* baseline = app.add_subcommand("baseline", "full region enumeration, then one LP");
  add_solve_options(baseline, baseline_args);

  auto* gen = app.add_subcommand("gen", "write a generated network file");
  gen->require_subcommand(1);
  std::string out_path;
  gen->add_option("-o,--output", out_path, "output file (default: standard output)");
  gen->fallthrough();
  int line_L = 4, line_K = 1;
  std::int64_t line_d = 1;
  auto* gen_line = gen->add_subcommand("line", "line network 1 -> L+1 with a unicast session");
  gen_line->add_option("--L", line_L, "number of links")->required();
  gen_line->add_option("--K", line_K, "interference range in hops");
  gen_line->add_option("--d", line_d, "per-hop delay (0 for zero-delay)");
  int bidir_N = 2;
  std::int64_t bidir_d = 0;
  std::string bidir_gamma = "1";
  auto* gen_bidir = gen->add_subcommand("bidir", "bidirectional single-collision-domain line");
  gen_bidir->add_option("--N", bidir_N, "number of nodes")->required();
  gen_bidir->add_option("--delay", bidir_d, "per-hop delay (0 for zero-delay)");
  gen_bidir->add_option("--gamma2", bidir_gamma, "traffic weight of the N -> 1 session");
  int rnd_nodes = 10, rnd_sessions = 1;
  std::uint64_t rnd_seed = 1;
  double rnd_p = RandomNetworkOptions{}.edge_probability;
  std::size_t rnd_max_links = 0;
  auto* gen_random = gen->add_subcommand("random", "random acyclic multicast network, 1-hop interference");
  gen_random->add_option("--nodes", rnd_nodes, "node count (>= 3)")->required();
  gen_random->add_option("--seed", rnd_seed, "PRNG seed (mt19937_64)");
  gen_random->add_option("--sessions", rnd_sessions, "number of multicast sessions");
  gen_random->add_option("--edge-prob", rnd_p, "probability of each extra forward link");
  gen_random->add_option("--max-links", rnd_max_links, "cap on link count (0: none)");

  std::string oracle_net, oracle_weights;
  std::size_t oracle_window = 0;
  bool oracle_exact = false, dump_graph = false;
  auto* mwis = app.add_subcommand("oracle-mwis", "maximum-weight independent set for a weight vector");
  mwis->add_option("netfile", oracle_net)->required();
  mwis->add_option("--weights", oracle_weights, "JSON array (link order) or object link-id -> weight, inline or as a file")->required();
  mwis->add_flag("--exact", oracle_exact, "print rationals");
  auto* mmc = app.add_subcommand("oracle-mmc", "maximum-mean cycle of the weighted scheduling graph");
  mmc->add_option("netfile", oracle_net)->required();
  mmc->add_option("--weights", oracle_weights, "JSON array (link order) or object link-id -> weight, inline or as a file")->required();
  mmc->add_option("--window", oracle_window, "window T (default: minimum)");
  mmc->add_flag("--dump-graph", dump_graph, "print all blocks and the adjacency matrix");
  mmc->add_flag("--exact", oracle_exact, "print rationals");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "joint vs two-step timings as CSV");
  bench->add_option("--suite", bench_args.suite, "lines, bidir-mmf, bidir-mcmf or random")
      ->check(CLI::IsMember({"lines", "bidir-mmf", "bidir-mcmf", "random"}));
  bench->add_option("--max-L", bench_args.max_L, "largest L (lines) or N (bidir)");
  bench->add_option("--min-L", bench_args.min_L, "smallest L (lines)");
  bench->add_option("--nodes", bench_args.nodes, "comma-separated node counts (random)");
  bench->add_option("--seeds", bench_args.seeds, "instances per node count (random)");
  bench->add_option("--seed", bench_args.seed, "first seed (random)");
  bench->add_flag("--exact", bench_args.exact, "exact arithmetic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    if (g_json_errors) return report_failure({kInputError, "usage", e.what(), {}});
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return run_solve(solve_args, false);
    if (*baseline) return run_solve(baseline_args, true);
    if (*gen_line) return run_gen_line(line_L, line_K, line_d, out_path);
    if (*gen_bidir) return run_gen_bidir(bidir_N, bidir_d, bidir_gamma, out_path);
    if (*gen_random) return run_gen_random(rnd_nodes, rnd_seed, rnd_sessions, rnd_p, rnd_max_links, out_path);
    if (*mwis) return run_oracle_mwis(oracle_net, oracle_weights, oracle_exact);
    if (*mmc) return run_oracle_mmc(oracle_net, oracle_weights, oracle_window, dump_graph, oracle_exact);
    if (*bench) return run_bench(bench_args);
  } catch (const Failure& f) {
    return report_failure(f);
  } catch (const std::exception& e) {
    return report_failure({kSolverError, "internal", e.what(), {}});
  }
  return 0;
}
