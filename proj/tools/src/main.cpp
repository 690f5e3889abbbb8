#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kcut/acceptance.hpp"
#include "kcut/graph.hpp"
#include "kcut/graph_io.hpp"
#include "kcut/pipeline.hpp"

namespace {

using nlohmann::ordered_json;
using namespace kcut;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitTimeout = 2;

struct RunConfig {
  std::string input;
  std::string format = "gset"; // gset | edgelist | synthetic
  std::string algo = "approx"; // rank1 | rankr | approx | random | greedy | oracle
  int rank = 1;
  int k = 3;
  int workers = 1;
  std::uint64_t seed = 1;
  double timeout = 0.0; // seconds; 0 disables
};

/// Generator specs look like "er:n=100,p=0.05,seed=1",
/// "regular:n=100,d=5,seed=1", or "torus:rows=30,cols=30".
WeightedGraph generate_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("generator spec needs the form type:key=value,...");
  }
  const std::string type = spec.substr(0, colon);
  std::map<std::string, std::string> kv;
  std::stringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("bad generator parameter '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::invalid_argument("generator spec missing '" + key + "'");
    }
    return it->second;
  };
  auto seed_of = [&]() -> std::uint64_t {
    auto it = kv.find("seed");
    return it == kv.end() ? 1u : std::stoull(it->second);
  };
  if (type == "er") {
    return generate_er(std::stoi(need("n")), std::stod(need("p")), seed_of());
  }
  if (type == "regular") {
    return generate_regular(std::stoi(need("n")), std::stoi(need("d")),
                            seed_of());
  }
  if (type == "torus") {
    return generate_torus(std::stoi(need("rows")), std::stoi(need("cols")));
  }
  throw std::invalid_argument("unknown generator type '" + type + "'");
}

WeightedGraph load_graph(const RunConfig& cfg) {
  if (cfg.format == "gset") return parse_gset_file(cfg.input);
  if (cfg.format == "edgelist") return parse_edge_list_file(cfg.input);
  if (cfg.format == "synthetic") return generate_from_spec(cfg.input);
  throw std::invalid_argument("unknown input format '" + cfg.format + "'");
}

SolveReport run_one(const RunConfig& cfg) {
  const WeightedGraph g = load_graph(cfg);
  ParallelConfig par;
  par.workers = cfg.workers;
  const Deadline deadline =
      cfg.timeout > 0.0 ? Deadline::after(std::chrono::duration<double>(
                              cfg.timeout))
                        : Deadline();

  SolveReport rep;
  if (cfg.algo == "rank1" || cfg.algo == "rankr" || cfg.algo == "approx") {
    const int r = cfg.algo == "rank1" ? 1 : cfg.rank;
    if (r < 1) throw std::invalid_argument("rank must be at least 1");
    rep = approximate_low_rank(g, r, cfg.k, par, deadline);
  } else if (cfg.algo == "random") {
    rep = random_baseline(g, cfg.k, cfg.seed);
  } else if (cfg.algo == "greedy") {
    rep = greedy_baseline(g, cfg.k, deadline);
  } else if (cfg.algo == "oracle") {
    const auto t0 = std::chrono::steady_clock::now();
    const OracleResult orc = brute_force_oracle(Laplacian(g).dense_operand(),
                                                cfg.k);
    rep.rank = 0;
    rep.K = cfg.k;
    rep.n = g.n;
    rep.m = static_cast<int>(g.m());
    rep.objective = orc.objective;
    rep.assignment = orc.assignment;
    if (cfg.k == 3) rep.cut_value = cut_value(g, orc.assignment);
    rep.candidates_evaluated = orc.evaluated;
    rep.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  } else {
    throw std::invalid_argument("unknown algorithm '" + cfg.algo + "'");
  }
  rep.algorithm = cfg.algo;
  rep.input = cfg.input;
  rep.workers = cfg.workers;
  if (cfg.algo == "random") rep.seed = cfg.seed;
  return rep;
}

ordered_json report_json(const SolveReport& rep) {
  ordered_json j;
  j["input"] = rep.input;
  j["algorithm"] = rep.algorithm;
  j["rank"] = rep.rank;
  j["k"] = rep.K;
  j["n"] = rep.n;
  j["m"] = rep.m;
  j["objective"] = rep.objective;
  if (rep.cut_value) {
    j["cut_value"] = *rep.cut_value;
  } else {
    j["cut_value"] = nullptr;
  }
  j["assignment"] = rep.assignment.labels;
  j["candidates_evaluated"] = rep.candidates_evaluated;
  j["wall_time_ms"] = rep.wall_time_ms;
  j["workers"] = rep.workers;
  if (rep.seed) {
    j["seed"] = *rep.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["timed_out"] = rep.timed_out;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
}

int cmd_solve(const RunConfig& cfg, const std::string& output) {
  SolveReport rep;
  try {
    rep = run_one(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  write_text(output, report_json(rep).dump(2));
  return rep.timed_out ? kExitTimeout : kExitOk;
}

/// One run per line, whitespace-separated key=value pairs over the defaults:
/// input=, format=, algo=, rank=, k=, workers=, seed=, timeout=.
std::vector<RunConfig> parse_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read suite file " + path);
  std::vector<RunConfig> runs;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    RunConfig cfg;
    bool any = false;
    while (ss >> tok) {
      if (tok[0] == '#') break;
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("bad suite entry '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "input") cfg.input = val;
      else if (key == "format") cfg.format = val;
      else if (key == "algo") cfg.algo = val;
      else if (key == "rank") cfg.rank = std::stoi(val);
      else if (key == "k") cfg.k = std::stoi(val);
      else if (key == "workers") cfg.workers = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "timeout") cfg.timeout = std::stod(val);
      else throw std::invalid_argument("unknown suite key '" + key + "'");
      any = true;
    }
    if (any) runs.push_back(cfg);
  }
  return runs;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int cmd_bench(const std::string& suite_path, const std::string& output,
              const std::string& out_format) {
  std::vector<RunConfig> runs;
  try {
    runs = parse_suite(suite_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  struct Row {
    RunConfig cfg;
    SolveReport rep;
    bool ok = false;
    std::string error;
  };
  std::vector<Row> rows;
  rows.reserve(runs.size());
  for (const auto& cfg : runs) {
    Row row;
    row.cfg = cfg;
    try {
      row.rep = run_one(cfg);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      std::cerr << "run failed (" << cfg.input << ", " << cfg.algo
                << "): " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  // Per-instance best score; the comparison metric is the cut when the run
  // reports one, the raw objective otherwise.
  auto score_of = [](const SolveReport& rep) {
    return rep.cut_value ? *rep.cut_value : rep.objective;
  };
  std::map<std::string, double> best;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    const double s = score_of(row.rep);
    auto it = best.find(row.cfg.input);
    if (it == best.end() || s > it->second) best[row.cfg.input] = s;
  }

  std::ostringstream out;
  if (out_format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
      if (!row.ok) {
        ordered_json j;
        j["input"] = row.cfg.input;
        j["algorithm"] = row.cfg.algo;
        j["error"] = row.error;
        arr.push_back(j);
        continue;
      }
      ordered_json j = report_json(row.rep);
      j["best_score"] = best[row.cfg.input];
      const double b = best[row.cfg.input];
      j["ratio"] = b != 0.0 ? score_of(row.rep) / b : 1.0;
      arr.push_back(j);
    }
    out << arr.dump(2);
  } else {
    out << "input,algorithm,rank,k,n,m,objective,cut_value,"
           "candidates_evaluated,wall_time_ms,workers,seed,timed_out,"
           "best_score,ratio,error\n";
    for (const auto& row : rows) {
      if (!row.ok) {
        out << csv_escape(row.cfg.input) << "," << row.cfg.algo
            << ",,,,,,,,,,,,,," << csv_escape(row.error) << "\n";
        continue;
      }
      const SolveReport& rep = row.rep;
      const double b = best[row.cfg.input];
      out << csv_escape(rep.input) << "," << rep.algorithm << "," << rep.rank
          << "," << rep.K << "," << rep.n << "," << rep.m << ","
          << rep.objective << ",";
      if (rep.cut_value) out << *rep.cut_value;
      out << "," << rep.candidates_evaluated << "," << rep.wall_time_ms << ","
          << rep.workers << ",";
      if (rep.seed) out << *rep.seed;
      out << "," << (rep.timed_out ? "true" : "false") << "," << b << ","
          << (b != 0.0 ? score_of(rep) / b : 1.0) << ",\n";
    }
  }
  try {
    write_text(output, out.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_verify(bool quick, const std::string& gset_dir) {
  AcceptanceOptions opts;
  opts.quick = quick;
  opts.gset_dir = gset_dir;
  const auto results = run_acceptance(opts);
  for (const auto& r : results) {
    std::printf("criterion %2d %-4s %-34s %s (%lld ms)\n", r.id,
                to_string(r.status), r.name.c_str(), r.detail.c_str(),
                static_cast<long long>(r.wall_time_ms));
  }
  return all_passed(results) ? kExitOk : kExitInputError;
}

int cmd_gen(const std::string& type, int n, double p, int d, int rows,
            int cols, std::uint64_t seed, const std::string& output) {
  try {
    WeightedGraph g;
    if (type == "er") {
      g = generate_er(n, p, seed);
    } else if (type == "regular") {
      g = generate_regular(n, d, seed);
    } else if (type == "torus") {
      g = generate_torus(rows, cols);
    } else {
      throw std::invalid_argument("unknown generator type '" + type + "'");
    }
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    write_gset(out, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

// Flat key=value config, one pair per line, '#' comments. Values apply only
// where no command-line flag was given, so precedence is flags, file, defaults.
void apply_config_file(const std::string& path, const CLI::App& solve,
                       RunConfig& cfg, std::string& output) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, value;
    std::stringstream ss(line);
    if (!std::getline(ss, key, '=')) continue;
    std::getline(ss, value);
    auto strip = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    if (key.empty()) continue;
    const bool given = solve.count("--" + key) > 0;
    if (key == "format") {
      if (!given) cfg.format = value;
    } else if (key == "algo") {
      if (!given) cfg.algo = value;
    } else if (key == "rank") {
      if (!given) cfg.rank = std::stoi(value);
    } else if (key == "k") {
      if (!given) cfg.k = std::stoi(value);
    } else if (key == "workers") {
      if (!given) cfg.workers = std::stoi(value);
    } else if (key == "seed") {
      if (!given) cfg.seed = std::stoull(value);
    } else if (key == "timeout") {
      if (!given) cfg.timeout = std::stod(value);
    } else if (key == "output") {
      if (!given) output = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kcut: K-cut quadratic maximization over roots of unity"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string output;

  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("input", cfg.input, "input path or generator spec")
      ->required();
  solve->add_option("--format", cfg.format, "gset | edgelist | synthetic");
  solve->add_option("--algo", cfg.algo,
                    "rank1 | rankr | approx | random | greedy | oracle");
  solve->add_option("--rank", cfg.rank, "factor rank for rankr/approx");
  solve->add_option("--k", cfg.k, "alphabet size K");
  solve->add_option("--workers", cfg.workers, "worker threads");
  solve->add_option("--seed", cfg.seed, "seed for seeded algorithms");
  solve->add_option("--timeout", cfg.timeout, "timeout in seconds");
  solve->add_option("--output", output, "report path (default stdout)");
  std::string config_path;
  solve->add_option("--config", config_path, "flat key=value config file");

  std::string suite_path, bench_format = "csv";
  auto* bench = app.add_subcommand("bench", "run a suite of instances");
  bench->add_option("suite", suite_path, "suite file, one key=value run per line")
      ->required();
  bench->add_option("--output", output, "table path (default stdout)");
  bench->add_option("--output-format", bench_format, "csv | json");

  bool quick = false;
  std::string gset_dir = "data/gset";
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_flag("--quick", quick, "subset suite, under a minute");
  verify->add_option("--gset-dir", gset_dir, "directory with GSet files");

  std::string gen_type = "er";
  int gen_n = 100, gen_d = 3, gen_rows = 10, gen_cols = 10;
  double gen_p = 0.1;
  std::uint64_t gen_seed = 1;
  std::string gen_output;
  auto* gen = app.add_subcommand("gen", "write a generated graph to file");
  gen->add_option("--type", gen_type, "er | regular | torus");
  gen->add_option("--n", gen_n, "node count (er, regular)");
  gen->add_option("--p", gen_p, "edge probability (er)");
  gen->add_option("--d", gen_d, "degree (regular)");
  gen->add_option("--rows", gen_rows, "torus rows");
  gen->add_option("--cols", gen_cols, "torus cols");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--output", gen_output, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (solve->parsed()) {
    if (!config_path.empty()) {
      try {
        apply_config_file(config_path, *solve, cfg, output);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
      }
    }
    return cmd_solve(cfg, output);
  }
  if (bench->parsed()) return cmd_bench(suite_path, output, bench_format);
  if (verify->parsed()) return cmd_verify(quick, gset_dir);
  if (gen->parsed()) {
    return cmd_gen(gen_type, gen_n, gen_p, gen_d, gen_rows, gen_cols, gen_seed,
                   gen_output);
  }
  return kExitInputError;
}
