#include "spectral/cli.hpp"

#include "spectral/json_io.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

namespace spectral {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int default_threads() {
  if (const char* env = std::getenv("SPECTRAL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void csv_series(const std::string& path, const SeriesVerdict& v) {
  std::ostringstream os;
  os << "N,partial_sum\n";
  for (const auto& [n, s] : v.checkpoints) os << n << "," << g17(s) << "\n";
  write_text_file(path, os.str());
}

struct Ctx {
  int threads = default_threads();

  // shared option storage
  std::string spec_path, measure_path, out_path, csv_path, seq_json;
  std::int64_t N = 100000;
  std::int64_t n_max_coeff = 64;
  double p = 2.0, q = 4.0;
  bool mean_zero = false;
  std::uint64_t seed = 7;
  int restarts = 64;
  std::int64_t samples = 100;
  std::int64_t limit_n = 40;
  int limit_j = 0;
  int k_max = 12;
  std::int64_t degree = 4096;
  std::string construct_what;
  std::vector<std::int64_t> m_freqs{1};
  double weyl_threshold = 0.05, disc_threshold = 0.02;
};

json base_config(const Ctx& c, const std::string& command) {
  return {{"command", command}, {"threads", c.threads}};
}

void cmd_measure_analyze(const Ctx& c) {
  auto m = parse_measure(load_json_file(c.spec_path));
  ClassifyOptions opt;
  opt.N = c.N;
  auto cls = classify(*m, opt);
  json cfg = base_config(c, "measure analyze");
  cfg["spec"] = c.spec_path;
  cfg["N"] = c.N;
  json body = to_json(cls);
  body["measure"] = m->describe();
  write_report(c.out_path, body, cfg);
  if (!c.csv_path.empty()) {
    std::filesystem::create_directories(c.csv_path);
    csv_series(c.csv_path + "/ht.csv", cls.ht);
    for (const auto& [p, v] : cls.hr)
      csv_series(c.csv_path + "/hr_p" + g17(p) + ".csv", v);
    for (const auto& a : cls.alpha)
      csv_series(c.csv_path + "/alpha_" + g17(a.alpha) + ".csv", a.verdict);
  }
}

void cmd_measure_coeffs(const Ctx& c) {
  auto m = parse_measure(load_json_file(c.spec_path));
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,re,im,abs\n";
  for (std::int64_t n = -c.n_max_coeff; n <= c.n_max_coeff; ++n) {
    cplx v = m->coefficient(n);
    rows.push_back({{"n", n}, {"re", v.real()}, {"im", v.imag()}});
    csv << n << "," << g17(v.real()) << "," << g17(v.imag()) << ","
        << g17(std::abs(v)) << "\n";
  }
  json cfg = base_config(c, "measure coeffs");
  cfg["spec"] = c.spec_path;
  cfg["n_max"] = c.n_max_coeff;
  write_report(c.out_path, {{"measure", m->describe()}, {"coefficients", rows}},
               cfg);
  if (!c.csv_path.empty()) write_text_file(c.csv_path, csv.str());
}

void cmd_measure_norm_lb(const Ctx& c) {
  auto m = parse_measure(load_json_file(c.spec_path));
  auto lb = multiplier_norm_lower_bound(*m, c.p, c.q, c.N, c.seed);
  json cfg = base_config(c, "measure norm-lb");
  cfg["spec"] = c.spec_path;
  cfg["p"] = c.p;
  cfg["q"] = c.q;
  cfg["N"] = c.N;
  cfg["seed"] = c.seed;
  write_report(c.out_path, to_json(lb), cfg);
}

void cmd_measure_construct(const Ctx& c) {
  if (c.construct_what != "product-pair")
    throw spec_error("construct: unknown target '" + c.construct_what +
                     "' (expected product-pair)");
  if (c.out_path.empty())
    throw spec_error("construct: --out directory is required");
  auto pair = product_pair(c.degree);
  std::filesystem::create_directories(c.out_path);
  json s1 = {{"kind", "product_pair"}, {"degree", c.degree}, {"index", 1}};
  json s2 = {{"kind", "product_pair"}, {"degree", c.degree}, {"index", 2}};
  write_text_file(c.out_path + "/nu1.json", dump_deterministic(s1));
  write_text_file(c.out_path + "/nu2.json", dump_deterministic(s2));
  json cfg = base_config(c, "measure construct product-pair");
  cfg["degree"] = c.degree;
  cfg["out"] = c.out_path;
  write_report(c.out_path + "/report.json",
               {{"C1", pair.C1},
                {"C2", pair.C2},
                {"grid_min1", pair.min1},
                {"grid_min2", pair.min2},
                {"degree", pair.degree}},
               cfg);
}

void cmd_operator_analyze(const Ctx& c) {
  auto op = parse_operator(load_json_file(c.spec_path));
  auto rep = validate(op);
  if (!rep.ok) {
    std::string msg = "operator validation failed:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw spec_error(msg);
  }
  json body;
  body["validation"] = to_json(rep);
  if (rep.ergodic) {
    auto dec = period_and_classes(op);
    body["cyclic"] = to_json(dec);
    body["graph_period"] = graph_period(op);
    OpnormOptions nopt;
    nopt.seed = c.seed;
    nopt.restarts = c.restarts;
    body["norm_2_4"] = to_json(opnorm(op, 2, 4, false, nopt));
    body["norm_2_3"] = to_json(opnorm(op, 2, 3, false, nopt));
    body["norm_2_inf"] = to_json(
        opnorm(op, 2, std::numeric_limits<double>::infinity(), false, nopt));
    body["norm_2_2"] = to_json(opnorm(op, 2, 2, false, nopt));
    body["certificate"] = to_json(aperiodicity_certificate(op, nopt));
    body["rate"] = to_json(convergence_rate(op, dec, 12));
    body["eigencheck"] = to_json(unimodular_eigencheck(op, dec));
  } else {
    body["note"] = "operator is not ergodic; spectral analysis skipped";
  }
  json cfg = base_config(c, "operator analyze");
  cfg["spec"] = c.spec_path;
  cfg["seed"] = c.seed;
  cfg["restarts"] = c.restarts;
  write_report(c.out_path, body, cfg);
}

void cmd_operator_norm(const Ctx& c) {
  auto op = parse_operator(load_json_file(c.spec_path));
  OpnormOptions nopt;
  nopt.seed = c.seed;
  nopt.restarts = c.restarts;
  auto est = opnorm(op, c.p, c.q, c.mean_zero, nopt);
  json cfg = base_config(c, "operator norm");
  cfg["spec"] = c.spec_path;
  cfg["p"] = c.p;
  cfg["q"] = c.q;
  cfg["mean_zero"] = c.mean_zero;
  cfg["seed"] = c.seed;
  cfg["restarts"] = c.restarts;
  write_report(c.out_path, to_json(est), cfg);
}

void cmd_operator_limits(const Ctx& c) {
  auto op = parse_operator(load_json_file(c.spec_path));
  auto dec = period_and_classes(op);
  Eigen::VectorXd f(op.n());
  for (int i = 0; i < op.n(); ++i) f(i) = std::sin(i + 1.0);
  auto lr = limit_residuals(op, dec, f, c.limit_n, c.limit_j);
  auto rate = convergence_rate(op, dec, std::min<std::int64_t>(c.limit_n, 60));
  json cfg = base_config(c, "operator limits");
  cfg["spec"] = c.spec_path;
  cfg["n"] = c.limit_n;
  cfg["j"] = c.limit_j;
  write_report(c.out_path,
               {{"residuals", to_json(lr)},
                {"rate", to_json(rate)},
                {"cyclic", to_json(dec)},
                {"envelope_at_n", rate.C * std::pow(rate.rho, c.limit_n)}},
               cfg);
}

void cmd_operator_deterministic(const Ctx& c) {
  auto op = parse_operator(load_json_file(c.spec_path));
  auto ds = deterministic_sets(op, 16, c.k_max);
  json cfg = base_config(c, "operator deterministic");
  cfg["spec"] = c.spec_path;
  cfg["k_max"] = c.k_max;
  write_report(c.out_path, to_json(ds), cfg);
}

void cmd_ud_test(const Ctx& c) {
  auto m = parse_measure(load_json_file(c.measure_path));
  json seq_j;
  try {
    seq_j = json::parse(c.seq_json);
  } catch (const json::parse_error& ex) {
    throw spec_error(std::string("--seq: ") + ex.what());
  }
  auto seq = parse_sequence(seq_j);
  auto rep = ud_experiment(*m, seq, c.samples, c.N, c.m_freqs, c.seed,
                           c.weyl_threshold, c.disc_threshold);
  auto del = del_series(*m, seq, c.m_freqs.front(),
                        std::min<std::int64_t>(c.N, 3000));
  json cfg = base_config(c, "ud test");
  cfg["measure"] = c.measure_path;
  cfg["seq"] = seq_j;
  cfg["N"] = c.N;
  cfg["samples"] = c.samples;
  cfg["seed"] = c.seed;
  cfg["m_freqs"] = c.m_freqs;
  cfg["weyl_threshold"] = c.weyl_threshold;
  cfg["disc_threshold"] = c.disc_threshold;
  write_report(c.out_path,
               {{"experiment", to_json(rep)}, {"del", to_json(del)}}, cfg);
  if (!c.csv_path.empty()) {
    std::ostringstream os;
    os << "x,max_weyl,discrepancy,pass\n";
    for (const auto& st : rep.stats)
      os << g17(st.x) << "," << g17(st.max_weyl) << "," << g17(st.disc) << ","
         << (st.pass ? 1 : 0) << "\n";
    write_text_file(c.csv_path, os.str());
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Ctx c;
  CLI::App app{"analysis of hyperbounded Markov operators and spectral "
               "measures on the circle"};
  app.require_subcommand(1);
  app.add_option("--threads", c.threads,
                 "worker cap (default from SPECTRAL_THREADS)");

  std::function<void()> action;
  auto bind = [&](CLI::App* sub, void (*fn)(const Ctx&)) {
    sub->callback([&action, &c, fn] { action = [&c, fn] { fn(c); }; });
  };

  auto* measure = app.add_subcommand("measure", "spectral measure analysis");
  measure->require_subcommand(1);
  auto* m_an = measure->add_subcommand("analyze", "full classification");
  m_an->add_option("--spec", c.spec_path, "measure spec file")->required();
  m_an->add_option("--N", c.N, "series truncation");
  m_an->add_option("--out", c.out_path, "report path (default stdout)");
  m_an->add_option("--csv", c.csv_path, "directory for partial-sum tables");
  bind(m_an, cmd_measure_analyze);

  auto* m_co = measure->add_subcommand("coeffs", "coefficient table");
  m_co->add_option("--spec", c.spec_path)->required();
  m_co->add_option("--n-max", c.n_max_coeff, "max |n|");
  m_co->add_option("--out", c.out_path);
  m_co->add_option("--csv", c.csv_path, "CSV file path");
  bind(m_co, cmd_measure_coeffs);

  auto* m_lb = measure->add_subcommand("norm-lb", "multiplier norm lower bound");
  m_lb->add_option("--spec", c.spec_path)->required();
  m_lb->add_option("--p", c.p)->required();
  m_lb->add_option("--q", c.q)->required();
  m_lb->add_option("--N", c.N, "test function degree");
  m_lb->add_option("--seed", c.seed);
  m_lb->add_option("--out", c.out_path);
  bind(m_lb, cmd_measure_norm_lb);

  auto* m_ct = measure->add_subcommand("construct", "build derived measures");
  m_ct->add_option("what", c.construct_what, "target (product-pair)")
      ->required();
  m_ct->add_option("--degree", c.degree);
  m_ct->add_option("--out", c.out_path, "output directory")->required();
  bind(m_ct, cmd_measure_construct);

  auto* op = app.add_subcommand("operator", "finite Markov operator analysis");
  op->require_subcommand(1);
  auto* o_an = op->add_subcommand("analyze", "validation, period, norms, rates");
  o_an->add_option("--spec", c.spec_path)->required();
  o_an->add_option("--seed", c.seed);
  o_an->add_option("--restarts", c.restarts);
  o_an->add_option("--out", c.out_path);
  bind(o_an, cmd_operator_analyze);

  auto* o_no = op->add_subcommand("norm", "single operator norm");
  o_no->add_option("--spec", c.spec_path)->required();
  o_no->add_option("--p", c.p)->required();
  o_no->add_option("--q", c.q)->required();
  o_no->add_flag("--mean-zero", c.mean_zero, "restrict to mean-zero functions");
  o_no->add_option("--seed", c.seed);
  o_no->add_option("--restarts", c.restarts);
  o_no->add_option("--out", c.out_path);
  bind(o_no, cmd_operator_norm);

  auto* o_li = op->add_subcommand("limits", "cyclic limit residuals");
  o_li->add_option("--spec", c.spec_path)->required();
  o_li->add_option("--n", c.limit_n, "power index (in units of d)");
  o_li->add_option("--j", c.limit_j, "class shift");
  o_li->add_option("--out", c.out_path);
  bind(o_li, cmd_operator_limits);

  auto* o_de = op->add_subcommand("deterministic", "deterministic set algebra");
  o_de->add_option("--spec", c.spec_path)->required();
  o_de->add_option("--k-max", c.k_max);
  o_de->add_option("--out", c.out_path);
  bind(o_de, cmd_operator_deterministic);

  auto* ud = app.add_subcommand("ud", "uniform distribution mod 1");
  ud->require_subcommand(1);
  auto* u_te = ud->add_subcommand("test", "sampled Weyl/discrepancy experiment");
  u_te->add_option("--measure", c.measure_path, "measure spec file")->required();
  u_te->add_option("--seq", c.seq_json, "sequence spec as inline JSON")
      ->required();
  u_te->add_option("--N", c.N, "sequence length");
  u_te->add_option("--samples", c.samples);
  u_te->add_option("--seed", c.seed);
  u_te->add_option("--m-freqs", c.m_freqs, "Weyl frequencies")->delimiter(',');
  u_te->add_option("--weyl-threshold", c.weyl_threshold);
  u_te->add_option("--disc-threshold", c.disc_threshold);
  u_te->add_option("--out", c.out_path);
  u_te->add_option("--csv", c.csv_path, "per-sample CSV path");
  bind(u_te, cmd_ud_test);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    action();
  } catch (const spec_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const invariant_error& e) {
    std::fprintf(stderr, "invariant breach: %s\n", e.what());
    return 3;
  }
  return 0;
}

}  // namespace spectral
