#include "spectral/json_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spectral {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw spec_error(where + ": " + what);
}

double get_num(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    fail(where, "missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& key, double dflt) {
  return j.contains(key) ? j[key].get<double>() : dflt;
}

std::int64_t get_int(const json& j, const std::string& key,
                     const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    fail(where, "missing integer field '" + key + "'");
  return j[key].get<std::int64_t>();
}

std::string get_kind(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(where, "expected an object with a string 'kind'");
  return j["kind"].get<std::string>();
}

SeqRule parse_rule(const json& j, const std::string& where) {
  std::string kind = get_kind(j, where);
  if (kind == "inv_log") return SeqRule::inv_log();
  if (kind == "power_law")
    return SeqRule::power_law(get_num(j, "s", where), get_num_or(j, "shift", 1.0));
  if (kind == "geometric") return SeqRule::geometric(get_num(j, "r", where));
  if (kind == "explicit") {
    if (!j.contains("values") || !j["values"].is_array())
      fail(where, "explicit rule needs a 'values' array");
    std::vector<double> v = j["values"].get<std::vector<double>>();
    std::shared_ptr<SeqRule> tail;
    if (j.contains("tail"))
      tail = std::make_shared<SeqRule>(parse_rule(j["tail"], where + ".tail"));
    return SeqRule::explicit_list(std::move(v), std::move(tail));
  }
  fail(where, "unknown rule kind '" + kind + "'");
}

}  // namespace

MeasurePtr parse_measure(const json& j) {
  const std::string where = "measure spec";
  std::string kind = get_kind(j, where);
  if (kind == "lebesgue") return SpectralMeasure::lebesgue();
  if (kind == "cantor") return SpectralMeasure::cantor();
  if (kind == "dirac") return SpectralMeasure::dirac(get_num(j, "x0", where));
  if (kind == "riesz") {
    SeqRule coeffs = j.contains("coeffs")
                         ? parse_rule(j["coeffs"], where + ".coeffs")
                         : SeqRule::inv_log();
    bool finite = j.value("finite", false);
    if (j.contains("freqs")) {
      RieszSpec spec;
      spec.freqs = j["freqs"].get<std::vector<std::int64_t>>();
      spec.coeffs = std::move(coeffs);
      spec.finite = finite;
      spec.validate();
      return SpectralMeasure::riesz(std::move(spec));
    }
    auto first = get_int(j, "first", where);
    double ratio = get_num(j, "ratio", where);
    auto depth = static_cast<std::size_t>(get_int(j, "depth", where));
    return SpectralMeasure::riesz(
        RieszSpec::geometric_freqs(first, ratio, depth, std::move(coeffs), finite));
  }
  if (kind == "convex_ac") {
    ConvexSeq seq;
    seq.start = j.contains("start") ? get_int(j, "start", where) : 0;
    seq.rule = j.contains("rule") ? parse_rule(j["rule"], where + ".rule")
                                  : SeqRule::inv_log();
    return SpectralMeasure::convex_ac(std::move(seq));
  }
  if (kind == "convolution") {
    if (!j.contains("left") || !j.contains("right"))
      fail(where, "convolution needs 'left' and 'right' child specs");
    return SpectralMeasure::convolution(parse_measure(j["left"]),
                                        parse_measure(j["right"]));
  }
  if (kind == "power") {
    if (!j.contains("base")) fail(where, "power needs a 'base' child spec");
    return SpectralMeasure::power(parse_measure(j["base"]),
                                  static_cast<int>(get_int(j, "k", where)));
  }
  if (kind == "reflected") {
    if (!j.contains("base")) fail(where, "reflected needs a 'base' child spec");
    return SpectralMeasure::reflected(parse_measure(j["base"]));
  }
  if (kind == "mixture") {
    if (!j.contains("weights") || !j.contains("parts"))
      fail(where, "mixture needs 'weights' and 'parts'");
    std::vector<double> w = j["weights"].get<std::vector<double>>();
    std::vector<MeasurePtr> parts;
    for (const auto& pj : j["parts"]) parts.push_back(parse_measure(pj));
    return SpectralMeasure::mixture(std::move(w), std::move(parts));
  }
  if (kind == "product_pair") {
    auto degree = get_int(j, "degree", where);
    auto index = get_int(j, "index", where);
    if (index != 1 && index != 2) fail(where, "product_pair index must be 1 or 2");
    auto pair = product_pair(degree);
    return index == 1 ? pair.nu1 : pair.nu2;
  }
  fail(where, "unknown measure kind '" + kind + "'");
}

FiniteOp parse_operator(const json& j) {
  const std::string where = "operator spec";
  if (j.is_object() && j.contains("mu") && j.contains("S")) {
    FiniteOp op;
    std::vector<double> mu = j["mu"].get<std::vector<double>>();
    auto n = static_cast<int>(mu.size());
    op.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), n);
    if (!j["S"].is_array() || static_cast<int>(j["S"].size()) != n)
      fail(where, "'S' must be an n x n array of rows");
    op.S.resize(n, n);
    for (int i = 0; i < n; ++i) {
      std::vector<double> row = j["S"][static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != n) fail(where, "ragged row in 'S'");
      for (int c = 0; c < n; ++c) op.S(i, c) = row[static_cast<std::size_t>(c)];
    }
    return op;
  }
  std::string kind = get_kind(j, where);
  if (kind == "example2")
    return gen_example2(static_cast<int>(get_int(j, "n", where)));
  if (kind == "cycle") return gen_cycle(static_cast<int>(get_int(j, "d", where)));
  if (kind == "rank_one") {
    std::vector<double> mu = j["mu"].get<std::vector<double>>();
    return gen_rank_one(
        Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<int>(mu.size())));
  }
  if (kind == "random_doubly_stochastic")
    return gen_random_doubly_stochastic(
        static_cast<int>(get_int(j, "n", where)),
        static_cast<std::uint64_t>(get_int(j, "seed", where)),
        j.value("symmetric", false));
  if (kind == "random_block_cyclic") {
    auto d = static_cast<int>(get_int(j, "d", where));
    auto n = static_cast<int>(j.contains("n") ? get_int(j, "n", where) : 8 * d);
    return gen_random_block_cyclic(
        d, n, static_cast<std::uint64_t>(get_int(j, "seed", where)),
        get_num_or(j, "perm_weight", 0.0), j.value("symmetric_blocks", false));
  }
  fail(where, "unknown operator kind '" + kind + "'");
}

SequenceSpec parse_sequence(const json& j) {
  const std::string where = "sequence spec";
  std::string kind = get_kind(j, where);
  if (kind == "arith")
    return SequenceSpec::arith(get_int(j, "a", where), get_int(j, "b", where));
  if (kind == "explicit")
    return SequenceSpec::explicit_list(j["values"].get<std::vector<std::int64_t>>());
  if (kind == "bounded_gap")
    return SequenceSpec::bounded_gap(
        get_int(j, "d", where),
        static_cast<std::uint64_t>(j.contains("seed") ? get_int(j, "seed", where) : 0));
  fail(where, "unknown sequence kind '" + kind + "'");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spec_error("cannot open spec file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw spec_error(path + ": " + ex.what());
  }
}

json to_json(const SeriesVerdict& v) {
  json cps = json::array();
  for (const auto& [n, s] : v.checkpoints) cps.push_back({{"N", n}, {"sum", s}});
  return {{"description", v.description},
          {"checkpoints", cps},
          {"tail_exponent", v.tail_exponent},
          {"log_exponent", v.log_exponent},
          {"fit_rmse", v.fit_rmse},
          {"margin_used", v.margin_used},
          {"verdict", to_string(v.verdict)},
          {"note", v.note},
          {"final_sum", v.final_sum()}};
}

json to_json(const KornerResult& k) {
  return {{"C", k.finite ? json(k.C) : json("inf")},
          {"finite", k.finite},
          {"worst_n", k.worst_n},
          {"decay_exponent", k.decay_exponent},
          {"note", k.note}};
}

json to_json(const Classification& c) {
  json hr = json::array();
  for (const auto& [p, v] : c.hr) hr.push_back({{"p", p}, {"series", to_json(v)}});
  json al = json::array();
  for (const auto& a : c.alpha)
    al.push_back({{"alpha", a.alpha},
                  {"implied_p", a.implied_p},
                  {"series", to_json(a.verdict)}});
  return {{"has_atoms", c.has_atoms},
          {"wiener_value", c.wiener_value},
          {"wiener_trend", c.wiener_trend},
          {"rajchman", c.rajchman},
          {"max_tail_coeff", c.max_tail_coeff},
          {"ht", to_json(c.ht)},
          {"hr", hr},
          {"alpha", al},
          {"korner", to_json(c.korner)},
          {"korner_ok", c.korner_ok},
          {"harris_power", c.harris_power ? json(*c.harris_power) : json()},
          {"overall", to_string(c.overall)},
          {"witness", c.witness},
          {"note", c.note}};
}

json to_json(const WindowReport& w) {
  json checks = json::array();
  for (const auto& c : w.sum_checks)
    checks.push_back(
        {{"N", c.N}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"violated", c.violated}});
  json rp = json::array();
  for (const auto& [n, r] : w.rpower_ratio) rp.push_back({{"N", n}, {"ratio", r}});
  return {{"p", w.p},
          {"q", w.q},
          {"norm_cap", w.norm_cap},
          {"a", w.a},
          {"b", w.b},
          {"C_test", w.C_test},
          {"sum_checks", checks},
          {"any_violation", w.any_violation},
          {"r", w.r},
          {"rpower_ratio", rp},
          {"K_observed", w.K_observed},
          {"rpower_growing", w.rpower_growing},
          {"note", w.note}};
}

json to_json(const NormLB& n) {
  return {{"value", n.value},
          {"witness", n.witness},
          {"best_a", n.best_a},
          {"best_b", n.best_b},
          {"best_M", n.best_M}};
}

json to_json(const ValidationReport& r) {
  return {{"ok", r.ok},
          {"ergodic", r.ergodic},
          {"violations", r.violations},
          {"components", r.components}};
}

json to_json(const CyclicDecomposition& d) {
  return {{"d", d.d}, {"classes", d.cls}, {"class_mass", d.class_mass}};
}

json to_json(const NormEstimate& n) {
  std::vector<double> w(n.witness.data(), n.witness.data() + n.witness.size());
  return {{"value", n.value},
          {"witness", w},
          {"method", n.method},
          {"restart_spread", n.restart_spread},
          {"iterations", n.iterations}};
}

json to_json(const AperiodicityCertificate& c) {
  return {{"certified", c.certified},
          {"norm_2_4", c.norm_2_4},
          {"norm_2_3", c.norm_2_3},
          {"threshold_4", c.threshold_4},
          {"threshold_3", c.threshold_3},
          {"spread_2_4", c.spread_2_4},
          {"spread_2_3", c.spread_2_3},
          {"graph_d", c.graph_d},
          {"note", c.note}};
}

json to_json(const RateFit& r) {
  return {{"C", r.C},
          {"rho", r.rho},
          {"fit_residual", r.fit_residual},
          {"rho_gap", r.rho_gap},
          {"norms_l1", r.norms_l1},
          {"norms_l2", r.norms_l2},
          {"n_max", r.n_max}};
}

json to_json(const EigReport& e) {
  json per = json::array();
  for (const auto& z : e.peripheral)
    per.push_back({{"re", z.real()}, {"im", z.imag()}});
  return {{"roots_ok", e.roots_ok},
          {"max_identity_residual", e.max_identity_residual},
          {"peripheral", per},
          {"spurious_peripheral", e.spurious_peripheral}};
}

json to_json(const LimitResiduals& l) {
  return {{"primal_p1", l.primal_p1},
          {"primal_p2", l.primal_p2},
          {"dual_p1", l.dual_p1},
          {"dual_p2", l.dual_p2}};
}

json to_json(const DeterministicStructure& d) {
  json ik = json::object();
  for (const auto& [k, v] : d.sigma_ik) ik[std::to_string(k)] = v;
  json pc = json::object();
  for (const auto& [k, v] : d.power_converges) pc[std::to_string(k)] = v;
  return {{"sigmaD", d.sigmaD},
          {"sigma_ik", ik},
          {"sigmaU", d.sigmaU},
          {"algebra_ok", d.algebra_ok},
          {"matches_class_algebra", d.matches_class_algebra},
          {"power_converges", pc},
          {"divisor_rule_ok", d.divisor_rule_ok}};
}

json to_json(const DelReport& d) {
  json bp = json::array();
  for (const auto& [n, b] : d.bound_path) bp.push_back({{"N", n}, {"bound", b}});
  return {{"series", to_json(d.verdict)},
          {"final_sum", d.final_sum},
          {"max_imag", d.max_imag},
          {"bound_path", bp},
          {"bound_path_valid", d.bound_path_valid}};
}

json to_json(const UdReport& u) {
  json stats = json::array();
  for (const auto& s : u.stats)
    stats.push_back({{"x", s.x},
                     {"max_weyl", s.max_weyl},
                     {"discrepancy", s.disc},
                     {"pass", s.pass}});
  return {{"samples", stats},
          {"weyl_threshold", u.weyl_threshold},
          {"disc_threshold", u.disc_threshold},
          {"N", u.N},
          {"m_freqs", u.m_freqs},
          {"pass_fraction", u.pass_fraction},
          {"weyl_quantiles", u.weyl_quantiles},
          {"disc_quantiles", u.disc_quantiles}};
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // ensure the token stays a JSON number that parses back as double
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void dump_rec(const json& j, std::string& out, int indent, int depth) {
  std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  std::string pad0(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad0 + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_rec(el, out, indent, depth + 1);
      }
      out += "\n" + pad0 + "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_deterministic(const json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += "\n";
  return out;
}

void write_report(const std::string& path, json body, json config) {
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["config"] = std::move(config);
  rep["report"] = std::move(body);
  std::string payload = dump_deterministic(rep);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64 , fnv1a64(payload));
  rep["content_hash"] = hash;
  std::string text = dump_deterministic(rep);
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  write_text_file(path, text);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spec_error("cannot write output file: " + path);
  out << text;
}

}  // namespace spectral
