#include "spectral/criteria.hpp"
#include "spectral/finite.hpp"
#include "spectral/grid.hpp"
#include "spectral/measures.hpp"
#include "spectral/ud.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spectral;

namespace {

SeqRule make_rule(const std::string& kind, double param,
                  const std::vector<double>& values) {
  if (kind == "inv_log") return SeqRule::inv_log();
  if (kind == "power_law") return SeqRule::power_law(param);
  if (kind == "geometric") return SeqRule::geometric(param);
  if (kind == "explicit") return SeqRule::explicit_list(values);
  throw spec_error("unknown sequence rule: " + kind);
}

py::dict verdict_dict(const SeriesVerdict& v) {
  py::dict d;
  d["description"] = v.description;
  d["verdict"] = std::string(to_string(v.verdict));
  d["tail_exponent"] = v.tail_exponent;
  d["log_exponent"] = v.log_exponent;
  d["fit_rmse"] = v.fit_rmse;
  d["margin_used"] = v.margin_used;
  d["final_sum"] = v.final_sum();
  d["checkpoints"] = v.checkpoints;
  d["note"] = v.note;
  return d;
}

struct PyMeasure {
  MeasurePtr ptr;
  const SpectralMeasure& ref() const { return *ptr; }
};

}  // namespace

PYBIND11_MODULE(_spectral, mod) {
  mod.doc() = "Fourier multipliers on the circle and bi-stochastic finite "
              "operators: norms, cyclic structure, and equidistribution tests";

  py::register_exception<spec_error>(mod, "SpecError");
  py::register_exception<invariant_error>(mod, "InvariantError");

  // ---------------------------------------------------------------- measures
  py::class_<PyMeasure>(mod, "Measure")
      .def_static("lebesgue",
                  [] { return PyMeasure{SpectralMeasure::lebesgue()}; })
      .def_static(
          "dirac", [](double x0) { return PyMeasure{SpectralMeasure::dirac(x0)}; },
          py::arg("x0"))
      .def_static("cantor", [] { return PyMeasure{SpectralMeasure::cantor()}; })
      .def_static(
          "riesz",
          [](std::int64_t first, double ratio, std::size_t depth,
             const std::string& rule, double param,
             const std::vector<double>& values, bool finite) {
            return PyMeasure{SpectralMeasure::riesz(RieszSpec::geometric_freqs(
                first, ratio, depth, make_rule(rule, param, values), finite))};
          },
          py::arg("first"), py::arg("ratio"), py::arg("depth"),
          py::arg("rule") = "inv_log", py::arg("param") = 0.0,
          py::arg("values") = std::vector<double>{}, py::arg("finite") = false)
      .def_static(
          "convex_ac",
          [](std::int64_t start, const std::string& rule, double param,
             const std::vector<double>& values) {
            ConvexSeq seq;
            seq.start = start;
            seq.rule = make_rule(rule, param, values);
            return PyMeasure{SpectralMeasure::convex_ac(seq)};
          },
          py::arg("start") = 0, py::arg("rule") = "inv_log",
          py::arg("param") = 0.0, py::arg("values") = std::vector<double>{})
      .def_static("convolution",
                  [](const PyMeasure& a, const PyMeasure& b) {
                    return PyMeasure{SpectralMeasure::convolution(a.ptr, b.ptr)};
                  })
      .def_static(
          "power",
          [](const PyMeasure& a, int k) {
            return PyMeasure{SpectralMeasure::power(a.ptr, k)};
          },
          py::arg("base"), py::arg("k"))
      .def_static(
          "mixture",
          [](std::vector<double> w, const std::vector<PyMeasure>& parts) {
            std::vector<MeasurePtr> ps;
            for (const auto& p : parts) ps.push_back(p.ptr);
            return PyMeasure{SpectralMeasure::mixture(std::move(w), std::move(ps))};
          },
          py::arg("weights"), py::arg("parts"))
      .def_static("reflected",
                  [](const PyMeasure& a) {
                    return PyMeasure{SpectralMeasure::reflected(a.ptr)};
                  })
      .def(
          "coefficient",
          [](const PyMeasure& m, std::int64_t n) { return m.ref().coefficient(n); },
          py::arg("n"))
      .def("describe", [](const PyMeasure& m) { return m.ref().describe(); })
      .def("__repr__", [](const PyMeasure& m) {
        return "<Measure " + m.ref().describe() + ">";
      });

  // ---------------------------------------------------------------- criteria
  mod.def(
      "wiener_average",
      [](const PyMeasure& m, std::int64_t N) {
        return wiener_average(m.ref(), N);
      },
      py::arg("measure"), py::arg("N"));
  mod.def(
      "ht_series",
      [](const PyMeasure& m, std::int64_t N) {
        return verdict_dict(ht_series(m.ref(), N));
      },
      py::arg("measure"), py::arg("N") = 100000);
  mod.def(
      "hr_series",
      [](const PyMeasure& m, double p, double eps, std::int64_t N) {
        return verdict_dict(hr_series(m.ref(), p, eps, N));
      },
      py::arg("measure"), py::arg("p"), py::arg("eps") = 0.1,
      py::arg("N") = 100000);
  mod.def(
      "classify",
      [](const PyMeasure& m, std::int64_t N) {
        ClassifyOptions opt;
        opt.N = N;
        auto c = classify(m.ref(), opt);
        py::dict d;
        d["overall"] = std::string(to_string(c.overall));
        d["witness"] = c.witness;
        d["has_atoms"] = c.has_atoms;
        d["rajchman"] = c.rajchman;
        d["wiener_value"] = c.wiener_value;
        d["ht"] = verdict_dict(c.ht);
        py::list hr;
        for (const auto& [p, v] : c.hr) {
          py::dict e;
          e["p"] = p;
          e["series"] = verdict_dict(v);
          hr.append(e);
        }
        d["hr"] = hr;
        d["note"] = c.note;
        return d;
      },
      py::arg("measure"), py::arg("N") = 100000);

  // -------------------------------------------------------- finite operators
  py::class_<FiniteOp>(mod, "FiniteOp")
      .def(py::init([](Eigen::VectorXd mu, Eigen::MatrixXd S) {
             FiniteOp op;
             op.mu = std::move(mu);
             op.S = std::move(S);
             auto rep = validate(op);
             if (!rep.ok)
               throw spec_error("invalid operator: " +
                                (rep.violations.empty() ? "unknown"
                                                        : rep.violations[0]));
             return op;
           }),
           py::arg("mu"), py::arg("S"))
      .def_readonly("mu", &FiniteOp::mu)
      .def_readonly("S", &FiniteOp::S)
      .def_property_readonly("n", &FiniteOp::n)
      .def("dual", &FiniteOp::dual)
      .def("apply", [](const FiniteOp& op, const Eigen::VectorXd& f) {
        return op.apply(f);
      });

  mod.def("example2", &gen_example2, py::arg("n"));
  mod.def("cycle", &gen_cycle, py::arg("d"));
  mod.def("rank_one", &gen_rank_one, py::arg("mu"));
  mod.def("random_doubly_stochastic", &gen_random_doubly_stochastic,
          py::arg("n"), py::arg("seed"), py::arg("symmetric") = false);
  mod.def("random_block_cyclic", &gen_random_block_cyclic, py::arg("d"),
          py::arg("n"), py::arg("seed"), py::arg("perm_weight") = 0.5,
          py::arg("symmetric_blocks") = false);
  mod.def("compose", &compose);
  mod.def("symmetrize", &symmetrize);
  mod.def("mix", &mix, py::arg("a"), py::arg("b"), py::arg("wa"));

  mod.def("graph_period", &graph_period, py::arg("op"));
  mod.def(
      "cyclic_classes",
      [](const FiniteOp& op) {
        auto dec = period_and_classes(op);
        py::dict d;
        d["d"] = dec.d;
        d["classes"] = dec.cls;
        d["class_mass"] = dec.class_mass;
        return d;
      },
      py::arg("op"));
  mod.def(
      "opnorm",
      [](const FiniteOp& op, double p, double q, bool mean_zero, int restarts,
         std::uint64_t seed) {
        OpnormOptions o;
        o.restarts = restarts;
        o.seed = seed;
        auto est = opnorm(op, p, q, mean_zero, o);
        py::dict d;
        d["value"] = est.value;
        d["method"] = est.method;
        d["restart_spread"] = est.restart_spread;
        d["witness"] = est.witness;
        return d;
      },
      py::arg("op"), py::arg("p"), py::arg("q"), py::arg("mean_zero") = false,
      py::arg("restarts") = 64, py::arg("seed") = 12345);
  mod.def(
      "aperiodicity_certificate",
      [](const FiniteOp& op) {
        auto c = aperiodicity_certificate(op);
        py::dict d;
        d["certified"] = c.certified;
        d["norm_2_4"] = c.norm_2_4;
        d["norm_2_3"] = c.norm_2_3;
        d["threshold_4"] = c.threshold_4;
        d["threshold_3"] = c.threshold_3;
        d["graph_d"] = c.graph_d;
        d["note"] = c.note;
        return d;
      },
      py::arg("op"));
  mod.def(
      "convergence_rate",
      [](const FiniteOp& op, int n_max) {
        auto dec = period_and_classes(op);
        auto r = convergence_rate(op, dec, n_max);
        py::dict d;
        d["C"] = r.C;
        d["rho"] = r.rho;
        d["rho_gap"] = r.rho_gap;
        d["norms_l1"] = r.norms_l1;
        d["norms_l2"] = r.norms_l2;
        return d;
      },
      py::arg("op"), py::arg("n_max") = 12);
  mod.def(
      "limit_residuals",
      [](const FiniteOp& op, const Eigen::VectorXd& f, int n, int j) {
        auto dec = period_and_classes(op);
        auto r = limit_residuals(op, dec, f, n, j);
        py::dict d;
        d["primal_p1"] = r.primal_p1;
        d["primal_p2"] = r.primal_p2;
        d["dual_p1"] = r.dual_p1;
        d["dual_p2"] = r.dual_p2;
        return d;
      },
      py::arg("op"), py::arg("f"), py::arg("n"), py::arg("j") = 0);
  mod.def(
      "deterministic_sets",
      [](const FiniteOp& op, int k_max) {
        auto s = deterministic_sets(op, 16, k_max);
        py::dict d;
        d["sigmaD"] = s.sigmaD;
        d["sigmaU"] = s.sigmaU;
        d["algebra_ok"] = s.algebra_ok;
        d["matches_class_algebra"] = s.matches_class_algebra;
        d["power_converges"] = s.power_converges;
        d["divisor_rule_ok"] = s.divisor_rule_ok;
        return d;
      },
      py::arg("op"), py::arg("k_max") = 12);

  // ------------------------------------------------------- equidistribution
  py::class_<SequenceSpec>(mod, "Sequence")
      .def_static("arith", &SequenceSpec::arith, py::arg("a"), py::arg("b"))
      .def_static("explicit_list", &SequenceSpec::explicit_list)
      .def_static("bounded_gap", &SequenceSpec::bounded_gap, py::arg("gap"),
                  py::arg("seed"))
      .def("prefix", &SequenceSpec::prefix, py::arg("N"))
      .def("describe", &SequenceSpec::describe);

  mod.def(
      "sample",
      [](const PyMeasure& m, std::int64_t count, std::uint64_t seed) {
        return sample(m.ref(), count, seed);
      },
      py::arg("measure"), py::arg("count"), py::arg("seed"));
  mod.def("weyl_sum", &weyl_sum, py::arg("x"), py::arg("m_freq"),
          py::arg("seq"), py::arg("N"));
  mod.def("discrepancy", &discrepancy, py::arg("points"));
  mod.def(
      "del_series",
      [](const PyMeasure& m, const SequenceSpec& seq, std::int64_t mf,
         std::int64_t N_max) {
        auto r = del_series(m.ref(), seq, mf, N_max);
        py::dict d;
        d["series"] = verdict_dict(r.verdict);
        d["final_sum"] = r.final_sum;
        d["max_imag"] = r.max_imag;
        d["bound_path"] = r.bound_path;
        d["bound_path_valid"] = r.bound_path_valid;
        return d;
      },
      py::arg("measure"), py::arg("seq"), py::arg("m_freq") = 1,
      py::arg("N_max") = 3000);
  mod.def(
      "ud_experiment",
      [](const PyMeasure& m, const SequenceSpec& seq,
         std::int64_t samples, std::int64_t N, std::vector<std::int64_t> mf,
         std::uint64_t seed, double wt, double dt) {
        auto r = ud_experiment(m.ref(), seq, samples, N, std::move(mf), seed, wt, dt);
        py::dict d;
        d["pass_fraction"] = r.pass_fraction;
        d["weyl_quantiles"] = r.weyl_quantiles;
        d["disc_quantiles"] = r.disc_quantiles;
        py::list stats;
        for (const auto& s : r.stats) {
          py::dict e;
          e["x"] = s.x;
          e["max_weyl"] = s.max_weyl;
          e["disc"] = s.disc;
          e["pass"] = s.pass;
          stats.append(e);
        }
        d["stats"] = stats;
        return d;
      },
      py::arg("measure"), py::arg("seq"), py::arg("samples") = 100,
      py::arg("N") = 100000, py::arg("m_freqs") = std::vector<std::int64_t>{1},
      py::arg("seed") = 7, py::arg("weyl_threshold") = 0.05,
      py::arg("disc_threshold") = 0.02);
}
