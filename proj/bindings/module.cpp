#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "essf/diagnostics.hpp"
#include "essf/dislocation.hpp"
#include "essf/genealogy.hpp"
#include "essf/io.hpp"
#include "essf/levy.hpp"
#include "essf/particle_system.hpp"
#include "essf/rng.hpp"
#include "essf/stat_tests.hpp"
#include "essf/zspace.hpp"

namespace py = pybind11;
using namespace essf;

namespace {

DislocationMeasure measure_from_atoms(
    const std::vector<std::pair<double, std::vector<std::pair<double, double>>>>& atoms) {
  std::vector<DislocationMeasure::Atom> out;
  out.reserve(atoms.size());
  for (const auto& [w, pairs] : atoms) out.push_back({w, ZElement(pairs)});
  return DislocationMeasure(std::move(out));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "marked-partition fragmentation simulator core";

  py::class_<ZElement>(m, "ZElement")
      .def(py::init<>())
      .def(py::init<std::vector<std::pair<double, double>>>(), py::arg("pairs"))
      .def_static("unit", &ZElement::unit, py::arg("mark"))
      .def_property_readonly("pairs", &ZElement::pairs)
      .def_property_readonly("mass", &ZElement::mass)
      .def("__len__", &ZElement::size)
      .def("__eq__", [](const ZElement& a, const ZElement& b) { return a == b; });

  py::class_<DislocationMeasure>(m, "DislocationMeasure")
      .def(py::init<>())
      .def(py::init(&measure_from_atoms), py::arg("atoms"),
           "atoms: list of (weight, [(size, mark), ...])")
      .def_property_readonly("total_mass", &DislocationMeasure::total_mass)
      .def("__len__", &DislocationMeasure::size)
      .def("atoms", [](const DislocationMeasure& lam) {
        std::vector<std::pair<double, std::vector<std::pair<double, double>>>> out;
        for (const auto& a : lam.atoms()) out.emplace_back(a.weight, a.z.pairs());
        return out;
      });

  py::class_<Characteristics>(m, "Characteristics")
      .def(py::init([](double alpha, double c, double d, double beta,
                       const DislocationMeasure& lam) {
             Characteristics ch{alpha, c, d, beta, lam};
             ch.validate();
             return ch;
           }),
           py::arg("alpha") = 0.0, py::arg("c") = 0.0, py::arg("d") = 0.0,
           py::arg("beta") = 0.0, py::arg("lam") = DislocationMeasure())
      .def_readonly("alpha", &Characteristics::alpha)
      .def_readonly("c", &Characteristics::c)
      .def_readonly("d", &Characteristics::d)
      .def_readonly("beta", &Characteristics::beta)
      .def_readonly("lam", &Characteristics::lambda)
      .def("with_alpha", &Characteristics::with_alpha);

  py::class_<MarkedPartition>(m, "MarkedPartition")
      .def_static("from_assignment", &MarkedPartition::from_assignment, py::arg("assignment"),
                  py::arg("marks"))
      .def_static("single_block", &MarkedPartition::single_block, py::arg("level"),
                  py::arg("mark"))
      .def_static("singletons", &MarkedPartition::singletons, py::arg("level"), py::arg("mark"))
      .def_static("from_text", &MarkedPartition::from_text)
      .def_property_readonly("level", &MarkedPartition::level)
      .def_property_readonly("block_count", &MarkedPartition::block_count)
      .def_property_readonly("assignment", &MarkedPartition::assignment)
      .def_property_readonly("marks", &MarkedPartition::marks)
      .def("label_of", &MarkedPartition::label_of)
      .def("mark_of", &MarkedPartition::mark_of)
      .def("members", &MarkedPartition::members)
      .def("to_text", &MarkedPartition::to_text)
      .def("shape_key", &MarkedPartition::shape_key)
      .def("finer_or_equal", &MarkedPartition::finer_or_equal)
      .def("__eq__",
           [](const MarkedPartition& a, const MarkedPartition& b) { return a == b; })
      .def("__repr__", [](const MarkedPartition& x) {
        return "MarkedPartition(" + x.to_text() + ")";
      });

  m.def("restrict", &restrict, py::arg("x"), py::arg("n"));
  m.def("apply_permutation", &apply_permutation, py::arg("x"), py::arg("sigma"));
  m.def("frag", &frag, py::arg("x"), py::arg("parts"));
  m.def("empirical_frequencies",
        [](const MarkedPartition& x) { return empirical_frequencies(x).pairs; });

  m.def("integrability_value", &integrability_value);
  m.def("killing_rate", &killing_rate, py::arg("ch"), py::arg("n"));
  m.def("erosion_atom", &erosion_atom, py::arg("n"), py::arg("i"));
  m.def(
      "sample_paintbox",
      [](const ZElement& z, uint32_t n, uint64_t seed, uint64_t stream) {
        Rng rng(seed, stream);
        return sample_paintbox(z, n, rng);
      },
      py::arg("z"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0);
  m.def(
      "sample_dislocation",
      [](const Characteristics& ch, uint32_t n, uint64_t seed, uint64_t stream) {
        Rng rng(seed, stream);
        return sample_dislocation(ch, n, rng);
      },
      py::arg("ch"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0);
  m.def(
      "sample_first_event",
      [](const Characteristics& ch, uint32_t n, uint64_t seed, uint64_t stream) {
        Rng rng(seed, stream);
        const auto ev = sample_first_event(ch, n, rng);
        return std::make_pair(ev.time, ev.outcome);
      },
      py::arg("ch"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0);
  m.def("level_jump_rates", &level_jump_rates, py::arg("ch"), py::arg("n"));
  m.def("effective_drift", &effective_drift);
  m.def("level_moment_exponent", &level_moment_exponent, py::arg("ch"), py::arg("n"),
        py::arg("theta"));

  py::class_<GenealogyTree>(m, "GenealogyTree")
      .def_property_readonly("level", [](const GenealogyTree& t) { return t.level; })
      .def_property_readonly("horizon", [](const GenealogyTree& t) { return t.horizon; })
      .def_property_readonly("node_count",
                             [](const GenealogyTree& t) { return t.nodes.size(); })
      .def("complete", &GenealogyTree::complete)
      .def("snapshot", [](const GenealogyTree& t, double at) { return snapshot(t, at); },
           py::arg("t"))
      .def(
          "snapshot_selfsim",
          [](const GenealogyTree& t, double alpha, double tau) {
            return snapshot_selfsim(time_change(t, alpha), tau);
          },
          py::arg("alpha"), py::arg("tau"))
      .def(
          "absorption_time",
          [](const GenealogyTree& t, double alpha) -> std::optional<double> {
            return absorption_time(t, alpha);
          },
          py::arg("alpha"), "None when some block is still alive at the horizon")
      .def(
          "total_length",
          [](const GenealogyTree& t, double alpha) -> std::optional<double> {
            return total_length(t, alpha);
          },
          py::arg("alpha"))
      .def(
          "to_jsonl",
          [](const GenealogyTree& t, double alpha, const std::vector<double>& queries,
             uint64_t replicate, uint64_t seed, const std::string& config_hash) {
            std::ostringstream out;
            write_tree_jsonl(out, t, alpha, queries, replicate, seed, config_hash);
            return out.str();
          },
          py::arg("alpha") = 0.0, py::arg("query_times") = std::vector<double>{},
          py::arg("replicate") = 0, py::arg("seed") = 0, py::arg("config_hash") = "");

  m.def(
      "simulate",
      [](const Characteristics& ch, uint32_t level, double horizon,
         const std::vector<double>& query_times, uint64_t seed, uint64_t stream,
         double initial_mark, double grid_step) {
        Rng rng(seed, stream);
        SimulateOptions opts;
        opts.initial_mark = initial_mark;
        opts.grid_step = grid_step;
        return simulate_homogeneous(ch.with_alpha(0.0), level, horizon, query_times, rng, opts);
      },
      py::arg("ch"), py::arg("level"), py::arg("horizon"),
      py::arg("query_times") = std::vector<double>{}, py::arg("seed") = 0,
      py::arg("stream") = 0, py::arg("initial_mark") = 1.0, py::arg("grid_step") = 0.0,
      "exact event-driven simulation of the homogeneous level-n restriction");

  m.def("additive_statistic", &additive_statistic, py::arg("x"), py::arg("theta"));
  m.def("cumulant", &cumulant, py::arg("ch"), py::arg("theta"));
  m.def("cumulant_level", &cumulant_level, py::arg("ch"), py::arg("n"), py::arg("theta"));
  m.def(
      "cumulant_level_mc",
      [](const Characteristics& ch, uint32_t n, double theta, uint64_t replicates,
         uint64_t seed) {
        Rng rng(seed);
        const auto mc = cumulant_level_mc(ch, n, theta, replicates, rng);
        return std::make_pair(mc.mean, mc.std_error);
      },
      py::arg("ch"), py::arg("n"), py::arg("theta"), py::arg("replicates"), py::arg("seed"));
  m.def(
      "cumulant_minimum",
      [](const Characteristics& ch, double lo, double hi) {
        const auto km = cumulant_minimum(ch, lo, hi);
        return py::make_tuple(km.theta_star, km.value, km.negative_found);
      },
      py::arg("ch"), py::arg("lo") = -10.0, py::arg("hi") = 10.0,
      "(theta_star, kappa_min, negative_found)");
  m.def("classical_preset", &classical_preset, py::arg("nu"), py::arg("c"),
        py::arg("alpha") = 0.0);
  m.def("bbm_preset", &bbm_preset, py::arg("drift"));
  m.def("binary_classical_measure", &binary_classical_measure);
  m.def("binary_unit_mark_measure", &binary_unit_mark_measure);

  py::class_<GrowthFragmentationCell>(m, "GrowthFragmentationCell")
      .def(py::init([](double alpha, double d, double beta, double k,
                       std::vector<std::pair<double, double>> jumps) {
             GrowthFragmentationCell cell;
             cell.alpha = alpha;
             cell.d = d;
             cell.beta = beta;
             cell.k = k;
             cell.jumps = std::move(jumps);
             return cell;
           }),
           py::arg("alpha") = 0.0, py::arg("d") = 0.0, py::arg("beta") = 0.0,
           py::arg("k") = 0.0,
           py::arg("jumps") = std::vector<std::pair<double, double>>{});
  py::enum_<GfSizeChoice>(m, "GfSizeChoice")
      .value("exp_y_one_minus_y", GfSizeChoice::exp_y_one_minus_y)
      .value("exp_neg_y_squared", GfSizeChoice::exp_neg_y_squared);
  m.def("gf_phi", &gf_phi, py::arg("cell"), py::arg("q"));
  m.def("gf_kappa", &gf_kappa, py::arg("cell"), py::arg("q"));
  m.def("gf_embedding", &gf_embedding, py::arg("cell"),
        py::arg("s1") = GfSizeChoice::exp_y_one_minus_y);

  py::enum_<StatisticMode>(m, "StatisticMode")
      .value("level_n", StatisticMode::level_n)
      .value("level_infinity", StatisticMode::level_infinity);
  m.def(
      "martingale_estimate",
      [](const Characteristics& ch, double theta, const std::vector<double>& times,
         uint64_t replicates, uint32_t n, uint64_t seed, StatisticMode mode) {
        std::vector<py::tuple> out;
        for (const auto& p : martingale_estimate(ch, theta, times, replicates, n, seed, mode))
          out.push_back(py::make_tuple(p.t, p.mean, p.std_error, p.ci_half_width));
        return out;
      },
      py::arg("ch"), py::arg("theta"), py::arg("times"), py::arg("replicates"), py::arg("n"),
      py::arg("seed"), py::arg("mode") = StatisticMode::level_n,
      "[(t, mean, std_error, ci_half_width), ...] of exp(-t rate) S_theta");
  m.def("statistic_path_sup", &statistic_path_sup, py::arg("tree"), py::arg("theta"),
        py::arg("rate"));

  py::class_<TestReport>(m, "TestReport")
      .def_readonly("name", &TestReport::name)
      .def_readonly("statistic", &TestReport::statistic)
      .def_readonly("p_value", &TestReport::p_value)
      .def_readonly("replicates", &TestReport::replicates)
      .def_readonly("verdict", &TestReport::verdict)
      .def_readonly("details", &TestReport::details)
      .def("to_jsonl", &TestReport::to_jsonl)
      .def("__repr__", [](const TestReport& r) { return r.to_jsonl(); });

  m.def("exchangeability_test", &exchangeability_test, py::arg("samples"), py::arg("sigma"),
        py::arg("mark_bins") = 4, py::arg("significance") = 0.01);
  m.def("consistency_test", &consistency_test, py::arg("ch"), py::arg("n"), py::arg("m"),
        py::arg("t"), py::arg("replicates"), py::arg("seed"), py::arg("significance") = 0.01);
  m.def("split_rate_test", &split_rate_test, py::arg("ch"), py::arg("n"),
        py::arg("replicates"), py::arg("seed"), py::arg("significance") = 0.01);
  m.def(
      "martingale_flatness_test",
      [](const Characteristics& ch, double theta, const std::vector<double>& times,
         uint64_t replicates, uint32_t n, uint64_t seed, StatisticMode mode,
         double significance) {
        return martingale_flatness_test(ch, theta, times, replicates, n, seed, mode,
                                        significance);
      },
      py::arg("ch"), py::arg("theta"), py::arg("times"), py::arg("replicates"), py::arg("n"),
      py::arg("seed"), py::arg("mode") = StatisticMode::level_n,
      py::arg("significance") = 0.01);
}
