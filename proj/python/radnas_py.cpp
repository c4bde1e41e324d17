#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "radnas/graph.hpp"
#include "radnas/report.hpp"
#include "radnas/scorer.hpp"

namespace py = pybind11;
using namespace radnas;

namespace {

std::vector<std::uint8_t> mask_from_array(const py::array_t<std::uint8_t>& a) {
    auto buf = a.request();
    const auto* ptr = static_cast<const std::uint8_t*>(buf.ptr);
    return std::vector<std::uint8_t>(ptr, ptr + buf.size);
}

py::dict sample_to_dict(const sim::RangeDopplerSample& s) {
    py::array_t<float> map_arr({s.h, s.w});
    std::copy(s.map.begin(), s.map.end(), map_arr.mutable_data());
    py::array_t<std::uint8_t> mask_arr({s.h, s.w});
    std::copy(s.mask.begin(), s.mask.end(), mask_arr.mutable_data());
    py::dict d;
    d["map"] = map_arr;
    d["mask"] = mask_arr;
    d["n_targets"] = s.n_targets;
    d["scenario"] = s.scenario_id;
    d["seed"] = s.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_radnas, m) {
    m.doc() = "Monte-Carlo architecture search with training-free scoring";

    m.def("random_architecture",
          [](std::uint64_t seed, int macro_r, int normals_per_stage, int base_channels,
             bool extended) {
              arch::ArchState root;
              root.extended = extended;
              Rng rng(derive_seed(seed, 0x7079ull));
              arch::ArchState state = root;
              while (!state.is_terminal()) {
                  state = arch::apply_move(
                      state, rng.uniform_int(arch::phase_branching(state.depth(), extended)));
              }
              arch::MacroConfig macro;
              macro.reduction_stages = macro_r;
              macro.normals_per_stage = normals_per_stage;
              macro.base_channels = base_channels;
              return arch::serialize_spec(arch::build_spec(state, macro));
          },
          py::arg("seed"), py::arg("macro_r") = 2, py::arg("normals_per_stage") = 1,
          py::arg("base_channels") = 16, py::arg("extended") = false,
          "Uniformly sampled terminal architecture as a JSON document.");

    m.def("count_params",
          [](const std::string& arch_json) {
              return arch::count_params(arch::deserialize_spec(arch_json));
          },
          py::arg("arch_json"));

    m.def("score_architecture",
          [](const std::string& arch_json, int input_size, int batch_size, std::uint64_t seed,
             long long alpha, const std::vector<int>& scenarios) {
              const arch::ArchitectureSpec spec = arch::deserialize_spec(arch_json);
              search::ScoringConfig cfg;
              cfg.macro = spec.macro;
              cfg.input_hw = input_size;
              cfg.batch_size = batch_size;
              cfg.seed = seed;
              cfg.alpha = alpha;
              if (!scenarios.empty()) cfg.scenario_ids = scenarios;
              const search::NaswotScorer scorer(cfg);
              const search::RawScore rs = scorer.score_spec(spec);
              const fwd::NetworkInstance net =
                  fwd::init_network(spec, input_size, input_size, derive_seed(seed, 0x696e6974ull));
              py::dict d;
              d["params"] = rs.params;
              d["violated"] = rs.violated;
              d["raw_score"] =
                  std::isfinite(rs.raw) ? py::cast(rs.raw) : py::object(py::none());
              d["n_a"] = net.n_a;
              return d;
          },
          py::arg("arch_json"), py::arg("input_size") = 128, py::arg("batch_size") = 16,
          py::arg("seed") = 0, py::arg("alpha") = 120441,
          py::arg("scenarios") = std::vector<int>{});

    m.def("generate_sample",
          [](int scenario_id, std::uint64_t seed, int height, int width) {
              sim::GenConfig cfg;
              cfg.height = height;
              cfg.width = width;
              return sample_to_dict(sim::generate_sample(sim::scenario_by_id(scenario_id), seed,
                                                         cfg));
          },
          py::arg("scenario_id"), py::arg("seed") = 0, py::arg("height") = 128,
          py::arg("width") = 128);

    m.def("make_batch",
          [](const std::vector<int>& scenario_ids, int batch_size, std::uint64_t seed, int size) {
              sim::GenConfig cfg;
              cfg.height = size;
              cfg.width = size;
              std::vector<sim::Scenario> scenarios;
              for (int id : scenario_ids) scenarios.push_back(sim::scenario_by_id(id));
              const fwd::Tensor4 batch = sim::make_batch(scenarios, batch_size, seed, cfg);
              py::array_t<float> arr({batch.n, batch.c, batch.h, batch.w});
              std::copy(batch.data.begin(), batch.data.end(), arr.mutable_data());
              return arr;
          },
          py::arg("scenario_ids"), py::arg("batch_size") = 16, py::arg("seed") = 0,
          py::arg("size") = 128);

    m.def("pd_proxy",
          [](const py::array_t<std::uint8_t>& pred, const py::array_t<std::uint8_t>& label)
              -> py::object {
              const auto v = sim::pd_proxy(mask_from_array(pred), mask_from_array(label));
              return v ? py::cast(*v) : py::object(py::none());
          },
          py::arg("pred"), py::arg("label"));

    m.def("pfa_proxy",
          [](const py::array_t<std::uint8_t>& pred, const py::array_t<std::uint8_t>& label)
              -> py::object {
              const auto v = sim::pfa_proxy(mask_from_array(pred), mask_from_array(label));
              return v ? py::cast(*v) : py::object(py::none());
          },
          py::arg("pred"), py::arg("label"));

    m.def("evaluate_detection",
          [](const py::array_t<float>& logits, const py::array_t<std::uint8_t>& label,
             double threshold) {
              const auto lbuf = logits.request();
              const std::vector<std::uint8_t> lbl = mask_from_array(label);
              if (static_cast<std::size_t>(lbuf.size) != lbl.size()) {
                  throw std::invalid_argument("evaluate_detection: size mismatch");
              }
              const sim::DetectionMetrics m = sim::evaluate_detection(
                  static_cast<const float*>(lbuf.ptr), lbl, threshold);
              py::dict d;
              d["pd"] = m.pd ? py::cast(*m.pd) : py::object(py::none());
              d["pfa"] = m.pfa ? py::cast(*m.pfa) : py::object(py::none());
              d["threshold"] = m.threshold;
              return d;
          },
          py::arg("logits"), py::arg("label"), py::arg("threshold") = 0.5);

    m.def("run_search",
          [](const std::string& config_json) {
              report::RunConfig cfg = report::run_config_from_json(config_json);
              auto scorer = std::make_shared<search::NaswotScorer>(cfg.scoring);
              const search::SearchResult result = search::run_search(
                  cfg.algorithm, cfg.search, search::make_naswot_scorer(scorer));
              return report::search_result_to_json(result, cfg);
          },
          py::arg("config_json"),
          "Runs one search; the argument and result are JSON documents.");

    m.attr("__version__") = "1.0.0";
}
