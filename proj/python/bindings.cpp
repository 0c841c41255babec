#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cscope/api.hpp"
#include "cscope/config.hpp"
#include "cscope/engine.hpp"
#include "cscope/evaluation.hpp"

namespace py = pybind11;
using namespace cscope;

namespace {

py::object to_py(const ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

DocumentMetadata metadata_from_dict(const py::dict& meta) {
  auto dumps = py::module_::import("json").attr("dumps");
  return api::metadata_from_json(nlohmann::json::parse(dumps(meta).cast<std::string>()));
}

Config config_from(const std::optional<std::filesystem::path>& path) {
  return path ? load_config(*path) : Config{};
}

}  // namespace

PYBIND11_MODULE(_cscope, m) {
  m.doc() = "Ontology-backed literature search engine";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "CscopeError"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (error_code, message)
      PyErr_SetObject(error_type.get_stored().ptr(),
                      py::make_tuple(std::string(e.name()), std::string(e.what())).ptr());
    }
  });

  m.def("error_codes", [] {
    std::vector<std::string> out;
    for (auto code : all_error_codes()) out.emplace_back(error_name(code));
    return out;
  });

  m.def("precision", &eval::precision, py::arg("relevant_retrieved"), py::arg("retrieved"));
  m.def("recall", &eval::recall, py::arg("relevant_retrieved"), py::arg("total_relevant"));
  m.def("f_measure", &eval::f_measure, py::arg("precision"), py::arg("recall"),
        py::arg("beta") = 1.0);
  m.def(
      "compare",
      [](const std::string& runs_a, const std::string& runs_b, const std::string& judgments,
         double beta) {
        const auto a = eval::load_runs(runs_a, "A");
        const auto b = eval::load_runs(runs_b, "B");
        const auto j = eval::load_judgments(judgments);
        return to_py(api::to_json(eval::compare_systems(a, b, j, beta)));
      },
      py::arg("runs_a"), py::arg("runs_b"), py::arg("judgments"), py::arg("beta") = 1.0);

  py::class_<Engine>(m, "Engine")
      .def_static("init", &Engine::init, py::arg("data_dir"))
      .def(py::init([](const std::filesystem::path& dir,
                       const std::optional<std::filesystem::path>& config) {
             return std::make_unique<Engine>(dir, config_from(config));
           }),
           py::arg("data_dir"), py::arg("config") = py::none())
      .def("load_seed",
           [](Engine& e, const std::filesystem::path& p) { return to_py(api::to_json(e.load_seed(p))); })
      .def(
          "ingest",
          [](Engine& e, const std::string& text, const py::dict& meta) {
            return to_py(api::to_json(e.ingest({text, metadata_from_dict(meta)})));
          },
          py::arg("text"), py::arg("metadata") = py::dict())
      .def("document",
           [](const Engine& e, std::uint64_t id) { return to_py(api::document_json(e, DocId(id))); })
      .def("purge", [](Engine& e, std::uint64_t id) { e.purge(DocId(id)); })
      .def("extract",
           [](Engine& e) {
             const auto pending = e.extract();
             return to_py(api::to_json(std::span<const CandidateConcept>(pending)));
           })
      .def("list_pending",
           [](const Engine& e) {
             const auto pending = e.list_pending();
             return to_py(api::to_json(std::span<const CandidateConcept>(pending)));
           })
      .def("accept", [](Engine& e, const std::string& term) { return e.accept(term).value; })
      .def("reject", [](Engine& e, const std::string& term) { e.reject(term); })
      .def("concept",
           [](const Engine& e, std::uint64_t id) {
             return to_py(api::to_json(e.concept_node(ConceptId(id))));
           })
      .def(
          "neighbors",
          [](const Engine& e, std::uint64_t id, int hops, double min_weight) {
            const auto n = e.neighbors(ConceptId(id), hops, min_weight);
            return to_py(api::to_json(std::span<const Neighbor>(n)));
          },
          py::arg("concept_id"), py::arg("hops") = 1, py::arg("min_weight") = 0.0)
      .def(
          "search",
          [](const Engine& e, const std::string& mode, const std::string& q, std::size_t limit,
             const std::map<std::string, std::string>& filters) {
            auto params = filters;
            params["mode"] = mode;
            params["q"] = q;
            params["limit"] = std::to_string(limit);
            return to_py(api::to_json(e.search(api::search_query_from_params(params))));
          },
          py::arg("mode"), py::arg("q") = "", py::arg("limit") = 20,
          py::arg("filters") = std::map<std::string, std::string>{});
}
