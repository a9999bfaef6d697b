// Copyright 2026 The NASE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nase/app.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

nase::RunConfig Resolve(const std::string& config_json) {
  return nase::ResolveRunConfig(std::nullopt, json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_nase, m) {
  m.doc() = "Native bindings; configs and results are JSON strings.";
  py::register_exception<nase::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<nase::Error>(m, "NaseError", PyExc_RuntimeError);

  m.def("resolve_config", [](const std::string& cfg) {
    return nase::RunConfigToJson(Resolve(cfg)).dump();
  });
  m.def("synth", [](int64_t n_entities, int64_t n_relations, const std::string& mix,
                    uint64_t seed, const std::filesystem::path& out_dir) {
    nase::SynthConfig c;
    c.n_entities = n_entities;
    c.n_relations = n_relations;
    c.mix = nase::ParsePatternMix(mix);
    c.seed = seed;
    py::gil_scoped_release release;
    return nase::CmdSynth(c, out_dir).dump();
  });
  m.def("stats", [](const std::filesystem::path& dataset) {
    return nase::CmdStats(dataset).dump();
  });
  m.def("search", [](const std::string& cfg) {
    const auto c = Resolve(cfg);
    py::gil_scoped_release release;
    return nase::CmdSearch(c).dump();
  });
  m.def("train", [](const std::string& cfg, const std::filesystem::path& genotype) {
    const auto c = Resolve(cfg);
    py::gil_scoped_release release;
    return nase::CmdTrain(c, genotype).dump();
  });
  m.def("evaluate", [](const std::filesystem::path& model, const std::filesystem::path& dataset,
                       const std::string& protocol, const std::string& tie_policy,
                       const std::string& split) {
    nase::EvalOptions o;
    o.protocol = nase::ParseProtocol(protocol);
    o.tie_policy = nase::ParseTiePolicy(tie_policy);
    if (split != "valid" && split != "test") {
      throw nase::Error("unknown split '" + split + "' (expected valid|test)");
    }
    o.split = split == "valid" ? nase::Split::kValid : nase::Split::kTest;
    py::gil_scoped_release release;
    return nase::CmdEval(model, dataset, o).dump();
  });
  m.def("derive", [](const std::filesystem::path& checkpoint) {
    const auto g = nase::CmdDerive(checkpoint, std::nullopt);
    return nase::GenotypeToJson(g).dump();
  });
}
