// python/bindings.cpp

// Copyright 2026  The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xmodal/adapter.hpp"
#include "xmodal/checkpoint.hpp"
#include "xmodal/cli.hpp"
#include "xmodal/data_model.hpp"
#include "xmodal/error.hpp"
#include "xmodal/losses.hpp"
#include "xmodal/numerics.hpp"
#include "xmodal/retrieval.hpp"
#include "xmodal/text_prep.hpp"
#include "xmodal/training.hpp"

namespace py = pybind11;
using namespace xmodal;

namespace {

// Python side uses one row per item; the library uses one column per item.
BatchEmbeddings MakeBatch(const Matrix& audio_rows, const Matrix& text_rows,
                          std::vector<std::string> labels) {
  return {audio_rows.transpose(), text_rows.transpose(), std::move(labels)};
}

py::tuple LossTuple(const LossOutput& out) {
  return py::make_tuple(out.value, Matrix(out.audio_grad.transpose()),
                        Matrix(out.text_grad.transpose()), out.active_pair_count);
}

PairMining MiningFromString(const std::string& name) {
  auto m = ParsePairMining(name);
  if (!m) throw py::value_error("mining must be 'all_pairs' or 'cross_modal_only'");
  return *m;
}

std::vector<RankedResult> MakeResults(const std::vector<std::vector<std::string>>& rankings,
                                      const std::vector<std::set<std::string>>& relevant) {
  if (rankings.size() != relevant.size()) {
    throw py::value_error("rankings and relevant sets differ in length");
  }
  std::vector<RankedResult> out(rankings.size());
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    out[i].query_id = std::to_string(i);
    for (const auto& id : rankings[i]) out[i].ranking.push_back({id, 0.0});
    out[i].relevant_ids = relevant[i];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cross-modal text-to-audio alignment toolkit (C++ core)";

  // Messages start with the error code name, e.g. "CorruptFile: ...".
  py::register_exception<Error>(m, "XmodalError", PyExc_RuntimeError);

  m.def("clean_description", &CleanDescription, py::arg("text"));
  m.def("join_tags", &JoinTags, py::arg("tags"));

  m.def(
      "read_embedding_file",
      [](const std::filesystem::path& path) { return ReadEmbeddingFile(path).data; },
      py::arg("path"), "Returns the T x F matrix stored in an XMEB file.");
  m.def(
      "write_embedding_file",
      [](const std::filesystem::path& path, const Matrix& data) {
        WriteEmbeddingFile(path, data);
      },
      py::arg("path"), py::arg("data"));

  m.def("mean_pool", [](const Matrix& seq) { return MeanPool(seq); }, py::arg("seq"));
  m.def(
      "cosine_similarity",
      [](const Vector& a, const Vector& b) {
        const auto c = CosineSimilarity(a, b);
        return py::make_tuple(c.value, c.degenerate);
      },
      py::arg("a"), py::arg("b"), "Returns (value, degenerate).");

  py::class_<Adapter>(m, "Adapter")
      .def_static(
          "init",
          [](Eigen::Index f, Eigen::Index h, Eigen::Index out, std::uint64_t seed) {
            return Adapter::Init({f, h, out}, seed);
          },
          py::arg("input_dim"), py::arg("hidden_dim") = kDefaultHidden,
          py::arg("output_dim") = kDefaultOutput, py::arg("seed") = 0)
      .def_property_readonly("input_dim", [](const Adapter& a) { return a.dims().input; })
      .def_property_readonly("hidden_dim", [](const Adapter& a) { return a.dims().hidden; })
      .def_property_readonly("output_dim", [](const Adapter& a) { return a.dims().output; })
      .def_property_readonly("w1", [](const Adapter& a) { return Matrix(a.w1()); })
      .def_property_readonly("b1", [](const Adapter& a) { return Vector(a.b1()); })
      .def_property_readonly("w2", [](const Adapter& a) { return Matrix(a.w2()); })
      .def_property_readonly("b2", [](const Adapter& a) { return Vector(a.b2()); })
      .def("forward", [](const Adapter& a, const Matrix& seq) { return Forward(a, seq).output; },
           py::arg("seq"));

  m.def(
      "contrastive_loss",
      [](const Matrix& audio, const Matrix& text, std::vector<std::string> labels,
         const std::string& mining) {
        return LossTuple(
            ContrastiveLoss(MakeBatch(audio, text, std::move(labels)), MiningFromString(mining)));
      },
      py::arg("audio"), py::arg("text"), py::arg("labels"), py::arg("mining") = "all_pairs",
      "Rows are items.  Returns (value, audio_grad, text_grad, active_pairs).");
  m.def(
      "nt_xent_loss",
      [](const Matrix& audio, const Matrix& text, std::vector<std::string> labels,
         const std::string& mining, double temperature) {
        return LossTuple(NtXentLoss(MakeBatch(audio, text, std::move(labels)),
                                    MiningFromString(mining), temperature));
      },
      py::arg("audio"), py::arg("text"), py::arg("labels"),
      py::arg("mining") = "cross_modal_only", py::arg("temperature") = kDefaultTemperature);

  m.def(
      "rank",
      [](std::vector<std::string> ids, const Matrix& embeddings, const Vector& query,
         std::optional<std::size_t> k) {
        const AudioIndex index(std::move(ids), embeddings.transpose());
        std::vector<std::pair<std::string, double>> out;
        for (const auto& item : Rank(index, query, k)) out.emplace_back(item.audio_id, item.score);
        return out;
      },
      py::arg("ids"), py::arg("embeddings"), py::arg("query"), py::arg("k") = py::none(),
      "embeddings has one row per id.  Returns [(audio_id, score)].");
  m.def(
      "recall_at_k",
      [](const std::vector<std::vector<std::string>>& rankings,
         const std::vector<std::set<std::string>>& relevant, std::size_t k) {
        return RecallAtK(MakeResults(rankings, relevant), k);
      },
      py::arg("rankings"), py::arg("relevant"), py::arg("k"));
  m.def(
      "map_at_k",
      [](const std::vector<std::vector<std::string>>& rankings,
         const std::vector<std::set<std::string>>& relevant, std::size_t k) {
        return MapAtK(MakeResults(rankings, relevant), k);
      },
      py::arg("rankings"), py::arg("relevant"), py::arg("k") = 10);
  m.def(
      "jackknife_ci",
      [](const std::vector<double>& scores, double confidence) {
        const auto ci = JackknifeCi(scores, confidence);
        return py::make_tuple(ci.estimate, ci.low, ci.high, ci.half_width);
      },
      py::arg("scores"), py::arg("confidence") = 0.95,
      "Returns (estimate, low, high, half_width_before_clipping).");

  m.def(
      "configure_strategy",
      [](const std::string& name, const std::string& clean, const std::string& noisy) {
        auto s = ParseStrategy(name);
        if (!s) throw py::value_error("unknown strategy " + name);
        py::list stages;
        for (const auto& st : ConfigureStrategy(*s, clean, noisy)) {
          py::dict d;
          d["datasets"] = st.train_datasets;
          d["kind"] = std::string(StageKindName(st.kind));
          d["inherit"] = st.inherit;
          stages.append(d);
        }
        return stages;
      },
      py::arg("name"), py::arg("clean") = "clean", py::arg("noisy") = "noisy");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = RunCli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs an xmodal subcommand in-process; returns (code, stdout, stderr).");
}
