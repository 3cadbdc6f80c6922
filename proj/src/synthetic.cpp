// src/synthetic.cpp

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

#include "xmodal/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

#include "xmodal/error.hpp"

namespace xmodal {

namespace {

Matrix RandomMap(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

Matrix View(const Matrix& map, const Vector& latent, std::size_t frames, double noise,
            std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, noise);
  const Vector clean = map * latent;
  Matrix seq(static_cast<Eigen::Index>(frames), clean.size());
  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    for (Eigen::Index j = 0; j < seq.cols(); ++j) {
      // Round through f32 so in-memory data matches what a file would hold.
      seq(t, j) = static_cast<float>(clean[j] + normal(rng));
    }
  }
  return seq;
}

std::string Id(const SyntheticSpec& spec, char kind, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05zu", kind, i);
  return spec.id_prefix + buf;
}

Split SplitOf(const SyntheticSpec& spec, std::size_t i) {
  if (i < spec.train) return Split::kTrain;
  if (i < spec.train + spec.validation) return Split::kValidation;
  return Split::kTest;
}

}  // namespace

Dataset MakeSyntheticDataset(const SyntheticSpec& spec, std::string name, NoiseTier tier) {
  if (spec.pairs == 0 || spec.latent_dim == 0 || spec.audio_dim == 0 ||
      spec.text_dim == 0 || spec.audio_frames == 0 || spec.text_frames == 0) {
    Fail(ErrorCode::kInvalidConfig, "synthetic spec has a zero size");
  }
  std::mt19937_64 map_rng(spec.map_seed);
  const Matrix audio_map = RandomMap(spec.audio_dim, spec.latent_dim, map_rng);
  const Matrix text_map = RandomMap(spec.text_dim, spec.latent_dim, map_rng);

  std::mt19937_64 rng(spec.sample_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  ds.name = std::move(name);
  ds.noise_tier = tier;
  for (std::size_t i = 0; i < spec.pairs; ++i) {
    Vector z(static_cast<Eigen::Index>(spec.latent_dim));
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normal(rng);
    PairedExample ex;
    ex.pair_id = Id(spec, 'p', i);
    ex.label = Id(spec, 'a', i);
    ex.split = SplitOf(spec, i);
    ex.audio = std::make_shared<const EmbeddingSequence>(EmbeddingSequence{
        ex.label, Modality::kAudio,
        View(audio_map, z, spec.audio_frames, spec.audio_noise, rng)});
    ex.text = std::make_shared<const EmbeddingSequence>(EmbeddingSequence{
        Id(spec, 't', i), Modality::kText,
        View(text_map, z, spec.text_frames, spec.text_noise, rng)});
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

void WriteSyntheticCorpus(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const Dataset ds = MakeSyntheticDataset(spec, "synthetic");
  fs::create_directories(dir / "emb");
  std::ofstream manifest(dir / "manifest.jsonl");
  if (!manifest) Fail(ErrorCode::kIoError, "cannot write manifest in " + dir.string());
  for (const auto& ex : ds.examples) {
    const auto audio_rel = "emb/" + ex.audio->item_id + ".xmeb";
    const auto text_rel = "emb/" + ex.text->item_id + ".xmeb";
    WriteEmbeddingFile(dir / audio_rel, ex.audio->data);
    WriteEmbeddingFile(dir / text_rel, ex.text->data);
    nlohmann::ordered_json rec = {{"pair_id", ex.pair_id},
                                  {"audio_id", ex.label},
                                  {"audio_embedding", audio_rel},
                                  {"text_id", ex.text->item_id},
                                  {"text_embedding", text_rel},
                                  {"split", SplitName(ex.split)}};
    manifest << rec.dump() << '\n';
  }
}

}  // namespace xmodal
