// tools/make_synthetic.cpp

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

// Writes a synthetic paired-embedding corpus (embedding files plus a
// manifest.jsonl) for trying the toolkit without real encoder output.

#include <iostream>

#include "CLI11.hpp"

#include "xmodal/error.hpp"
#include "xmodal/synthetic.hpp"

int main(int argc, char* argv[]) {
  xmodal::SyntheticSpec spec;
  std::string out;
  CLI::App app{"Generate a synthetic corpus from a shared latent", "xmodal-synth"};
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--pairs", spec.pairs, "Number of pairs");
  app.add_option("--train", spec.train, "Pairs in the train split");
  app.add_option("--validation", spec.validation, "Pairs in the validation split");
  app.add_option("--latent-dim", spec.latent_dim);
  app.add_option("--audio-dim", spec.audio_dim);
  app.add_option("--text-dim", spec.text_dim);
  app.add_option("--audio-noise", spec.audio_noise);
  app.add_option("--text-noise", spec.text_noise);
  app.add_option("--map-seed", spec.map_seed, "Seed of the latent-to-feature maps");
  app.add_option("--seed", spec.sample_seed, "Seed of latents and noise");
  app.add_option("--prefix", spec.id_prefix, "Prefix for every generated id");
  CLI11_PARSE(app, argc, argv);

  try {
    xmodal::WriteSyntheticCorpus(spec, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << "wrote " << spec.pairs << " pairs to " << out << '\n';
  return 0;
}
