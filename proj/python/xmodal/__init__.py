# python/xmodal/__init__.py

# Copyright 2026  The xmodal Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Cross-modal text-to-audio alignment toolkit."""

from ._core import (
    Adapter,
    XmodalError,
    clean_description,
    configure_strategy,
    contrastive_loss,
    cosine_similarity,
    jackknife_ci,
    join_tags,
    map_at_k,
    mean_pool,
    nt_xent_loss,
    rank,
    read_embedding_file,
    recall_at_k,
    run_cli,
    write_embedding_file,
)

__all__ = [
    "Adapter",
    "XmodalError",
    "clean_description",
    "configure_strategy",
    "contrastive_loss",
    "cosine_similarity",
    "jackknife_ci",
    "join_tags",
    "map_at_k",
    "mean_pool",
    "nt_xent_loss",
    "rank",
    "read_embedding_file",
    "recall_at_k",
    "run_cli",
    "write_embedding_file",
]
