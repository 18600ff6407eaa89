# Copyright 2026 The reporec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Sequential repository recommendation pipeline."""

from ._core import (
    Config,
    Corpus,
    Graph,
    TrainingError,
    ValidationError,
    __version__,
    build_graph,
    build_graph_cmd,
    cosine,
    evaluate_cmd,
    filter_corpus,
    hit_rate,
    ingest,
    load_corpus,
    minmax_scale,
    ndcg,
    normalize,
    normalize_topic,
    recommend_cmd,
    reciprocal_rank,
    softmax,
    sparsify_cmd,
    train_rec_cmd,
    train_sdne,
    train_sdne_cmd,
)

__all__ = [
    "Config",
    "Corpus",
    "Graph",
    "TrainingError",
    "ValidationError",
    "__version__",
    "build_graph",
    "build_graph_cmd",
    "cosine",
    "evaluate_cmd",
    "filter_corpus",
    "hit_rate",
    "ingest",
    "load_corpus",
    "minmax_scale",
    "ndcg",
    "normalize",
    "normalize_topic",
    "recommend_cmd",
    "reciprocal_rank",
    "softmax",
    "sparsify_cmd",
    "train_rec_cmd",
    "train_sdne",
    "train_sdne_cmd",
]
