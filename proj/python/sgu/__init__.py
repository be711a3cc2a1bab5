# Copyright 2026 The SGU Authors.
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


"""Graph unlearning engine."""

from ._sgu import (
    Graph,
    Model,
    Propagation,
    SguError,
    auc,
    build_graph,
    f1_score,
    generate_sbm,
    khop_hie,
    load_dataset,
    mia_auc,
    propagate,
    run_cli,
    select_hie,
    train_model,
    unlearn,
)

__all__ = [
    "Graph",
    "Model",
    "Propagation",
    "SguError",
    "auc",
    "build_graph",
    "f1_score",
    "generate_sbm",
    "khop_hie",
    "load_dataset",
    "mia_auc",
    "propagate",
    "run_cli",
    "select_hie",
    "train_model",
    "unlearn",
]
