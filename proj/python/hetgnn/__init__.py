# Copyright 2026 The HetGNN Authors. All Rights Reserved.
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
# ==============================================================================
"""Heterogeneous graph tensors, subgraph sampling and GNN training."""

from hetgnn._hetgnn import (
    CorruptDataError,
    Error,
    FingerprintMismatch,
    GraphSchema,
    GraphTensor,
    InvalidArgument,
    IoError,
    Model,
    ParseError,
    ValidationError,
    check_sampling_spec,
    community_model_config,
    decode_graph,
    encode_graph,
    merge_batch,
    read_graphs,
    sample,
    train,
    validate_graph,
    write_community_files,
    write_graphs,
)

__all__ = [
    "CorruptDataError",
    "Error",
    "FingerprintMismatch",
    "GraphSchema",
    "GraphTensor",
    "InvalidArgument",
    "IoError",
    "Model",
    "ParseError",
    "ValidationError",
    "check_sampling_spec",
    "community_model_config",
    "decode_graph",
    "encode_graph",
    "merge_batch",
    "read_graphs",
    "sample",
    "train",
    "validate_graph",
    "write_community_files",
    "write_graphs",
]
