# Copyright 2026 FBK

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License

from norad.graph.store import AttributedGraph, LoadedEdges, canonical_edges, load_cora_content, \
    load_edge_list, load_features, load_graph, load_graph_files, load_labels, write_graph
from norad.graph.adjacency import NormalizedAdjacency, adjacency_matrix, isolated_nodes, \
    normalized_adjacency
from norad.graph.split import EdgeSplit, graph_statistics, load_split, save_split, \
    split_edges, split_sizes


__all__ = [
    "AttributedGraph", "LoadedEdges", "canonical_edges", "load_cora_content", "load_edge_list",
    "load_features", "load_graph", "load_graph_files", "load_labels", "write_graph",
    "NormalizedAdjacency", "adjacency_matrix", "isolated_nodes", "normalized_adjacency",
    "EdgeSplit", "graph_statistics", "load_split", "save_split", "split_edges", "split_sizes",
]
