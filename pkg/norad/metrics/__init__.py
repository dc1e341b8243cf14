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

from norad.metrics.link_prediction import HITS_AT, ScoredEdges, average_precision, hits_at_k, \
    isolated_link_report, link_prediction_report, roc_auc, score_edges
from norad.metrics.clustering import ClusterAssignment, clustering_report, hungarian_accuracy, \
    kmeans, nmi


__all__ = [
    "HITS_AT", "ScoredEdges", "average_precision", "hits_at_k", "isolated_link_report",
    "link_prediction_report", "roc_auc", "score_edges", "ClusterAssignment", "clustering_report",
    "hungarian_accuracy", "kmeans", "nmi",
]
