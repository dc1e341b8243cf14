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

from norad.training.adam import AdamState, adam_step, adam_update
from norad.training.checkpoint import CHECKPOINT_FORMAT_VERSION, Checkpoint, load_checkpoint, \
    save_checkpoint
from norad.training.trainer import BEST_CHECKPOINT, LAST_CHECKPOINT, FitResult, TraceRecord, \
    TrainTrace, Trainer, e_step, fit, m_step


__all__ = [
    "AdamState", "adam_step", "adam_update", "CHECKPOINT_FORMAT_VERSION", "Checkpoint",
    "load_checkpoint", "save_checkpoint", "BEST_CHECKPOINT", "LAST_CHECKPOINT", "FitResult",
    "TraceRecord", "TrainTrace", "Trainer", "e_step", "fit", "m_step",
]
