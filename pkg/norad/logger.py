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

import json
import logging
from typing import Any, Dict, Optional


TRACE_LOGGER = logging.getLogger('norad.trace')
TRACE_LOGGER.propagate = False


def setup_trace_logger(filename: Optional[str]):
    """
    Route the trace records (one JSON object per line) to ``filename``. When no filename is
    given the trace logger is disabled.
    """
    TRACE_LOGGER.handlers.clear()
    if filename is not None:
        fh = logging.FileHandler(filename, mode='w')
        fh.setFormatter(logging.Formatter('%(message)s'))
        TRACE_LOGGER.addHandler(fh)
        TRACE_LOGGER.setLevel(logging.INFO)
        TRACE_LOGGER.disabled = False
    else:
        TRACE_LOGGER.disabled = True


def log_trace(record: Dict[str, Any]):
    if not TRACE_LOGGER.disabled and TRACE_LOGGER.handlers:
        TRACE_LOGGER.info(json.dumps(record))
