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

from typing import Dict, Optional


class NoradError(Exception):
    """Base class of all the errors raised by the package."""


class DimensionError(NoradError):
    """Operand shapes are not compatible with the requested operation."""


class DomainError(NoradError):
    """A value lies outside the domain of the operation (e.g. log of a non-positive number)."""


class ContractError(NoradError):
    """A precondition of an operation is violated by the caller."""


class NumericError(NoradError):
    """
    A computation produced a non-finite value.

    Args:
        message (str): human-readable description.
        term (str, optional): name of the objective term that failed.
        breakdown (Dict[str, float], optional): values of the objective terms at failure time.
    """
    def __init__(
            self,
            message: str,
            term: Optional[str] = None,
            breakdown: Optional[Dict[str, float]] = None):
        super().__init__(message)
        self.term = term
        self.breakdown = breakdown or {}


class ParseError(NoradError):
    """
    An input file cannot be parsed.

    Args:
        message (str): human-readable description.
        line_number (int, optional): 1-based line of the offending input.
    """
    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConsistencyError(NoradError):
    """Inputs are individually valid but inconsistent with each other."""


class CapacityError(NoradError):
    """The graph cannot supply the requested number of samples."""


class ConfigError(NoradError):
    """Invalid or unknown configuration values."""


class CompatibilityError(NoradError):
    """An artifact was written by an incompatible version of the package."""
