# Copyright 2026 The WPIR Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Leakage versus download cost for weakly private information retrieval."""

from wpir._core import (
    ConvergenceError,
    DecodeError,
    DivergenceUndefinedError,
    DomainError,
    Error,
    InfeasibleError,
    NormalizationError,
    ParameterError,
    capacity,
    cost_range,
    costs,
    crossover,
    kkt_check,
    numeric_oracle,
    option_count,
    optimal_distribution,
    perfect_privacy_cost,
    render_table,
    renyi_divergence,
    simulate,
    structure,
    sweep,
    tradeoff_leakage,
)

__all__ = [
    "ConvergenceError",
    "DecodeError",
    "DivergenceUndefinedError",
    "DomainError",
    "Error",
    "InfeasibleError",
    "NormalizationError",
    "ParameterError",
    "capacity",
    "cost_range",
    "costs",
    "crossover",
    "kkt_check",
    "numeric_oracle",
    "option_count",
    "optimal_distribution",
    "perfect_privacy_cost",
    "render_table",
    "renyi_divergence",
    "simulate",
    "structure",
    "sweep",
    "tradeoff_leakage",
]
