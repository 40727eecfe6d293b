"""Predicate action policy: per-action rule networks over the input matrix.

State preprocessing mirrors the agent loop: discrete features map straight
to their Boolean predicates; continuous features map through a registered
transform when one exists and always keep their raw value as its own atom.
The per-action truth values are normalised (with a small additive floor)
into a categorical action distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autograd
from .autograd import Tensor
from .errors import DimensionMismatchError
from .logic import DnlNetwork
from .predicates import (FeatureSchema, InputMatrix, PredicateBank, TransformKB,
                         build_input_matrix, init_equal_width)

# Additive floor before sum-normalising truth values into probabilities;
# keeps the distribution defined when every action predicate reads zero.
DISTRIBUTION_FLOOR = 1e-6


def process_state(state, schema: FeatureSchema, kb: TransformKB | None = None) -> dict:
    """Map one raw state vector to named (possibly transformed) values.

    Continuous features keep their raw value; features with a registered
    transform additionally carry the transformed value under the transform
    atom name.  Discrete features become booleans.
    """
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (schema.state_dim,):
        raise DimensionMismatchError(
            f"state has shape {state.shape}, schema expects ({schema.state_dim},)")
    n_cont = len(schema.continuous)
    if not np.all(np.isfinite(state[:n_cont])):
        raise ValueError("non-finite continuous feature in state")
    processed: dict = {}
    for i, f in enumerate(schema.continuous):
        value = float(state[i])
        processed[f.name] = value
        if kb is not None and f.name in kb:
            processed[kb.atom_name(f.name)] = float(kb.apply(f.name, value))
    for j, f in enumerate(schema.discrete):
        processed[f.name] = bool(state[n_cont + j])
    return processed


def process_batch(states: np.ndarray, schema: FeatureSchema,
                  kb: TransformKB | None = None) -> dict[str, np.ndarray]:
    """Vectorised `process_state` over a (batch, state_dim) array."""
    states = np.asarray(states, dtype=np.float64)
    if states.ndim == 1:
        states = states[None, :]
    if states.shape[1] != schema.state_dim:
        raise DimensionMismatchError(
            f"batch has {states.shape[1]} features, schema expects {schema.state_dim}")
    n_cont = len(schema.continuous)
    if not np.all(np.isfinite(states[:, :n_cont])):
        raise ValueError("non-finite continuous feature in state batch")
    processed: dict[str, np.ndarray] = {}
    for i, f in enumerate(schema.continuous):
        column = states[:, i]
        processed[f.name] = column
        if kb is not None and f.name in kb:
            processed[kb.atom_name(f.name)] = np.asarray(kb.apply(f.name, column),
                                                         dtype=np.float64)
    for j, f in enumerate(schema.discrete):
        processed[f.name] = states[:, n_cont + j]
    return processed


@dataclass
class PolicyOutput:
    """Forward-chain result for a batch of states."""

    truth: Tensor          # (batch, n_actions) per-action truth values
    probs: Tensor          # (batch, n_actions) normalised distribution
    input_matrix: InputMatrix

    def distribution(self) -> np.ndarray:
        return self.probs.data

    def entropy(self) -> float:
        p = self.probs.data
        return float(-(p * np.log(p)).sum(axis=1).mean())


class DnlPolicy:
    """The set of per-action rule networks plus the shared predicate bank."""

    def __init__(self, schema: FeatureSchema, action_names: list[str], rng,
                 kb: TransformKB | None = None, rules_per_action: int = 4,
                 membership_sharpness: float = 6.0, boundary_sharpness: float = 20.0,
                 init_mean: float = -1.0, init_std: float = 0.25,
                 floor: float = DISTRIBUTION_FLOOR):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        self.schema = schema
        self.kb = kb if kb is not None else TransformKB()
        self.action_names = list(action_names)
        self.floor = float(floor)
        self.bank = init_equal_width(schema, self.kb, boundary_sharpness)
        n_e = schema.input_width(self.kb)
        self.networks = {
            name: DnlNetwork(n_e, rules_per_action, rng,
                             sharpness=membership_sharpness,
                             init_mean=init_mean, init_std=init_std)
            for name in self.action_names
        }

    @property
    def n_actions(self) -> int:
        return len(self.action_names)

    @property
    def input_width(self) -> int:
        return self.schema.input_width(self.kb)

    def parameters(self) -> list[Tensor]:
        groups = [net.parameters() for net in self.networks.values()]
        groups.append(self.bank.parameters())
        return autograd.parameters_of(*groups)

    def forward(self, states: np.ndarray) -> PolicyOutput:
        """Single-step forward chain over a batch of raw states."""
        processed = process_batch(states, self.schema, self.kb)
        matrix = build_input_matrix(processed, self.bank, self.schema, self.kb)
        truths = [self.networks[name](matrix.values) for name in self.action_names]
        truth = autograd.stack(truths, axis=1)          # (b, n_actions)
        floored = truth + self.floor
        probs = floored / floored.sum(axis=1, keepdims=True)
        return PolicyOutput(truth=truth, probs=probs, input_matrix=matrix)

    def distribution(self, states: np.ndarray) -> np.ndarray:
        """Action distribution without graph recording."""
        with autograd.no_grad():
            return self.forward(states).probs.data


def sample_action(distribution: np.ndarray, rng=None, greedy: bool = False) -> int:
    """Draw an action index; greedy takes the argmax (lowest index on ties)."""
    p = np.asarray(distribution, dtype=np.float64).reshape(-1)
    if greedy:
        return int(np.argmax(p))
    if rng is None:
        rng = np.random.default_rng()
    # guard against rounding drift in the cumulative draw
    p = p / p.sum()
    return int(rng.choice(len(p), p=p))
