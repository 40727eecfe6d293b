"""First-order-logic rule extraction from trained rule networks.

Disjunction neurons whose membership passes the keep threshold become
clauses; conjunction memberships select the atoms of each clause body.
Memberships at or above the confidence threshold print bare, lower ones
print with their weight in brackets, e.g. ``[0.81]CartPos<2.82``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .policy import DnlPolicy, process_state
from .predicates import Column, bound_value

THRESHOLD_KEEP = 0.5
THRESHOLD_CONFIDENT = 0.95


@dataclass
class RuleAtom:
    name: str                  # feature or transform atom, or discrete literal
    comparator: str | None     # "<" or ">" for continuous, None for discrete
    bound: float | None        # trained bound at extraction time
    weight: float | None       # None when the membership is confident

    def render(self) -> str:
        prefix = f"[{self.weight:.2f}]" if self.weight is not None else ""
        if self.comparator is None:
            return f"{prefix}{self.name}"
        return f"{prefix}{self.name}{self.comparator}{self.bound:.2f}"


@dataclass
class ExtractedRule:
    action: str
    weight: float | None       # disjunct membership, None when confident
    atoms: list[RuleAtom] = field(default_factory=list)

    def render(self) -> str:
        body = " ∧ ".join(a.render() for a in self.atoms) if self.atoms else "⊤"
        prefix = f"[{self.weight:.2f}] " if self.weight is not None else ""
        return f":- {prefix}({body})"


def _column_atom(column: Column, bank) -> tuple[str, str | None, float | None]:
    if column.kind == "gt":
        return column.atom, ">", bound_value(bank, column)
    if column.kind == "lt":
        return column.atom, "<", bound_value(bank, column)
    polarity = "True" if column.kind == "true" else "False"
    return f"{column.atom}{polarity}", None, None


def extract_policy(policy: DnlPolicy,
                   threshold_keep: float = THRESHOLD_KEEP,
                   threshold_confident: float = THRESHOLD_CONFIDENT) -> list[ExtractedRule]:
    """Threshold membership weights into readable per-action clauses."""
    if not 0.0 < threshold_keep <= threshold_confident <= 1.0:
        raise ValueError("need 0 < threshold_keep <= threshold_confident <= 1")
    from .predicates import matrix_columns
    columns = matrix_columns(policy.schema, policy.kb)
    rules: list[ExtractedRule] = []
    for action in policy.action_names:
        net = policy.networks[action]
        m_conj, m_disj = net.membership_values()
        for p in range(net.n_p):
            if m_disj[p] < threshold_keep:
                continue
            disj_weight = None if m_disj[p] >= threshold_confident else float(m_disj[p])
            atoms: list[RuleAtom] = []
            for j, column in enumerate(columns):
                w = m_conj[p, j]
                if w < threshold_keep:
                    continue
                name, comparator, bound = _column_atom(column, policy.bank)
                atoms.append(RuleAtom(
                    name=name, comparator=comparator, bound=bound,
                    weight=None if w >= threshold_confident else float(w)))
            rules.append(ExtractedRule(action=action, weight=disj_weight, atoms=atoms))
    return rules


def crisp_evaluate(rules: list[ExtractedRule], state, schema, kb=None,
                   action_names=None) -> dict[str, int]:
    """Evaluate rules with hard comparisons; weights are ignored.

    Returns 0/1 per action; actions with no rule (or no listed rule that
    holds) evaluate to 0.
    """
    processed = process_state(state, schema, kb)
    values: dict[str, int] = {name: 0 for name in (action_names or [])}
    for rule in rules:
        holds = all(_atom_holds(atom, processed) for atom in rule.atoms)
        if holds:
            values[rule.action] = 1
        else:
            values.setdefault(rule.action, 0)
    return values


def _atom_holds(atom: RuleAtom, processed: dict) -> bool:
    if atom.comparator is None:
        # discrete literal such as LeftLegContactTrue
        if atom.name.endswith("True"):
            return bool(processed[atom.name[:-4]])
        return not bool(processed[atom.name[:-5]])
    value = processed[atom.name]
    if atom.comparator == ">":
        return value > atom.bound
    return value < atom.bound


def crisp_action_values(rules: list[ExtractedRule], states: np.ndarray,
                        policy: DnlPolicy) -> np.ndarray:
    """Vector of crisp truth values per action over a batch of states."""
    out = np.zeros((len(states), policy.n_actions))
    index = {name: i for i, name in enumerate(policy.action_names)}
    for row, state in enumerate(states):
        values = crisp_evaluate(rules, state, policy.schema, policy.kb)
        for action, value in values.items():
            out[row, index[action]] = value
    return out


def fidelity(policy: DnlPolicy, states: np.ndarray,
             threshold_keep: float = THRESHOLD_KEEP,
             threshold_confident: float = THRESHOLD_CONFIDENT) -> float:
    """Agreement rate between crisp-rule argmax and fuzzy argmax."""
    rules = extract_policy(policy, threshold_keep, threshold_confident)
    crisp = crisp_action_values(rules, states, policy)
    fuzzy = policy.distribution(states)
    return float((crisp.argmax(axis=1) == fuzzy.argmax(axis=1)).mean())


def format_policy(rules: list[ExtractedRule], action_names: list[str],
                  reward_mean: float | None = None,
                  reward_std: float | None = None) -> str:
    """Per-action report with one clause per line."""
    lines: list[str] = []
    if reward_mean is not None:
        std = f" ± {reward_std:.1f}" if reward_std is not None else ""
        lines.append(f"mean reward: {reward_mean:.1f}{std}")
        lines.append("")
    by_action: dict[str, list[ExtractedRule]] = {name: [] for name in action_names}
    for rule in rules:
        by_action.setdefault(rule.action, []).append(rule)
    for action in action_names:
        lines.append(f"{action}()")
        clauses = by_action.get(action, [])
        if not clauses:
            lines.append("  :- ⊥")
        for rule in clauses:
            lines.append(f"  {rule.render()}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def rules_to_jsonl(rules: list[ExtractedRule]) -> str:
    """One JSON record per rule."""
    records = []
    for rule in rules:
        records.append(json.dumps({
            "action": rule.action,
            "weight": rule.weight,
            "atoms": [{"name": a.name, "op": a.comparator, "bound": a.bound,
                       "weight": a.weight} for a in rule.atoms],
        }, sort_keys=True))
    return "\n".join(records) + ("\n" if records else "")


def rules_from_jsonl(text: str) -> list[ExtractedRule]:
    rules = []
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        rules.append(ExtractedRule(
            action=record["action"], weight=record["weight"],
            atoms=[RuleAtom(name=a["name"], comparator=a["op"], bound=a["bound"],
                            weight=a["weight"]) for a in record["atoms"]]))
    return rules
