"""Rule extraction, crisp evaluation and report formatting."""

import numpy as np
import pytest

from dnlrl.policy import DnlPolicy
from dnlrl.predicates import (ContinuousFeature, DiscreteFeature, FeatureSchema,
                              TransformKB)
from dnlrl.rules import (ExtractedRule, RuleAtom, crisp_evaluate, extract_policy,
                         fidelity, format_policy, rules_from_jsonl, rules_to_jsonl)

ANGLE = "∧"  # logical and
BOTTOM = "⊥"


def cartpole_like_policy(seed=0):
    schema = FeatureSchema(continuous=[
        ContinuousFeature("CartPos", -4.8, 4.8, 2),
        ContinuousFeature("PoleAngleVeloc", -3.0, 3.0, 2),
    ])
    return DnlPolicy(schema, ["left", "right"], np.random.default_rng(seed))


def raw_for(membership, sharpness=6.0):
    """Raw weight whose sigmoid(c*w) equals the wanted membership."""
    return np.log(membership / (1.0 - membership)) / sharpness


def test_extraction_formats_weighted_atom():
    policy = cartpole_like_policy()
    net = policy.networks["left"]
    net.w_conj.data[...] = -100.0
    net.w_disj.data[...] = -100.0
    # rule 0 confident; atom on the lt column of CartPos bin 1 with weight 0.81
    net.w_disj.data[0] = 100.0
    lt_col = 3   # CartPos columns: gt0, lt0, gt1, lt1
    net.w_conj.data[0, lt_col] = raw_for(0.81)
    policy.bank.by_name["CartPos"].lt_bounds.data[1] = 2.82
    rules = extract_policy(policy)
    assert len(rules) == 1
    rule = rules[0]
    assert rule.action == "left"
    assert rule.weight is None                     # confident disjunct
    assert len(rule.atoms) == 1
    assert rule.atoms[0].render() == "[0.81]CartPos<2.82"
    assert rule.render() == ":- ([0.81]CartPos<2.82)"


def test_confident_atom_prints_bare():
    policy = cartpole_like_policy()
    net = policy.networks["right"]
    net.w_conj.data[...] = -100.0
    net.w_disj.data[...] = -100.0
    net.w_disj.data[0] = raw_for(0.96)
    net.w_conj.data[0, 0] = raw_for(0.96)
    rules = extract_policy(policy, 0.5, 0.95)
    (rule,) = [r for r in rules if r.action == "right"]
    assert rule.weight is None
    assert rule.atoms[0].weight is None
    assert ">" in rule.atoms[0].render() and "[" not in rule.atoms[0].render()


def test_zero_memberships_give_no_rules():
    policy = cartpole_like_policy()
    for net in policy.networks.values():
        net.w_conj.data[...] = -100.0
        net.w_disj.data[...] = -100.0
    assert extract_policy(policy) == []


def test_threshold_monotonicity():
    policy = cartpole_like_policy(seed=5)
    for net in policy.networks.values():
        net.w_conj.data[...] = np.random.default_rng(1).normal(0.0, 0.3,
                                                               net.w_conj.shape)
        net.w_disj.data[...] = np.random.default_rng(2).normal(0.2, 0.3,
                                                               net.w_disj.shape)

    def count(threshold):
        rules = extract_policy(policy, threshold, 0.95)
        return len(rules), sum(len(r.atoms) for r in rules)

    previous = count(0.05)
    for threshold in (0.2, 0.4, 0.6, 0.8, 0.95):
        current = count(threshold)
        assert current[0] <= previous[0] and current[1] <= previous[1]
        previous = current


def test_extraction_is_read_only():
    policy = cartpole_like_policy(seed=7)
    before = [p.data.copy() for p in policy.parameters()]
    extract_policy(policy)
    for p, b in zip(policy.parameters(), before):
        np.testing.assert_array_equal(p.data, b)


def test_invalid_thresholds():
    policy = cartpole_like_policy()
    with pytest.raises(ValueError):
        extract_policy(policy, 0.0, 0.95)
    with pytest.raises(ValueError):
        extract_policy(policy, 0.9, 0.5)


def test_crisp_evaluate_hard_comparisons():
    schema = FeatureSchema(continuous=[
        ContinuousFeature("PoleAngleVeloc", -3.0, 3.0, 2)])
    rule = ExtractedRule(action="left", weight=None, atoms=[
        RuleAtom("PoleAngleVeloc", ">", 0.08, None)])
    assert crisp_evaluate([rule], np.array([0.1]), schema)["left"] == 1
    assert crisp_evaluate([rule], np.array([0.05]), schema)["left"] == 0
    # empty rule set: all actions read 0
    values = crisp_evaluate([], np.array([0.1]), schema,
                            action_names=["left", "right"])
    assert values == {"left": 0, "right": 0}


def test_crisp_evaluate_discrete_and_transform_atoms():
    schema = FeatureSchema(
        continuous=[ContinuousFeature("Angle", -1.6, 1.6, 2)],
        discrete=[DiscreteFeature("LeftLegContact")])
    kb = TransformKB({"Angle": "sine"})
    rules = [
        ExtractedRule("fireLeft", None, [RuleAtom("AngleSine", ">", 0.0, None),
                                         RuleAtom("LeftLegContactTrue", None, None, None)]),
        ExtractedRule("fireRight", None, [RuleAtom("LeftLegContactFalse", None, None, None)]),
    ]
    state = np.array([0.5, 1.0])            # sin(0.5) > 0, left leg touching
    values = crisp_evaluate(rules, state, schema, kb)
    assert values == {"fireLeft": 1, "fireRight": 0}
    state = np.array([-0.5, 0.0])
    values = crisp_evaluate(rules, state, schema, kb)
    assert values == {"fireLeft": 0, "fireRight": 1}


def test_format_policy_report():
    rules = [
        ExtractedRule("left", None, [RuleAtom("CartPos", "<", 2.82, 0.81),
                                     RuleAtom("PoleAngle", ">", -0.06, None)]),
        ExtractedRule("left", 0.64, [RuleAtom("PoleAngleVeloc", ">", 0.08, None)]),
    ]
    report = format_policy(rules, ["left", "right"], 290.3, 32.3)
    lines = report.splitlines()
    assert lines[0] == "mean reward: 290.3 ± 32.3"
    assert "left()" in report and "right()" in report
    left_block = report.split("left()")[1].split("right()")[0]
    assert left_block.count(":-") == 2
    assert f"[0.81]CartPos<2.82 {ANGLE} PoleAngle>-0.06" in report
    assert ":- [0.64] (PoleAngleVeloc>0.08)" in report
    # an action with no clause renders as bottom
    assert f":- {BOTTOM}" in report.split("right()")[1]


def test_jsonl_round_trip():
    rules = [
        ExtractedRule("left", 0.7, [RuleAtom("CartPos", "<", 2.82, 0.81)]),
        ExtractedRule("right", None, [RuleAtom("LeftLegContactTrue", None, None, None)]),
    ]
    text = rules_to_jsonl(rules)
    assert len(text.splitlines()) == 2
    back = rules_from_jsonl(text)
    assert back == rules
    assert rules_to_jsonl([]) == ""


def test_fidelity_on_a_handmade_crisp_policy():
    policy = cartpole_like_policy()
    left, right = policy.networks["left"], policy.networks["right"]
    for net in (left, right):
        net.w_conj.data[...] = -100.0
        net.w_disj.data[...] = -100.0
    # left when PoleAngleVeloc > 0 (gt column of bin 1, bound 0.0)
    left.w_disj.data[0] = 100.0
    left.w_conj.data[0, 6] = 100.0        # columns: CartPos x4, then PAV gt0,lt0,gt1,lt1
    right.w_disj.data[0] = 100.0
    right.w_conj.data[0, 7] = 100.0       # PoleAngleVeloc < 3.0? no: lt1 bound 3.0
    right.w_conj.data[0, 5] = 100.0       # PoleAngleVeloc < 0.0 (lt bin 0)
    states = np.random.default_rng(0).uniform(-2, 2, (500, 2))
    agreement = fidelity(policy, states)
    assert agreement > 0.95
