"""Trainer mechanics: replay, losses, targets, baseline behaviours."""

import math

import numpy as np
import pytest
from scipy import stats

from dnlrl.envs import CartPoleEnv
from dnlrl.nets import Mlp
from dnlrl.optim import Adam
from dnlrl.policy import DnlPolicy
from dnlrl.predicates import ContinuousFeature, FeatureSchema
from dnlrl.replay import Batch, ReplayBuffer, Transition
from dnlrl.trainers import (A2cConfig, A2cTrainer, DqnConfig, DqnTrainer,
                            ReinforceConfig, ReinforceTrainer, SacConfig,
                            SacTrainer, actor_loss, critic_targets, make_trainer)
from dnlrl.autograd import Tensor

from helpers import check_gradients
from toy_mdp import ToyMdpEnv


def tiny_policy(seed=0, actions=("a0", "a1")):
    schema = FeatureSchema(continuous=[ContinuousFeature("StateId", 0.0, 1.0, 2)])
    return DnlPolicy(schema, list(actions), np.random.default_rng(seed))


def transition(s, a, r, s2, done):
    return Transition(np.atleast_1d(np.asarray(s, dtype=np.float64)), a, r,
                      np.atleast_1d(np.asarray(s2, dtype=np.float64)), done)


class TestReplay:
    def test_fifo_eviction(self):
        buf = ReplayBuffer(3, 1, rng=np.random.default_rng(0))
        for i in range(4):
            buf.push(transition([float(i)], 0, float(i), [0.0], False))
        assert len(buf) == 3
        assert 0.0 not in buf.s[:3, 0]          # oldest evicted
        assert set(buf.s[:3, 0]) == {1.0, 2.0, 3.0}

    def test_uniform_sampling_chi_square(self):
        buf = ReplayBuffer(100, 1, rng=np.random.default_rng(42))
        for i in range(100):
            buf.push(transition([float(i)], 0, 0.0, [0.0], False))
        draws = buf.sample(100_000).s[:, 0].astype(int)
        counts = np.bincount(draws, minlength=100)
        expected = 100_000 / 100
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < stats.chi2.ppf(0.999, df=99)


class TestSac:
    def test_actor_loss_uniform_closed_form(self):
        policy = tiny_policy()
        nets = list(policy.networks.values())
        nets[1].w_conj.data[...] = nets[0].w_conj.data
        nets[1].w_disj.data[...] = nets[0].w_disj.data      # exact symmetry
        q1 = Mlp([1, 4, 2], np.random.default_rng(1))
        q2 = Mlp([1, 4, 2], np.random.default_rng(2))
        for net in (q1, q2):
            for p in net.parameters():
                p.data[...] = 0.0
        states = np.array([[0.0], [1.0]])
        loss, _ = actor_loss(states, policy, q1, q2, alpha=0.2)
        assert float(loss.data) == pytest.approx(0.2 * math.log(0.5), abs=1e-12)

    def test_actor_loss_zero_alpha_concentrated(self):
        policy = tiny_policy()
        nets = list(policy.networks.values())
        nets[0].w_disj.data[...] = 1000.0
        nets[0].w_conj.data[...] = -1000.0      # action 0 predicate reads ~1
        nets[1].w_disj.data[...] = -1000.0      # action 1 reads ~0
        q1 = Mlp([1, 4, 2], np.random.default_rng(1))
        q2 = Mlp([1, 4, 2], np.random.default_rng(2))
        for net in (q1, q2):
            for p in net.parameters():
                p.data[...] = 0.0
            net.biases[-1].data[...] = np.array([3.0, -1.0])
        states = np.array([[0.5]])
        loss, _ = actor_loss(states, policy, q1, q2, alpha=0.0)
        assert float(loss.data) == pytest.approx(-3.0, abs=1e-4)

    def test_actor_loss_gradients(self):
        policy = tiny_policy(seed=3)
        q1 = Mlp([1, 4, 2], np.random.default_rng(1))
        q2 = Mlp([1, 4, 2], np.random.default_rng(2))
        states = np.array([[0.2], [0.9], [0.6]])

        def loss():
            return actor_loss(states, policy, q1, q2, alpha=0.2)[0]

        check_gradients(loss, policy.parameters())

    def test_critic_targets_terminal_and_zero_gamma(self):
        policy = tiny_policy()
        qt = Mlp([1, 4, 2], np.random.default_rng(0))
        batch = Batch(s=np.array([[0.0]]), a=np.array([0]), r=np.array([2.5]),
                      s_next=np.array([[1.0]]), done=np.array([1.0]))
        y = critic_targets(batch, qt, qt, policy, alpha=0.2, gamma=0.99)
        assert y[0] == pytest.approx(2.5)
        batch = Batch(s=np.array([[0.0]]), a=np.array([0]), r=np.array([2.5]),
                      s_next=np.array([[1.0]]), done=np.array([0.0]))
        y = critic_targets(batch, qt, qt, policy, alpha=0.2, gamma=0.0)
        assert y[0] == pytest.approx(2.5)

    def test_critic_targets_deterministic_policy_reduction(self):
        # with a near-deterministic policy and alpha=0 the target reduces to
        # r + gamma * Qt(s', a*)
        policy = tiny_policy()
        nets = list(policy.networks.values())
        nets[0].w_disj.data[...] = 1000.0
        nets[0].w_conj.data[...] = -1000.0
        nets[1].w_disj.data[...] = -1000.0
        qt = Mlp([1, 8, 2], np.random.default_rng(5))
        s_next = np.array([[0.7]])
        batch = Batch(s=np.array([[0.0]]), a=np.array([0]), r=np.array([1.0]),
                      s_next=s_next, done=np.array([0.0]))
        y = critic_targets(batch, qt, qt, policy, alpha=0.0, gamma=0.9)
        from dnlrl import autograd
        with autograd.no_grad():
            q_star = qt(s_next).data[0, 0]
        assert y[0] == pytest.approx(1.0 + 0.9 * q_star, abs=1e-4)

    def test_update_skips_until_warmup_and_reports_empty(self):
        policy = tiny_policy()
        cfg = SacConfig(warmup_steps=10, batch_size=4)
        trainer = SacTrainer(policy, 1, cfg, np.random.default_rng(0))
        assert trainer.update() == {"skipped": 1.0}
        trainer.observe([0.0], 0, 1.0, [1.0], False)
        assert trainer.update() is None

    def test_tau_one_copies_targets(self):
        policy = tiny_policy()
        cfg = SacConfig(warmup_steps=2, batch_size=2, tau=1.0)
        trainer = SacTrainer(policy, 1, cfg, np.random.default_rng(0))
        for i in range(4):
            trainer.observe([float(i % 2)], i % 2, 1.0, [float((i + 1) % 2)], False)
        metrics = trainer.update()
        assert metrics is not None
        for mine, online in zip(trainer.q1_target.parameters(),
                                trainer.q1.parameters()):
            np.testing.assert_array_equal(mine.data, online.data)

    def test_entropy_of_uniform_policy(self):
        policy = tiny_policy()
        nets = list(policy.networks.values())
        nets[1].w_conj.data[...] = nets[0].w_conj.data
        nets[1].w_disj.data[...] = nets[0].w_disj.data
        cfg = SacConfig(warmup_steps=2, batch_size=2)
        trainer = SacTrainer(policy, 1, cfg, np.random.default_rng(0))
        for i in range(4):
            trainer.observe([0.5], i % 2, 1.0, [0.5], False)
        metrics = trainer.update()
        assert metrics["entropy"] == pytest.approx(math.log(2), abs=1e-9)


def test_critic_regression_mse_decreases_monotonically():
    # gamma = 0 fixed-target regression sanity at the default critic lr
    rng = np.random.default_rng(0)
    net = Mlp([4, 64, 64, 2], rng)
    opt = Adam(net.parameters(), lr=3e-4)
    states = rng.uniform(-1, 1, (64, 4))
    rewards = rng.uniform(0, 1, 64)
    onehot = np.zeros((64, 2))
    onehot[np.arange(64), rng.integers(0, 2, 64)] = 1.0
    losses = []
    for _ in range(100):
        q_a = (net(states) * onehot).sum(axis=1)
        loss = ((q_a - rewards) ** 2.0).mean()
        losses.append(float(loss.data))
        opt.zero_grad()
        loss.backward()
        opt.step()
    assert all(b < a + 1e-12 for a, b in zip(losses, losses[1:]))


class TestReinforce:
    def test_zero_rewards_leave_parameters_unchanged(self):
        policy = tiny_policy()
        trainer = ReinforceTrainer(policy, 1, ReinforceConfig(), np.random.default_rng(0))
        before = [p.data.copy() for p in policy.parameters()]
        for t in range(5):
            trainer.observe([0.0], t % 2, 0.0, [1.0], t == 4)
        metrics = trainer.update()
        assert metrics is not None
        for p, b in zip(policy.parameters(), before):
            np.testing.assert_array_equal(p.data, b)

    def test_single_step_update_follows_log_prob_gradient(self):
        policy = tiny_policy(seed=2)
        trainer = ReinforceTrainer(policy, 1, ReinforceConfig(lr=1e-3),
                                   np.random.default_rng(0))
        state = np.array([0.3])
        # analytic gradient of log pi(a=0 | s)
        params = policy.parameters()
        for p in params:
            p.grad = None
        out = policy.forward(state[None, :])
        log_p = out.probs.log() * Tensor(np.array([[1.0, 0.0]]))
        log_p.sum().backward()
        grad_dirs = [np.sign(p.grad) for p in params]
        before = [p.data.copy() for p in params]
        trainer.observe(state, 0, 1.0, [1.0], True)
        trainer.update()
        for p, b, g in zip(params, before, grad_dirs):
            delta = p.data - b
            moved = np.abs(delta) > 1e-12
            # ascent: parameters move along the log-prob gradient
            assert np.all(np.sign(delta[moved]) == g[moved])

    def test_bandit_converges_to_rewarding_arm(self):
        policy = tiny_policy(seed=1)
        trainer = ReinforceTrainer(policy, 1, ReinforceConfig(lr=5e-3),
                                   np.random.default_rng(3))
        state = np.array([0.5])
        for _ in range(400):
            a = trainer.act(state)
            trainer.observe(state, a, 1.0 if a == 0 else 0.0, state, True)
            trainer.update()
        dist = policy.distribution(state[None, :])[0]
        assert dist[0] > 0.9


class TestDqn:
    def test_terminal_and_zero_gamma_targets(self):
        cfg = DqnConfig(warmup_steps=2, batch_size=2, gamma=0.0,
                        eps_start=0.0, eps_end=0.0)
        trainer = DqnTrainer(1, 2, cfg, np.random.default_rng(0))
        for i in range(4):
            trainer.observe([0.0], i % 2, 1.0, [1.0], i % 2 == 0)
        metrics = trainer.update()
        assert metrics is not None and "critic_loss" in metrics

    def test_epsilon_schedule(self):
        cfg = DqnConfig(eps_start=1.0, eps_end=0.1, eps_decay_steps=100)
        trainer = DqnTrainer(1, 2, cfg, np.random.default_rng(0))
        assert trainer.epsilon() == pytest.approx(1.0)
        trainer.steps = 50
        assert trainer.epsilon() == pytest.approx(0.55)
        trainer.steps = 1000
        assert trainer.epsilon() == pytest.approx(0.1)


class TestA2c:
    def test_zero_advantage_means_no_actor_update(self):
        policy = tiny_policy()
        trainer = A2cTrainer(policy, 1, A2cConfig(rollout_steps=4),
                             np.random.default_rng(0))
        for p in trainer.value.parameters():
            p.data[...] = 0.0                    # V == 0 and rewards == 0 -> A == 0
        before = [p.data.copy() for p in policy.parameters()]
        for t in range(4):
            trainer.observe([0.5], t % 2, 0.0, [0.5], t == 3)
        trainer.update()
        for p, b in zip(policy.parameters(), before):
            np.testing.assert_array_equal(p.data, b)

    def test_value_converges_to_constant_reward(self):
        policy = tiny_policy()
        cfg = A2cConfig(rollout_steps=8, gamma=0.0, lr_critic=5e-3)
        trainer = A2cTrainer(policy, 1, cfg, np.random.default_rng(0))
        for _ in range(300):
            for t in range(8):
                trainer.observe([0.5], 0, 2.0, [0.5], t == 7)
            trainer.update()
        from dnlrl import autograd
        with autograd.no_grad():
            v = float(trainer.value(np.array([[0.5]])).data[0, 0])
        assert v == pytest.approx(2.0, abs=0.05)


def test_all_trainers_share_the_interface():
    env = ToyMdpEnv(rng=np.random.default_rng(0))
    schema = ToyMdpEnv.schema()
    for name in ("sac", "reinforce", "dqn", "a2c"):
        policy = None
        if name != "dqn":
            policy = DnlPolicy(schema, list(env.action_names),
                               np.random.default_rng(0))
        cfg = {"sac": SacConfig(warmup_steps=4, batch_size=4),
               "reinforce": ReinforceConfig(),
               "dqn": DqnConfig(warmup_steps=4, batch_size=4),
               "a2c": A2cConfig(rollout_steps=4)}[name]
        trainer = make_trainer(name, policy, 1, env.n_actions, cfg,
                               np.random.default_rng(1))
        state = env.reset(seed=0)
        for _ in range(12):
            action = trainer.act(state)
            assert 0 <= action < env.n_actions
            result = env.step(action)
            trainer.observe(state, action, result.reward, result.state,
                            result.done, result.truncated)
            trainer.update()
            state = result.state
        assert isinstance(trainer.state_arrays(), dict)
