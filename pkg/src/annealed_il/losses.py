"""Training losses with exact analytic gradients.

Covers the cloning loss (expert-action negative log-likelihood), the
discriminator loss in GAN and WGAN flavors, the discriminator-derived
surrogate reward, the policy-gradient loss, value regression, and the
combined weighted update.  Every function returns (scalar loss, gradient
list aligned with ``net.params()``); all gradients are finite-difference
checked in the test suite.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import dists
from .envs import ActionSpec
from .nets import MLP

SURROGATE_REWARD_MAX = 20.0


@dataclass(frozen=True)
class DiscMode:
    variant: str  # "gan" | "wgan"
    clip: float = 0.01  # wgan weight-clip bound

    def __post_init__(self):
        if self.variant not in ("gan", "wgan"):
            raise ValueError(f"unknown discriminator variant {self.variant!r}")
        if self.variant == "wgan" and self.clip <= 0:
            raise ValueError("wgan clip bound must be positive")


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise FloatingPointError(f"{name} is not finite: {value}")
    return value


def _add_grads(a: List[np.ndarray], b: List[np.ndarray]) -> List[np.ndarray]:
    return [x + y for x, y in zip(a, b)]


def _scale_grads(a: List[np.ndarray], s: float) -> List[np.ndarray]:
    return [s * x for x in a]


# -- policy distribution plumbing -------------------------------------------


def policy_dist(net: MLP, spec: ActionSpec, obs: np.ndarray):
    """Forward pass returning (pi output, values, cache)."""
    outs, cache = net.forward(obs)
    return outs["pi"], outs["v"][:, 0], cache


def action_log_probs(net: MLP, spec: ActionSpec, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
    pi, _, _ = policy_dist(net, spec, obs)
    if spec.kind == "discrete":
        return dists.categorical_log_prob(pi, actions)
    log_std, _ = dists.clamped_log_std(net.extras["log_std"])
    return dists.gaussian_log_prob(pi, log_std, actions)


def _weighted_logp_backward(
    net: MLP,
    spec: ActionSpec,
    pi: np.ndarray,
    cache: dict,
    actions: np.ndarray,
    weights: np.ndarray,
) -> List[np.ndarray]:
    """Gradients of sum_i weights_i * log pi(a_i | s_i)."""
    if spec.kind == "discrete":
        d_pi = dists.d_categorical_log_prob(pi, actions, weights)
        return net.backward(cache, {"pi": d_pi})
    raw = net.extras["log_std"]
    log_std, mask = dists.clamped_log_std(raw)
    d_mean, d_log_std = dists.d_gaussian_log_prob(pi, log_std, actions, weights)
    grads = net.backward(cache, {"pi": d_mean})
    grads[net.extra_index("log_std")] += d_log_std * mask
    return grads


# -- cloning loss ------------------------------------------------------------


def bc_loss(net: MLP, spec: ActionSpec, obs: np.ndarray, actions: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """Mean negative log-likelihood of expert actions under the policy."""
    if len(obs) == 0:
        raise ValueError("cloning loss needs a nonempty batch")
    pi, _, cache = policy_dist(net, spec, obs)
    if spec.kind == "discrete":
        logp = dists.categorical_log_prob(pi, actions)
    else:
        log_std, _ = dists.clamped_log_std(net.extras["log_std"])
        logp = dists.gaussian_log_prob(pi, log_std, actions)
    loss = _check_finite("bc_loss", -logp.mean())
    weights = np.full(len(obs), -1.0 / len(obs))
    return loss, _weighted_logp_backward(net, spec, pi, cache, actions, weights)


# -- policy gradient -----------------------------------------------------------


def pg_loss(
    net: MLP,
    spec: ActionSpec,
    obs: np.ndarray,
    actions: np.ndarray,
    advantages: np.ndarray,
    old_log_probs: Optional[np.ndarray] = None,
    ppo_clip: Optional[float] = None,
) -> Tuple[float, List[np.ndarray]]:
    """-mean(log pi(a|s) * A), advantages treated as constants.

    With ``ppo_clip`` set, uses the clipped-ratio surrogate against
    ``old_log_probs`` instead.
    """
    pi, _, cache = policy_dist(net, spec, obs)
    if spec.kind == "discrete":
        logp = dists.categorical_log_prob(pi, actions)
    else:
        log_std, _ = dists.clamped_log_std(net.extras["log_std"])
        logp = dists.gaussian_log_prob(pi, log_std, actions)

    n = len(obs)
    if ppo_clip is None:
        loss = -(logp * advantages).mean()
        weights = -advantages / n
    else:
        ratio = np.exp(logp - old_log_probs)
        clipped = np.clip(ratio, 1.0 - ppo_clip, 1.0 + ppo_clip)
        objective = np.minimum(ratio * advantages, clipped * advantages)
        loss = -objective.mean()
        active = (ratio * advantages <= clipped * advantages).astype(np.float64)
        weights = -active * ratio * advantages / n
    loss = _check_finite("pg_loss", loss)
    return loss, _weighted_logp_backward(net, spec, pi, cache, actions, weights)


def value_loss(net: MLP, obs: np.ndarray, targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """0.5 * mean squared error of the value head against regression targets."""
    outs, cache = net.forward(obs)
    v = outs["v"][:, 0]
    err = v - targets
    loss = _check_finite("value_loss", 0.5 * (err**2).mean())
    d_v = (err / len(obs)).reshape(-1, 1)
    return loss, net.backward(cache, {"v": d_v})


def entropy_term(net: MLP, spec: ActionSpec, obs: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """Mean policy entropy over the batch and its gradients."""
    pi, _, cache = policy_dist(net, spec, obs)
    n = len(obs)
    if spec.kind == "discrete":
        value = dists.categorical_entropy(pi).mean()
        grads = net.backward(cache, {"pi": dists.d_categorical_entropy(pi) / n})
    else:
        raw = net.extras["log_std"]
        log_std, mask = dists.clamped_log_std(raw)
        value = dists.gaussian_entropy(log_std, n).mean()
        grads = net.zero_grads()
        grads[net.extra_index("log_std")] += mask  # dH/dlog_std = 1 per dim
    return _check_finite("entropy", value), grads


def policy_loss(
    net: MLP,
    spec: ActionSpec,
    obs: np.ndarray,
    actions: np.ndarray,
    advantages: np.ndarray,
    value_targets: np.ndarray,
    alpha: float,
    expert_obs: Optional[np.ndarray],
    expert_actions: Optional[np.ndarray],
    entropy_coef: float = 0.0,
    value_coef: float = 0.5,
    old_log_probs: Optional[np.ndarray] = None,
    ppo_clip: Optional[float] = None,
) -> Tuple[float, List[np.ndarray], Dict[str, float]]:
    """Combined update: alpha * L_BC + (1 - alpha) * L_PG + value and entropy terms.

    The rollout terms share one forward/backward pass; the cloning term
    runs on its own expert batch.  Returns (total, grads, component values).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    pi, v, cache = policy_dist(net, spec, obs)
    n = len(obs)

    # policy-gradient part
    if spec.kind == "discrete":
        logp = dists.categorical_log_prob(pi, actions)
    else:
        raw = net.extras["log_std"]
        log_std, log_std_mask = dists.clamped_log_std(raw)
        logp = dists.gaussian_log_prob(pi, log_std, actions)
    if ppo_clip is None:
        pg_value = -(logp * advantages).mean()
        logp_weights = -(1.0 - alpha) * advantages / n
    else:
        ratio = np.exp(logp - old_log_probs)
        clipped = np.clip(ratio, 1.0 - ppo_clip, 1.0 + ppo_clip)
        pg_value = -np.minimum(ratio * advantages, clipped * advantages).mean()
        active = (ratio * advantages <= clipped * advantages).astype(np.float64)
        logp_weights = -(1.0 - alpha) * active * ratio * advantages / n

    # value regression
    v_err = v - value_targets
    value_value = 0.5 * (v_err**2).mean()
    d_v = (value_coef * v_err / n).reshape(-1, 1)

    # entropy bonus (subtracted from the total)
    d_pi_entropy = 0.0
    d_log_std_entropy = 0.0
    if spec.kind == "discrete":
        entropy_value = dists.categorical_entropy(pi).mean()
        if entropy_coef != 0.0:
            d_pi_entropy = -entropy_coef * dists.d_categorical_entropy(pi) / n
    else:
        entropy_value = dists.gaussian_entropy(log_std, n).mean()
        if entropy_coef != 0.0:
            d_log_std_entropy = -entropy_coef * log_std_mask

    if spec.kind == "discrete":
        d_pi = dists.d_categorical_log_prob(pi, actions, logp_weights)
        if entropy_coef != 0.0:
            d_pi = d_pi + d_pi_entropy
        grads = net.backward(cache, {"pi": d_pi, "v": d_v})
    else:
        d_mean, d_log_std = dists.d_gaussian_log_prob(pi, log_std, actions, logp_weights)
        grads = net.backward(cache, {"pi": d_mean, "v": d_v})
        idx = net.extra_index("log_std")
        grads[idx] += d_log_std * log_std_mask
        if entropy_coef != 0.0:
            grads[idx] += d_log_std_entropy

    # cloning term on the expert batch
    bc_value = 0.0
    if alpha > 0.0:
        if expert_obs is None or len(expert_obs) == 0:
            raise ValueError("alpha > 0 requires a nonempty expert batch")
        bc_value, bc_grads = bc_loss(net, spec, expert_obs, expert_actions)
        grads = _add_grads(grads, _scale_grads(bc_grads, alpha))

    total = (
        alpha * bc_value
        + (1.0 - alpha) * pg_value
        + value_coef * value_value
        - entropy_coef * entropy_value
    )
    total = _check_finite("policy_loss", total)
    parts = {
        "bc": float(bc_value),
        "pg": float(pg_value),
        "value": float(value_value),
        "entropy": float(entropy_value),
    }
    return total, grads, parts


# -- discriminator ------------------------------------------------------------


def encode_actions(actions: np.ndarray, spec: ActionSpec) -> np.ndarray:
    """Action encoding used for discriminator input: one-hot or raw vector."""
    if spec.kind == "discrete":
        onehot = np.zeros((len(actions), spec.n))
        onehot[np.arange(len(actions)), np.asarray(actions, dtype=np.int64)] = 1.0
        return onehot
    return np.asarray(actions, dtype=np.float64).reshape(len(actions), spec.dim)


def disc_inputs(obs: np.ndarray, actions: np.ndarray, spec: ActionSpec) -> np.ndarray:
    return np.concatenate([np.asarray(obs, dtype=np.float64), encode_actions(actions, spec)], axis=1)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def disc_loss(
    net: MLP,
    expert_inputs: np.ndarray,
    policy_inputs: np.ndarray,
    mode: DiscMode,
) -> Tuple[float, List[np.ndarray]]:
    """GAN cross-entropy or WGAN critic loss over (obs, action) batches.

    GAN:  -E_expert[log D] - E_policy[log(1 - D)], D = sigmoid(f).
    WGAN: E_policy[f] - E_expert[f]; weight clipping is applied by the
    caller after the optimizer step.
    """
    if len(expert_inputs) == 0 or len(policy_inputs) == 0:
        raise ValueError("discriminator loss needs nonempty batches")
    outs_e, cache_e = net.forward(expert_inputs)
    outs_p, cache_p = net.forward(policy_inputs)
    f_e = outs_e["f"][:, 0]
    f_p = outs_p["f"][:, 0]
    n_e, n_p = len(f_e), len(f_p)

    if mode.variant == "gan":
        loss = _softplus(-f_e).mean() + _softplus(f_p).mean()
        d_f_e = ((_sigmoid(f_e) - 1.0) / n_e).reshape(-1, 1)
        d_f_p = (_sigmoid(f_p) / n_p).reshape(-1, 1)
    else:
        loss = f_p.mean() - f_e.mean()
        d_f_e = np.full((n_e, 1), -1.0 / n_e)
        d_f_p = np.full((n_p, 1), 1.0 / n_p)

    loss = _check_finite("disc_loss", loss)
    grads = _add_grads(net.backward(cache_e, {"f": d_f_e}), net.backward(cache_p, {"f": d_f_p}))
    return loss, grads


def surrogate_reward(net: MLP, obs: np.ndarray, actions: np.ndarray, spec: ActionSpec, mode: DiscMode) -> np.ndarray:
    """Per-step reward the policy maximizes, derived from the discriminator.

    GAN: -log(1 - D(s, a)) = softplus(f), clipped for stability (always
    >= 0).  WGAN: the raw critic value, sign-unconstrained.
    """
    outs, _ = net.forward(disc_inputs(obs, actions, spec))
    f = outs["f"][:, 0]
    if mode.variant == "gan":
        return np.minimum(_softplus(f), SURROGATE_REWARD_MAX)
    return f
