"""Group-relative advantages, the k3 KL estimator and the clipped RFT objective.

Everything here works on sequence-level log-probabilities. :class:`ToyPolicy`
is a small explicit-parameter policy used to check the objective and its
gradient numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HyperParams:
    epsilon: float = 0.2
    beta: float = 0.02

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")


def advantages(rewards) -> np.ndarray:
    """(r - mean) / population std; all zeros when every reward is equal."""
    r = np.asarray(rewards, dtype=np.float64)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("advantages need a group of at least 2 rewards")
    centered = r - r.mean()
    std = np.sqrt(np.mean(centered * centered))
    if std == 0 or np.all(r == r[0]):
        return np.zeros_like(r)
    return centered / std


def kl_estimate(logp_ref, logp_cur):
    """k3 estimator x - log x - 1 with x = pi_ref / pi_cur, from log-probs.

    Evaluated as ``expm1(d) - d`` (``d = logp_ref - logp_cur``), switching
    to the Taylor series near zero so the result stays strictly positive
    for every ``d != 0`` that does not underflow.
    """
    d = np.asarray(logp_ref, dtype=np.float64) - np.asarray(logp_cur, dtype=np.float64)
    with np.errstate(over="ignore"):
        big = np.expm1(d) - d
    small = d * d * (0.5 + d * (1.0 / 6 + d * (1.0 / 24 + d / 120)))
    out = np.where(np.abs(d) < 1e-3, small, big)
    return float(out) if out.ndim == 0 else out


def _as_arrays(*xs):
    arrs = [np.asarray(x, dtype=np.float64) for x in xs]
    if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
        raise ValueError("log-prob and advantage vectors must be 1-D and of equal length")
    return arrs


@dataclass
class SequenceLogProbs:
    """Per-candidate sequence log-probabilities under the three policies."""

    cur: np.ndarray
    old: np.ndarray
    ref: np.ndarray

    def __post_init__(self):
        self.cur, self.old, self.ref = _as_arrays(self.cur, self.old, self.ref)
        if not (np.isfinite(self.cur).all() and np.isfinite(self.old).all() and np.isfinite(self.ref).all()):
            raise ValueError("log-probabilities must be finite")


def surrogate_terms(seq: SequenceLogProbs, adv, hp: HyperParams = HyperParams()) -> dict:
    """Per-candidate pieces of the objective (ratio, clipped surrogate, KL)."""
    (adv,) = _as_arrays(adv)
    if adv.shape != seq.cur.shape:
        raise ValueError("advantages and log-probs differ in length")
    ratio = np.exp(seq.cur - seq.old)
    clipped = np.clip(ratio, 1 - hp.epsilon, 1 + hp.epsilon)
    surrogate = np.minimum(ratio * adv, clipped * adv)
    kl = np.asarray(kl_estimate(seq.ref, seq.cur), dtype=np.float64).reshape(adv.shape)
    return {"ratio": ratio, "surrogate": surrogate, "kl": kl, "per_candidate": surrogate - hp.beta * kl}


def rft_objective(seq: SequenceLogProbs, adv, hp: HyperParams = HyperParams()) -> float:
    """Group mean of min(rho A, clip(rho) A) - beta * KL, rho = exp(cur - old)."""
    return float(np.mean(surrogate_terms(seq, adv, hp)["per_candidate"]))


def batch_objective(groups, hp: HyperParams = HyperParams()) -> float:
    """Mean over groups of each group's :func:`rft_objective`.

    ``groups`` is an iterable of ``(SequenceLogProbs, advantages)`` pairs.
    """
    values = [rft_objective(seq, adv, hp) for seq, adv in groups]
    if not values:
        raise ValueError("empty batch")
    return float(np.mean(values))


def sft_nll(logp_targets) -> float:
    """Negative log-likelihood summed over target responses."""
    return float(-np.sum(np.asarray(logp_targets, dtype=np.float64)))


def diagnostics(seq: SequenceLogProbs, adv, hp: HyperParams = HyperParams()) -> dict:
    t = surrogate_terms(seq, adv, hp)
    eps = hp.epsilon
    return {
        "objective": float(np.mean(t["per_candidate"])),
        "mean_kl": float(np.mean(t["kl"])),
        "mean_ratio": float(np.mean(t["ratio"])),
        "clip_fraction": float(np.mean((t["ratio"] < 1 - eps) | (t["ratio"] > 1 + eps))),
        "advantages": [float(a) for a in np.asarray(adv)],
    }


def load_reward_groups(path) -> list[dict]:
    """Read reward-group JSON Lines (as written by the harness) into dicts.

    Advantages are recomputed from the stored rewards when absent.
    """
    groups = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            g = json.loads(line)
            if "rewards" not in g:
                g["rewards"] = [o["combined_reward"] for o in g["outcomes"]]
            if not g.get("advantages"):
                g["advantages"] = advantages(g["rewards"]).tolist()
            groups.append(g)
    return groups


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


class ToyPolicy:
    """Context-free categorical policy over ``length`` positions and ``vocab`` tokens.

    ``logits`` has shape ``(length, vocab)``; a sequence's log-probability
    is the sum of per-position token log-probabilities.
    """

    def __init__(self, logits):
        self.logits = np.array(logits, dtype=np.float64)
        if self.logits.ndim != 2:
            raise ValueError("logits must have shape (length, vocab)")

    @classmethod
    def uniform(cls, length: int, vocab: int) -> "ToyPolicy":
        return cls(np.zeros((length, vocab)))

    @classmethod
    def random(cls, length: int, vocab: int, rng: np.random.Generator, scale: float = 1.0) -> "ToyPolicy":
        return cls(rng.normal(0.0, scale, size=(length, vocab)))

    @property
    def shape(self):
        return self.logits.shape

    def probs(self) -> np.ndarray:
        return np.exp(_log_softmax(self.logits))

    def sequence_logprob(self, tokens) -> np.ndarray:
        """Log-probability of each row of ``tokens`` (shape ``(n, length)``)."""
        tokens = np.atleast_2d(np.asarray(tokens))
        logp = _log_softmax(self.logits)
        return logp[np.arange(logp.shape[0]), tokens].sum(axis=1)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        p = self.probs()
        out = np.empty((n, p.shape[0]), dtype=np.int64)
        for t in range(p.shape[0]):
            out[:, t] = rng.choice(p.shape[1], size=n, p=p[t])
        return out

    def score_gradient(self, tokens) -> np.ndarray:
        """d log pi(o) / d logits for each sequence, shape ``(n, length, vocab)``."""
        tokens = np.atleast_2d(np.asarray(tokens))
        n, length = tokens.shape
        g = np.broadcast_to(-self.probs(), (n, *self.shape)).copy()
        g[np.arange(n)[:, None], np.arange(length)[None, :], tokens] += 1.0
        return g


@dataclass
class Batch:
    """A sampled group with frozen old / reference log-probs and advantages."""

    tokens: np.ndarray
    logp_old: np.ndarray
    logp_ref: np.ndarray
    advantages: np.ndarray


def objective(policy: ToyPolicy, batch: Batch, hp: HyperParams = HyperParams()) -> float:
    seq = SequenceLogProbs(policy.sequence_logprob(batch.tokens), batch.logp_old, batch.logp_ref)
    return rft_objective(seq, batch.advantages, hp)


def objective_gradient(policy: ToyPolicy, batch: Batch, hp: HyperParams = HyperParams()) -> np.ndarray:
    """Analytic gradient of :func:`objective` with respect to ``policy.logits``.

    Old and reference log-probs are constants. A candidate whose clipped
    branch is the active minimum contributes no surrogate gradient.
    """
    cur = policy.sequence_logprob(batch.tokens)
    adv = np.asarray(batch.advantages, dtype=np.float64)
    ratio = np.exp(cur - batch.logp_old)
    eps = hp.epsilon
    clipped_active = ((adv > 0) & (ratio > 1 + eps)) | ((adv < 0) & (ratio < 1 - eps))
    d_surrogate = np.where(clipped_active, 0.0, adv * ratio)
    # d/dcur of (e^d - d - 1), d = ref - cur
    d_kl = 1.0 - np.exp(batch.logp_ref - cur)
    coef = (d_surrogate - hp.beta * d_kl) / len(cur)
    return np.tensordot(coef, policy.score_gradient(batch.tokens), axes=1)


def finite_difference_gradient(policy: ToyPolicy, batch: Batch, hp: HyperParams = HyperParams(), h: float = 1e-5) -> np.ndarray:
    """Central differences of :func:`objective`, one logit at a time."""
    grad = np.zeros(policy.shape)
    for idx in np.ndindex(*policy.shape):
        up = ToyPolicy(policy.logits)
        up.logits[idx] += h
        down = ToyPolicy(policy.logits)
        down.logits[idx] -= h
        grad[idx] = (objective(up, batch, hp) - objective(down, batch, hp)) / (2 * h)
    return grad
