"""Adam optimizer with bias-corrected moment estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    """First/second moment estimates for one parameter tensor."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def like(cls, param: np.ndarray) -> "AdamState":
        return cls(m=np.zeros_like(param), v=np.zeros_like(param))


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One in-place update: param -= lr * m_hat / (sqrt(v_hat) + eps)."""
    if param.shape != grad.shape:
        raise ValueError(f"parameter {param.shape} and gradient {grad.shape} disagree")
    state.step += 1
    state.m[...] = beta1 * state.m + (1.0 - beta1) * grad
    state.v[...] = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = state.m / (1.0 - beta1**state.step)
    v_hat = state.v / (1.0 - beta2**state.step)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)


@dataclass
class Adam:
    """Optimizer over an ordered parameter list (one state per tensor)."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    states: list[AdamState] = field(default_factory=list)

    def step(self, params_and_grads: list[tuple[str, np.ndarray, np.ndarray]]) -> None:
        if not self.states:
            self.states = [AdamState.like(value) for _, value, _ in params_and_grads]
        if len(self.states) != len(params_and_grads):
            raise ValueError("optimizer state does not match the parameter list")
        for state, (_, value, grad) in zip(self.states, params_and_grads):
            adam_step(value, grad, state, self.lr, self.beta1, self.beta2, self.eps)
