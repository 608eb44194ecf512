"""Shared test helpers: finite-difference gradient oracle."""

import numpy as np

from annealed_il.nets import MLP, get_flat, set_flat


def numerical_grad(f, net: MLP, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function of the net params."""
    flat = get_flat(net).copy()
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        flat[i] += h
        set_flat(net, flat)
        up = f()
        flat[i] -= 2 * h
        set_flat(net, flat)
        down = f()
        flat[i] += h
        grad[i] = (up - down) / (2 * h)
    set_flat(net, flat)
    return grad


def flatten_grads(grads) -> np.ndarray:
    return np.concatenate([g.ravel() for g in grads])


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / denom)
