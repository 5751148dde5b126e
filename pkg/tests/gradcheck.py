"""Finite-difference helpers shared by the gradient tests."""

import numpy as np

from semiactive import nn


def kink_free_input(net, rng):
    """Draw an input whose hidden pre-activations stay clear of the ReLU kinks."""
    for _ in range(1000):
        x = rng.normal(size=net.layer_dims[0])
        pre = []
        z = x[None, :]
        for w, b in zip(net.weights[:-1], net.biases[:-1]):
            z = z @ w.T + b
            pre.append(z.ravel())
            z = np.maximum(z, 0)
        if not pre or np.min(np.abs(np.concatenate(pre))) > 1e-3:
            return x
    raise RuntimeError("no kink-free input found")


def numeric_grads(net, x, g, h=1e-5):
    out = []
    for p in net.params():
        num = np.zeros_like(p)
        flat, nflat = p.reshape(-1), num.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            fp = float(np.sum(nn.forward(net, x) * g))
            flat[i] = old - h
            fm = float(np.sum(nn.forward(net, x) * g))
            flat[i] = old
            nflat[i] = (fp - fm) / (2 * h)
        out.append(num)
    return out


def rel_err(a, b, floor=1e-6):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
