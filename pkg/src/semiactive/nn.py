"""Small fully connected networks with hand-written backprop and Adam.

Everything is float64 numpy. Inputs may be a single vector ``(n_in,)`` or a
batch ``(batch, n_in)``; outputs follow the same convention. Weight matrices
are stored ``(n_out, n_in)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit

ACTIVATIONS = ("linear", "tanh_range")


@dataclass
class Mlp:
    """ReLU network with a linear or range-bounded tanh output.

    With ``output_activation="tanh_range"`` the output is
    ``low + (high - low) * (tanh(z) + 1) / 2``.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    output_activation: str = "linear"
    out_low: float = -1.0
    out_high: float = 1.0

    def __post_init__(self):
        if self.output_activation not in ACTIVATIONS:
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} disagree")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f"layer {i} expects {w.shape[1]} inputs, previous layer gives "
                                 f"{self.weights[i - 1].shape[0]}")

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def params(self) -> list[np.ndarray]:
        """Parameter arrays in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "Mlp":
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                   self.output_activation, self.out_low, self.out_high)

    def __call__(self, x):
        return forward(self, x)


@dataclass
class GradientSet:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0

    @classmethod
    def for_net(cls, net: Mlp, **kwargs) -> "AdamState":
        return cls([np.zeros_like(p) for p in net.params()],
                   [np.zeros_like(p) for p in net.params()], **kwargs)


def init_mlp(layer_dims, rng: np.random.Generator, output_activation="linear",
             out_low=-1.0, out_high=1.0, final_scale=3e-3) -> Mlp:
    """Fan-in uniform hidden layers, final layer uniform in ``±final_scale``."""
    weights, biases = [], []
    n_layers = len(layer_dims) - 1
    for i in range(n_layers):
        n_in, n_out = layer_dims[i], layer_dims[i + 1]
        bound = final_scale if i == n_layers - 1 else 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    return Mlp(weights, biases, output_activation, out_low, out_high)


def _as_batch(net: Mlp, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.layer_dims[0]:
        raise ValueError(f"input shape {x.shape} does not match network input width {net.layer_dims[0]}")
    return x, single


def _forward_cache(net: Mlp, x: np.ndarray):
    """Return (layer activations, output); ``acts[-1]`` is the pre-output-activation value."""
    acts = [x]
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w.T + b
        if i < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    z = acts[-1]
    if net.output_activation == "tanh_range":
        half = 0.5 * (net.out_high - net.out_low)
        out = net.out_low + half * (np.tanh(z) + 1.0)
    else:
        out = z
    return acts, out


def forward(net: Mlp, x) -> np.ndarray:
    x, single = _as_batch(net, x)
    _, out = _forward_cache(net, x)
    return out[0] if single else out


def forward_cached(net: Mlp, x) -> tuple[np.ndarray, list]:
    """Batched forward pass that also returns the activations for :func:`backward`."""
    x, _ = _as_batch(net, x)
    acts, out = _forward_cache(net, x)
    return out, acts


def backward(net: Mlp, x, output_grad, cache=None, param_grads=True) -> tuple[GradientSet | None, np.ndarray]:
    """Gradients of ``sum(output * output_grad)`` w.r.t. parameters and input.

    For a batch the parameter gradients are summed over the batch; the input
    gradient keeps the batch axis. ``cache`` is the activation list from
    :func:`forward_cached` on the same ``x``. With ``param_grads=False`` only
    the input gradient is computed and ``None`` is returned in its place.
    """
    x, single = _as_batch(net, x)
    g = np.asarray(output_grad, dtype=np.float64)
    if single:
        g = g[None, :]
    if g.shape != (x.shape[0], net.layer_dims[-1]):
        raise ValueError(f"output_grad shape {g.shape} does not match output {(x.shape[0], net.layer_dims[-1])}")
    acts = cache if cache is not None else _forward_cache(net, x)[0]
    if net.output_activation == "tanh_range":
        half = 0.5 * (net.out_high - net.out_low)
        g = g * half * (1.0 - np.tanh(acts[-1]) ** 2)
    n = len(net.weights)
    gw = [None] * n
    gb = [None] * n
    for i in range(n - 1, -1, -1):
        if param_grads:
            gw[i] = g.T @ acts[i]
            gb[i] = g.sum(axis=0)
        g = g @ net.weights[i]
        if i > 0:
            g = g * (acts[i] > 0.0)
    grads = GradientSet(gw, gb) if param_grads else None
    return grads, (g[0] if single else g)


def adam_step(net: Mlp, grads: GradientSet, opt: AdamState, lr: float,
              direction: str = "descent") -> tuple[Mlp, AdamState]:
    """One bias-corrected Adam update, applied in place.

    ``direction="ascent"`` climbs the gradient instead of descending it.
    """
    if not lr > 0:
        raise ValueError("lr must be > 0")
    if direction not in ("descent", "ascent"):
        raise ValueError(f"direction must be 'descent' or 'ascent', got {direction!r}")
    params = net.params()
    gparams = grads.params()
    if len(gparams) != len(params) or any(p.shape != g.shape for p, g in zip(params, gparams)):
        raise ValueError("gradient shapes do not match network parameters")
    sign = -1.0 if direction == "ascent" else 1.0
    opt.step += 1
    c1 = 1.0 - opt.beta1 ** opt.step
    c2 = 1.0 - opt.beta2 ** opt.step
    for p, g, m, v in zip(params, gparams, opt.m, opt.v):
        _adam_kernel(p.reshape(-1), np.ascontiguousarray(g).reshape(-1), m.reshape(-1), v.reshape(-1),
                     sign, lr, opt.beta1, opt.beta2, opt.eps, c1, c2)
    return net, opt


def _adam_numpy(p, g, m, v, sign, lr, beta1, beta2, eps, c1, c2):
    gs = sign * g
    m[:] = beta1 * m + (1.0 - beta1) * gs
    v[:] = beta2 * v + (1.0 - beta2) * gs * gs
    p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


@njit
def _adam_loop(p, g, m, v, sign, lr, beta1, beta2, eps, c1, c2):
    # same arithmetic as _adam_numpy; the loop avoids temporaries under numba
    for i in range(p.size):
        gi = sign * g[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi
        p[i] -= lr * (m[i] / c1) / (np.sqrt(v[i] / c2) + eps)


def _blend_numpy(target, source, tau):
    target[:] = tau * source + (1.0 - tau) * target


@njit
def _blend_loop(target, source, tau):
    for i in range(target.size):
        target[i] = tau * source[i] + (1.0 - tau) * target[i]


_adam_kernel = _adam_loop if USE_NUMBA else _adam_numpy
_blend_kernel = _blend_loop if USE_NUMBA else _blend_numpy


def soft_update(target: Mlp, source: Mlp, tau: float) -> None:
    """``target <- tau*source + (1 - tau)*target`` elementwise, in place."""
    for pt, ps in zip(target.params(), source.params()):
        _blend_kernel(pt.reshape(-1), ps.reshape(-1), float(tau))


def net_to_dict(net: Mlp) -> dict:
    return {
        "layer_dims": net.layer_dims,
        "output_activation": net.output_activation,
        "out_low": net.out_low,
        "out_high": net.out_high,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def net_from_dict(d: dict) -> Mlp:
    net = Mlp([np.array(w, dtype=np.float64).reshape(o, i) for w, i, o in
               zip(d["weights"], d["layer_dims"][:-1], d["layer_dims"][1:])],
              [np.array(b, dtype=np.float64) for b in d["biases"]],
              d["output_activation"], d["out_low"], d["out_high"])
    if net.layer_dims != list(d["layer_dims"]):
        raise ValueError("layer_dims do not match stored weights")
    return net


def adam_to_dict(opt: AdamState) -> dict:
    return {"beta1": opt.beta1, "beta2": opt.beta2, "eps": opt.eps, "step": opt.step,
            "m": [a.tolist() for a in opt.m], "v": [a.tolist() for a in opt.v]}


def adam_from_dict(d: dict, net: Mlp) -> AdamState:
    shapes = [p.shape for p in net.params()]
    return AdamState([np.array(a, dtype=np.float64).reshape(s) for a, s in zip(d["m"], shapes)],
                     [np.array(a, dtype=np.float64).reshape(s) for a, s in zip(d["v"], shapes)],
                     d["beta1"], d["beta2"], d["eps"], int(d["step"]))
