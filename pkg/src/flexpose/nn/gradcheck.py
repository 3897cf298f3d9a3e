"""Central finite-difference gradient checking for the autodiff stack."""

import numpy as np


def numeric_grad(loss_fn, tensor, eps=1e-5):
    """Central finite differences of a scalar loss w.r.t. one tensor.

    loss_fn rebuilds the graph from current .data values and returns a
    scalar Tensor; the tensor's data is perturbed in place and restored.
    """
    flat = tensor.data.reshape(-1)
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        up = loss_fn().item()
        flat[i] = orig - eps
        down = loss_fn().item()
        flat[i] = orig
        grad[i] = (up - down) / (2.0 * eps)
    return grad.reshape(tensor.data.shape)


def max_rel_error(analytic, numeric, floor=1e-6):
    """Worst-case relative disagreement, with a floor so near-zero pairs
    compare on an absolute scale."""
    num = np.abs(analytic - numeric)
    den = np.maximum(np.abs(analytic) + np.abs(numeric), floor)
    return float((num / den).max())


def check_gradients(loss_fn, named_tensors, eps=1e-5, floor=1e-6):
    """Run loss_fn once analytically, then compare every tensor's gradient
    against central differences. Returns {name: max relative error}."""
    loss = loss_fn()
    for _, t in named_tensors:
        t.grad = None
    loss.backward()
    out = {}
    for name, t in named_tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        numeric = numeric_grad(loss_fn, t, eps=eps)
        out[name] = max_rel_error(analytic, numeric, floor=floor)
    return out
