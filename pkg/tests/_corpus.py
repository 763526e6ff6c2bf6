"""Random smooth rational functions for the derivative self-test."""

import numpy as np

from tanlift import expr


def random_expression(rng, n):
    """A polynomial over a strictly positive polynomial, in x1..xn."""

    def poly(deg):
        terms = [f"({rng.uniform(-1, 1):.6f})"]
        for _ in range(rng.integers(2, 5)):
            mono = "*".join(f"x{rng.integers(1, n + 1)}" for _ in range(rng.integers(1, deg + 1)))
            terms.append(f"({rng.uniform(-1, 1):.6f})*{mono}")
        return " + ".join(terms)

    num = poly(3)
    squares = " + ".join(f"({rng.uniform(0.1, 1):.6f})*x{k}**2" for k in range(1, n + 1))
    den = f"(1 + {squares})"
    if rng.random() < 0.3:
        return f"({num}) / {den}**2"
    return f"({num}) / {den}"


def corpus(count=100, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        out.append((random_expression(rng, n), rng.uniform(-1, 1, n)))
    return out


def fd_gradient(f, x, h=1e-5):
    g = np.zeros(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_hessian(f, x, h=1e-4):
    m = x.size
    H = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            ei = np.zeros(m)
            ej = np.zeros(m)
            ei[i] = h
            ej[j] = h
            H[i, j] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
    return H


def plain(source):
    return lambda x: float(expr.evaluate(source, x))


def max_relative_error(source, x):
    """Largest relative gap between jet and finite-difference derivatives."""
    from tanlift import jets

    j = jets.eval_jet(lambda v: expr.evaluate(source, v), x)
    f = plain(source)
    g_fd, h_fd = fd_gradient(f, x), fd_hessian(f, x)
    scale_g = max(1.0, float(np.abs(g_fd).max()))
    scale_h = max(1.0, float(np.abs(h_fd).max()))
    return max(
        float(np.abs(j.grad - g_fd).max()) / scale_g,
        float(np.abs(j.hess - h_fd).max()) / scale_h,
    )
