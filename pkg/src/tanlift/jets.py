"""Second-order forward-mode jets over arrays.

A :class:`Jet2` carries an array of values together with the gradient and
Hessian of every entry with respect to a fixed set of ``m`` active
variables.  Leading dimensions belong to the value array; the trailing one
(gradient) or two (Hessian) dimensions index the active variables::

    value: S        grad: S + (m,)        hess: S + (m, m)

A jet whose ``hess`` is ``None`` is first-order only.  That happens when a
derivative is taken out of a jet (:meth:`Jet2.partial`): the result knows its
own gradient but not its Hessian, and anything computed from it stays
first-order.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "Jet2",
    "lift_vars",
    "eval_jet",
    "constant",
    "sqrt",
    "exp",
    "log",
    "sin",
    "cos",
    "einsum",
    "stack",
    "concatenate",
    "inv",
]


class DomainError(ArithmeticError):
    """Raised when a primitive is evaluated outside its domain."""

    def __init__(self, primitive: str, detail: str = ""):
        self.primitive = primitive
        msg = f"{primitive}: argument outside domain"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


class Jet2:
    """Array of scalars with exact first and (optionally) second derivatives."""

    __slots__ = ("value", "grad", "hess")
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, value, grad, hess=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = None if hess is None else np.asarray(hess, dtype=float)

    # -- bookkeeping -------------------------------------------------------
    @property
    def nvars(self) -> int:
        return self.grad.shape[-1]

    @property
    def shape(self) -> tuple:
        return self.value.shape

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    def __len__(self) -> int:
        return len(self.value)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def __getitem__(self, idx) -> "Jet2":
        if idx is Ellipsis or (isinstance(idx, tuple) and Ellipsis in idx):
            raise IndexError("Ellipsis indexing is ambiguous on jets")
        hess = None if self.hess is None else self.hess[idx]
        return Jet2(self.value[idx], self.grad[idx], hess)

    def __repr__(self) -> str:
        return f"Jet2(shape={self.shape}, nvars={self.nvars}, order={self.order})"

    def truncate(self) -> "Jet2":
        """Drop the Hessian."""
        return Jet2(self.value, self.grad)

    def partial(self, var: int) -> "Jet2":
        """Jet of the partial derivative along active variable ``var``.

        Needs the Hessian; the returned jet is first-order.
        """
        if self.hess is None:
            raise ValueError("partial() needs a second-order jet")
        return Jet2(self.grad[..., var], self.hess[..., var, :])

    def reshape(self, *shape) -> "Jet2":
        m = self.nvars
        hess = None if self.hess is None else self.hess.reshape(*shape, m, m)
        return Jet2(self.value.reshape(*shape), self.grad.reshape(*shape, m), hess)

    @property
    def T(self) -> "Jet2":
        return self.swapaxes(-1, -2) if self.value.ndim >= 2 else self

    def transpose(self, *axes) -> "Jet2":
        nd = self.value.ndim
        axes = tuple(axes[0]) if len(axes) == 1 and not isinstance(axes[0], int) else axes
        ga = axes + (nd,)
        hess = None if self.hess is None else self.hess.transpose(axes + (nd, nd + 1))
        return Jet2(self.value.transpose(axes), self.grad.transpose(ga), hess)

    def swapaxes(self, a: int, b: int) -> "Jet2":
        nd = self.value.ndim
        a, b = a % nd, b % nd
        hess = None if self.hess is None else np.swapaxes(self.hess, a, b)
        return Jet2(np.swapaxes(self.value, a, b), np.swapaxes(self.grad, a, b), hess)

    def sum(self, axis=None) -> "Jet2":
        nd = self.value.ndim
        if axis is None:
            axis = tuple(range(nd))
        elif isinstance(axis, int):
            axis = (axis % nd,)
        else:
            axis = tuple(a % nd for a in axis)
        hess = None if self.hess is None else self.hess.sum(axis=axis)
        return Jet2(self.value.sum(axis=axis), self.grad.sum(axis=axis), hess)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.nvars != self.nvars:
                raise ValueError("jets over different variable sets")
            return other
        return constant(other, self.nvars, order=self.order)

    def __add__(self, other):
        if not isinstance(other, Jet2) and np.ndim(other) == 0:
            return Jet2(self.value + other, self.grad, self.hess)
        o = self._coerce(other)
        v = self.value + o.value
        g = self.grad + o.grad
        h = None if self.hess is None or o.hess is None else self.hess + o.hess
        return _bcast(v, g, h)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet2) and np.ndim(other) == 0:
            c = float(other)
            return Jet2(self.value * c, self.grad * c, None if self.hess is None else self.hess * c)
        o = self._coerce(other)
        a, b = self.value, o.value
        v = a * b
        g = a[..., None] * o.grad + b[..., None] * self.grad
        h = None
        if self.hess is not None and o.hess is not None:
            h = (
                a[..., None, None] * o.hess
                + b[..., None, None] * self.hess
                + _outer(self.grad, o.grad)
                + _outer(o.grad, self.grad)
            )
        return _bcast(v, g, h)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if np.any(self.value == 0.0):
            raise DomainError("division", "denominator is zero")
        r = 1.0 / self.value
        return _chain(self, r, -r * r, 2.0 * r**3)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, p):
        if isinstance(p, Jet2):
            return exp(log(self) * p)
        p = float(p)
        v = self.value
        if p == 0.0:
            return constant(np.ones_like(v), self.nvars, order=self.order)
        if p == 1.0:
            return self
        if not p.is_integer() and np.any(v <= 0.0):
            raise DomainError("power", f"non-integer exponent {p} of non-positive base")
        if p < 0 and np.any(v == 0.0):
            raise DomainError("power", "negative exponent of zero")
        return _chain(self, v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def __rpow__(self, base):
        if base <= 0:
            raise DomainError("power", "non-positive base with variable exponent")
        return exp(self * float(np.log(base)))


def _bcast(v, g, h) -> Jet2:
    # broadcasting may have inflated the value shape of one operand
    if g.shape[:-1] == v.shape and (h is None or h.shape[:-2] == v.shape):
        return Jet2(v, g, h)
    g = np.broadcast_to(g, v.shape + g.shape[-1:])
    if h is not None:
        h = np.broadcast_to(h, v.shape + h.shape[-2:])
    return Jet2(v, np.array(g), None if h is None else np.array(h))


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    g = f1[..., None] * a.grad
    h = None
    if a.hess is not None:
        h = f1[..., None, None] * a.hess + f2[..., None, None] * _outer(a.grad, a.grad)
    return Jet2(f0, g, h)


def constant(c, nvars: int, order: int = 2) -> Jet2:
    c = np.asarray(c, dtype=float)
    g = np.zeros(c.shape + (nvars,))
    h = np.zeros(c.shape + (nvars, nvars)) if order == 2 else None
    return Jet2(c, g, h)


def lift_vars(x) -> Jet2:
    """Seed the coordinates ``x`` as independent active variables."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise ValueError("lift_vars expects a vector")
    m = x.size
    return Jet2(x.copy(), np.eye(m), np.zeros((m, m, m)))


def eval_jet(f: Callable[[Jet2], Jet2], x) -> Jet2:
    """Evaluate ``f`` on seeded coordinates; returns value, gradient, Hessian."""
    out = f(lift_vars(x))
    if not isinstance(out, Jet2):
        out = constant(out, np.atleast_1d(x).size)
    return out


# -- elementary functions ----------------------------------------------------

def sqrt(a):
    if not isinstance(a, Jet2):
        return np.sqrt(a)
    if np.any(a.value <= 0.0):
        raise DomainError("sqrt", "argument must be positive")
    s = np.sqrt(a.value)
    return _chain(a, s, 0.5 / s, -0.25 / (s * a.value))


def exp(a):
    if not isinstance(a, Jet2):
        return np.exp(a)
    e = np.exp(a.value)
    return _chain(a, e, e, e)


def log(a):
    if not isinstance(a, Jet2):
        return np.log(a)
    if np.any(a.value <= 0.0):
        raise DomainError("log", "argument must be positive")
    r = 1.0 / a.value
    return _chain(a, np.log(a.value), r, -r * r)


def sin(a):
    if not isinstance(a, Jet2):
        return np.sin(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, s, c, -s)


def cos(a):
    if not isinstance(a, Jet2):
        return np.cos(a)
    s, c = np.sin(a.value), np.cos(a.value)
    return _chain(a, c, -s, -c)


# -- array operations --------------------------------------------------------

def stack(items: Sequence, axis: int = 0) -> Jet2:
    jets = [it for it in items if isinstance(it, Jet2)]
    if not jets:
        raise ValueError("stack needs at least one jet")
    m = jets[0].nvars
    order = min(j.order for j in jets)
    items = [it if isinstance(it, Jet2) else constant(it, m, order) for it in items]
    nd = items[0].value.ndim
    if axis < 0:
        axis += nd + 1
    v = np.stack([it.value for it in items], axis=axis)
    g = np.stack([it.grad for it in items], axis=axis)
    h = np.stack([it.hess for it in items], axis=axis) if order == 2 else None
    return Jet2(v, g, h)


def concatenate(items: Sequence, axis: int = 0) -> Jet2:
    jets = [it for it in items if isinstance(it, Jet2)]
    if not jets:
        raise ValueError("concatenate needs at least one jet")
    m = jets[0].nvars
    order = min(j.order for j in jets)
    items = [it if isinstance(it, Jet2) else constant(it, m, order) for it in items]
    nd = items[0].value.ndim
    axis %= nd
    v = np.concatenate([it.value for it in items], axis=axis)
    g = np.concatenate([it.grad for it in items], axis=axis)
    h = np.concatenate([it.hess for it in items], axis=axis) if order == 2 else None
    return Jet2(v, g, h)


def einsum(subscripts: str, a, b) -> Jet2:
    """Bilinear contraction of two operands, either of which may be a jet.

    ``subscripts`` uses explicit indices only (``"ij,jk->ik"``); the letters
    ``Y`` and ``Z`` are reserved for the derivative axes.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    if "Y" in subscripts or "Z" in subscripts or "." in subscripts:
        raise ValueError("reserved letter or ellipsis in subscripts")
    ja, jb = isinstance(a, Jet2), isinstance(b, Jet2)
    av = a.value if ja else np.asarray(a, dtype=float)
    bv = b.value if jb else np.asarray(b, dtype=float)
    v = np.einsum(f"{sa},{sb}->{out}", av, bv)
    m = (a if ja else b).nvars
    g = np.zeros(v.shape + (m,))
    if ja:
        g = g + np.einsum(f"{sa}Y,{sb}->{out}Y", a.grad, bv)
    if jb:
        g = g + np.einsum(f"{sa},{sb}Y->{out}Y", av, b.grad)
    second = (not ja or a.hess is not None) and (not jb or b.hess is not None)
    h = None
    if second:
        h = np.zeros(v.shape + (m, m))
        if ja:
            h = h + np.einsum(f"{sa}YZ,{sb}->{out}YZ", a.hess, bv)
        if jb:
            h = h + np.einsum(f"{sa},{sb}YZ->{out}YZ", av, b.hess)
        if ja and jb:
            cross = np.einsum(f"{sa}Y,{sb}Z->{out}YZ", a.grad, b.grad)
            h = h + cross + np.swapaxes(cross, -1, -2)
    return Jet2(v, g, h)


def inv(a: Jet2) -> Jet2:
    """Inverse of a square matrix jet (last two value axes)."""
    if a.value.ndim != 2 or a.value.shape[0] != a.value.shape[1]:
        raise ValueError("inv expects a square matrix jet")
    V = np.linalg.inv(a.value)
    # d(V) = -V dA V
    VdA = np.einsum("ij,jkY->ikY", V, a.grad)
    g = -np.einsum("ikY,kl->ilY", VdA, V)
    h = None
    if a.hess is not None:
        # d2 V = V dA_y V dA_z V + V dA_z V dA_y V - V d2A V
        t = np.einsum("ikY,klZ->ilYZ", VdA, VdA)
        t = np.einsum("ilYZ,lm->imYZ", t, V)
        h = t + np.swapaxes(t, -1, -2) - np.einsum(
            "ij,jkYZ,kl->ilYZ", V, a.hess, V, optimize=True
        )
    return Jet2(V, g, h)
