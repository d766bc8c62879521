"""Minimal reverse-mode differentiation core on numpy arrays.

Exactly the primitives the encoder, decoders and losses need, recorded on an
explicit tape and replayed once in reverse. Subgradient conventions: max-style
ops route gradient to the winning element only (ties: lowest index), relu'(0)=0,
sampling/gather gradients are linear scatter-adds. Forward values are checked
for NaN/Inf after every primitive; a violation aborts the step.

Two boundary-safe conventions matter for the loss terms (see the losses module):
`safe_arccos` clamps its forward input to [-1, 1] exactly (so the angle is 0 at
a perfectly aligned pair) and clamps only the derivative away from the poles;
`l2norm_rows` is exact in the forward pass and bounds the backward denominator.
"""

from __future__ import annotations

import struct
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .fileformat import Reader, finish_with_checksum, open_checked, pack_named_f32

CHECKPOINT_MAGIC = b"DTCK"
CHECKPOINT_VERSION = 1

_ARCCOS_EPS = 1e-7
_NORM_EPS = 1e-8


class ShapeMismatch(ValueError):
    pass


class NonFiniteError(FloatingPointError):
    pass


class GraphConsumed(RuntimeError):
    pass


class Tensor:
    """Dense array value; `grad` is populated by backward() for tracked tensors."""

    __slots__ = ("data", "grad", "track")

    def __init__(self, data, dtype=None, track: bool = False):
        self.data = np.asarray(data, dtype=dtype if dtype is not None else None)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float64)
        self.grad = None
        self.track = track

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, track={self.track})"


class Parameter(Tensor):
    """Named trainable tensor; gradients accumulate across backward passes."""

    __slots__ = ("name",)

    def __init__(self, name: str, data, dtype=None):
        super().__init__(data, dtype=dtype, track=True)
        self.name = name

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape}, dtype={self.data.dtype})"


class Tape:
    """Ordered record of executed primitives; backward replays it exactly once."""

    __slots__ = ("_nodes", "consumed")

    def __init__(self):
        self._nodes = []
        self.consumed = False

    def record(self, out: Tensor, pulls):
        # pulls: list of (input tensor, vjp callable) for tracked inputs only
        self._nodes.append((out, pulls))

    def __len__(self):
        return len(self._nodes)


_TAPE_STACK: list[Tape] = []


@contextmanager
def record():
    tape = Tape()
    _TAPE_STACK.append(tape)
    try:
        yield tape
    finally:
        _TAPE_STACK.pop()


def active_tape() -> Tape | None:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def backward(loss: Tensor, tape: Tape):
    """Accumulate d(loss)/d(input) into every tracked tensor reached by the tape."""
    if tape.consumed:
        raise GraphConsumed("backward already called on this record")
    tape.consumed = True
    if loss.data.shape not in ((), (1,)):
        raise ShapeMismatch(f"loss must be scalar, got shape {loss.data.shape}")
    loss.grad = np.ones_like(loss.data)
    for out, pulls in reversed(tape._nodes):
        g = out.grad
        if g is None:
            continue
        for inp, vjp in pulls:
            contrib = vjp(g)
            if inp.grad is None:
                inp.grad = contrib.astype(inp.data.dtype, copy=True)
            else:
                inp.grad += contrib
        if not isinstance(out, Parameter):
            out.grad = None  # free intermediate grads as soon as they are consumed


def _wrap(x, like: Tensor | None = None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    dtype = like.data.dtype if like is not None else None
    return Tensor(np.asarray(x, dtype=dtype))


def _result(data: np.ndarray, pulls) -> Tensor:
    if not np.isfinite(data).all():
        raise NonFiniteError("non-finite value in primitive output")
    tape = active_tape()
    out = Tensor(data)
    live = [(t, fn) for t, fn in pulls if t.track]
    if tape is not None and live:
        out.track = True
        tape.record(out, live)
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _check_same_dtype(*ts: Tensor):
    dts = {t.data.dtype for t in ts}
    if len(dts) > 1:
        raise ShapeMismatch(f"mixed dtypes {sorted(map(str, dts))}; cast explicitly")


# ---------------------------------------------------------------------------
# arithmetic


def add(a, b) -> Tensor:
    a = _wrap(a)
    b = _wrap(b, like=a)
    _check_same_dtype(a, b)
    data = a.data + b.data
    return _result(data, [(a, lambda g: _unbroadcast(g, a.data.shape)),
                          (b, lambda g: _unbroadcast(g, b.data.shape))])


def sub(a, b) -> Tensor:
    a = _wrap(a)
    b = _wrap(b, like=a)
    _check_same_dtype(a, b)
    data = a.data - b.data
    return _result(data, [(a, lambda g: _unbroadcast(g, a.data.shape)),
                          (b, lambda g: _unbroadcast(-g, b.data.shape))])


def mul(a, b) -> Tensor:
    a = _wrap(a)
    b = _wrap(b, like=a)
    _check_same_dtype(a, b)
    data = a.data * b.data
    return _result(data, [(a, lambda g: _unbroadcast(g * b.data, a.data.shape)),
                          (b, lambda g: _unbroadcast(g * a.data, b.data.shape))])


def scale(a, s: float) -> Tensor:
    a = _wrap(a)
    s = float(s)
    return _result(a.data * s, [(a, lambda g: g * s)])


def neg(a) -> Tensor:
    return scale(a, -1.0)


def matmul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    _check_same_dtype(a, b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatch(f"matmul {a.data.shape} @ {b.data.shape}")
    data = a.data @ b.data
    return _result(data, [(a, lambda g: g @ b.data.T),
                          (b, lambda g: a.data.T @ g)])


def concat(tensors, axis: int = -1) -> Tensor:
    ts = [_wrap(t) for t in tensors]
    _check_same_dtype(*ts)
    data = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.data.shape[axis] for t in ts]
    offsets = np.cumsum([0] + sizes)

    def make_pull(i):
        lo, hi = offsets[i], offsets[i + 1]

        def pull(g):
            index = [slice(None)] * g.ndim
            index[axis] = slice(lo, hi)
            return g[tuple(index)]

        return pull

    return _result(data, [(t, make_pull(i)) for i, t in enumerate(ts)])


def reshape(a, shape) -> Tensor:
    a = _wrap(a)
    data = a.data.reshape(shape)
    return _result(data, [(a, lambda g: g.reshape(a.data.shape))])


def sum_all(a) -> Tensor:
    a = _wrap(a)
    return _result(np.asarray(a.data.sum()), [(a, lambda g: np.broadcast_to(g, a.data.shape).copy())])


def sum_axis(a, axis: int) -> Tensor:
    a = _wrap(a)
    data = a.data.sum(axis=axis)
    return _result(data, [(a, lambda g: np.broadcast_to(np.expand_dims(g, axis), a.data.shape).copy())])


def abs_(a) -> Tensor:
    a = _wrap(a)
    return _result(np.abs(a.data), [(a, lambda g: g * np.sign(a.data))])


# ---------------------------------------------------------------------------
# nonlinearities


def relu(a) -> Tensor:
    a = _wrap(a)
    mask = a.data > 0
    return _result(np.where(mask, a.data, 0.0), [(a, lambda g: g * mask)])


def softplus(a) -> Tensor:
    a = _wrap(a)
    data = np.maximum(a.data, 0.0) + np.log1p(np.exp(-np.abs(a.data)))
    sig = 1.0 / (1.0 + np.exp(-a.data))
    return _result(data, [(a, lambda g: g * sig)])


def sigmoid(a) -> Tensor:
    a = _wrap(a)
    s = np.empty_like(a.data)
    pos = a.data >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-a.data[pos]))
    e = np.exp(a.data[~pos])
    s[~pos] = e / (1.0 + e)
    return _result(s, [(a, lambda g: g * s * (1.0 - s))])


def softmax_rows(a) -> Tensor:
    """Row-wise softmax over the last axis, max-subtracted for stability."""
    a = _wrap(a)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def pull(g):
        return s * (g - (g * s).sum(axis=-1, keepdims=True))

    return _result(s, [(a, pull)])


def safe_arccos(a) -> Tensor:
    """arccos with forward input clamped to [-1, 1] (exact 0 at 1) and the
    derivative evaluated at most (1 - 1e-7) from the poles (bounded gradient)."""
    a = _wrap(a)
    data = np.arccos(np.clip(a.data, -1.0, 1.0))
    safe = np.clip(a.data, -1.0 + _ARCCOS_EPS, 1.0 - _ARCCOS_EPS)
    return _result(data, [(a, lambda g: -g / np.sqrt(1.0 - safe * safe))])


def l2norm_rows(a) -> Tensor:
    """Euclidean norm of each row; exact forward, backward denominator bounded."""
    a = _wrap(a)
    if a.data.ndim != 2:
        raise ShapeMismatch(f"l2norm_rows expects (M, D), got {a.data.shape}")
    n = np.sqrt((a.data * a.data).sum(axis=1))
    denom = np.maximum(n, _NORM_EPS)
    return _result(n, [(a, lambda g: (g / denom)[:, None] * a.data)])


def normalize_rows(a) -> Tensor:
    """Row-wise v / (||v|| + 1e-8); finite for the zero vector."""
    a = _wrap(a)
    if a.data.ndim != 2:
        raise ShapeMismatch(f"normalize_rows expects (M, D), got {a.data.shape}")
    s = np.sqrt((a.data * a.data).sum(axis=1, keepdims=True))
    n = s + _NORM_EPS
    out = a.data / n

    def pull(g):
        s_safe = np.maximum(s, 1e-12)
        return g / n - a.data * ((g * a.data).sum(axis=1, keepdims=True) / (n * n * s_safe))

    return _result(out, [(a, pull)])


def bce_logits(z, y) -> Tensor:
    """Elementwise binary cross-entropy fused with the sigmoid for stability.

    y is a constant 0/1 label array; gradient w.r.t. the logit is sigmoid(z) - y.
    """
    z = _wrap(z)
    y = np.asarray(y, dtype=z.data.dtype)
    if y.shape != z.data.shape:
        raise ShapeMismatch(f"labels {y.shape} vs logits {z.data.shape}")
    data = np.maximum(z.data, 0.0) - z.data * y + np.log1p(np.exp(-np.abs(z.data)))
    sig = 1.0 / (1.0 + np.exp(-np.clip(z.data, -60.0, 60.0)))
    return _result(data, [(z, lambda g: g * (sig - y))])


# ---------------------------------------------------------------------------
# pooling / scatter / gather / sampling


def group_max_pool(a) -> Tensor:
    """(G, K, D) -> (G, D) max over the K axis; gradient to the first maximal k."""
    a = _wrap(a)
    if a.data.ndim != 3:
        raise ShapeMismatch(f"group_max_pool expects (G, K, D), got {a.data.shape}")
    win = a.data.argmax(axis=1)  # first occurrence = lowest index on ties
    data = np.take_along_axis(a.data, win[:, None, :], axis=1)[:, 0, :]

    def pull(g):
        ga = np.zeros_like(a.data)
        np.put_along_axis(ga, win[:, None, :], g[:, None, :], axis=1)
        return ga

    return _result(data, [(a, pull)])


def scatter_max(feats, cell_idx: np.ndarray, n_cells: int) -> Tensor:
    """(N, D) features max-scattered into n_cells rows; untouched cells are zero.

    Gradient routes to the lowest-index winning input row per (cell, column).
    """
    feats = _wrap(feats)
    if feats.data.ndim != 2:
        raise ShapeMismatch(f"scatter_max expects (N, D), got {feats.data.shape}")
    idx = np.asarray(cell_idx, dtype=np.int64)
    if idx.shape != (feats.data.shape[0],):
        raise ShapeMismatch("cell index must be (N,)")
    if len(idx) and (idx.min() < 0 or idx.max() >= n_cells):
        raise ShapeMismatch("cell index out of range")
    n, d = feats.data.shape
    raw = np.full((n_cells, d), -np.inf, dtype=feats.data.dtype)
    np.maximum.at(raw, idx, feats.data)
    touched = np.zeros(n_cells, dtype=bool)
    touched[idx] = True
    data = np.where(touched[:, None], raw, 0.0)

    winner = np.full((n_cells, d), n, dtype=np.int64)
    rows = np.arange(n, dtype=np.int64)[:, None]
    is_max = feats.data == raw[idx]
    np.minimum.at(winner, idx, np.where(is_max, rows, n))

    def pull(g):
        gf = np.zeros_like(feats.data)
        valid = winner < n
        cells, cols = np.nonzero(valid)
        gf[winner[cells, cols], cols] = g[cells, cols]
        return gf

    return _result(data, [(feats, pull)])


def gather_rows(a, idx: np.ndarray) -> Tensor:
    a = _wrap(a)
    idx = np.asarray(idx, dtype=np.int64)
    data = a.data[idx]

    def pull(g):
        ga = np.zeros_like(a.data)
        np.add.at(ga, idx, g)
        return ga

    return _result(data, [(a, pull)])


def _corner_setup(coord: np.ndarray, res: int):
    """Clamp-to-edge cell-center coordinates: returns (i0, i1, frac)."""
    g = np.clip(coord * res - 0.5, 0.0, res - 1.0)
    i0 = np.floor(g).astype(np.int64)
    i0 = np.minimum(i0, res - 1)
    i1 = np.minimum(i0 + 1, res - 1)
    return i0, i1, g - i0


def bilinear_sample(plane, uv: np.ndarray) -> Tensor:
    """Sample a (R, R, D) feature plane at M points with uv in [0, 1]^2.

    Linear in the plane features; cell centers sit at (i + 0.5) / R.
    """
    plane = _wrap(plane)
    if plane.data.ndim != 3 or plane.data.shape[0] != plane.data.shape[1]:
        raise ShapeMismatch(f"bilinear_sample expects (R, R, D), got {plane.data.shape}")
    res, _, d = plane.data.shape
    uv = np.asarray(uv, dtype=np.float64)
    a0, a1, fa = _corner_setup(uv[:, 0], res)
    b0, b1, fb = _corner_setup(uv[:, 1], res)
    flat = plane.data.reshape(res * res, d)
    corners = [(a0, b0, (1 - fa) * (1 - fb)), (a0, b1, (1 - fa) * fb),
               (a1, b0, fa * (1 - fb)), (a1, b1, fa * fb)]
    data = np.zeros((len(uv), d), dtype=plane.data.dtype)
    for ia, ib, w in corners:
        data += w[:, None].astype(plane.data.dtype) * flat[ia * res + ib]

    def pull(g):
        gp = np.zeros_like(flat)
        for ia, ib, w in corners:
            np.add.at(gp, ia * res + ib, w[:, None].astype(g.dtype) * g)
        return gp.reshape(plane.data.shape)

    return _result(data, [(plane, pull)])


def trilinear_sample(grid, uvw: np.ndarray) -> Tensor:
    """Sample a (R, R, R, D) feature grid at M points with uvw in [0, 1]^3."""
    grid = _wrap(grid)
    if grid.data.ndim != 4 or len(set(grid.data.shape[:3])) != 1:
        raise ShapeMismatch(f"trilinear_sample expects (R, R, R, D), got {grid.data.shape}")
    res = grid.data.shape[0]
    d = grid.data.shape[3]
    uvw = np.asarray(uvw, dtype=np.float64)
    a0, a1, fa = _corner_setup(uvw[:, 0], res)
    b0, b1, fb = _corner_setup(uvw[:, 1], res)
    c0, c1, fc = _corner_setup(uvw[:, 2], res)
    flat = grid.data.reshape(res ** 3, d)
    corners = []
    for ia, wa in ((a0, 1 - fa), (a1, fa)):
        for ib, wb in ((b0, 1 - fb), (b1, fb)):
            for ic, wc in ((c0, 1 - fc), (c1, fc)):
                corners.append((ia, ib, ic, wa * wb * wc))
    data = np.zeros((len(uvw), d), dtype=grid.data.dtype)
    for ia, ib, ic, w in corners:
        data += w[:, None].astype(grid.data.dtype) * flat[(ia * res + ib) * res + ic]

    def pull(g):
        gg = np.zeros_like(flat)
        for ia, ib, ic, w in corners:
            np.add.at(gg, (ia * res + ib) * res + ic, w[:, None].astype(g.dtype) * g)
        return gg.reshape(grid.data.shape)

    return _result(data, [(grid, pull)])


# ---------------------------------------------------------------------------
# convolutions (stride 1, same padding, odd kernels)


def _conv_nd(x: Tensor, w: Tensor, b: Tensor, nd: int) -> Tensor:
    ks = w.data.shape[:nd]
    c_in, c_out = w.data.shape[nd], w.data.shape[nd + 1]
    if x.data.ndim != nd + 1 or x.data.shape[-1] != c_in:
        raise ShapeMismatch(f"conv{nd}d input {x.data.shape} vs weight {w.data.shape}")
    if any(k % 2 == 0 for k in ks):
        raise ShapeMismatch("conv kernels must be odd-sized")
    if b.data.shape != (c_out,):
        raise ShapeMismatch(f"conv bias must be ({c_out},)")
    spatial = x.data.shape[:nd]
    pads = tuple((k // 2, k // 2) for k in ks) + ((0, 0),)
    xp = np.pad(x.data, pads)
    win = np.lib.stride_tricks.sliding_window_view(xp, ks + (c_in,))
    # win shape: spatial + (1,) + ks + (c_in,)
    cols = win.reshape(int(np.prod(spatial)), int(np.prod(ks)) * c_in)
    wmat = w.data.reshape(-1, c_out)
    out = (cols @ wmat + b.data).reshape(spatial + (c_out,))

    def pull_x(g):
        g2 = g.reshape(-1, c_out)
        gcols = (g2 @ wmat.T).reshape(spatial + ks + (c_in,))
        gxp = np.zeros_like(xp)
        for offs in np.ndindex(*ks):
            sl = tuple(slice(o, o + s) for o, s in zip(offs, spatial))
            gxp[sl] += gcols[(...,) + offs + (slice(None),)][(slice(None),) * nd]
        unpad = tuple(slice(k // 2, k // 2 + s) for k, s in zip(ks, spatial)) + (slice(None),)
        return gxp[unpad]

    def pull_w(g):
        g2 = g.reshape(-1, c_out)
        return (cols.T @ g2).reshape(w.data.shape)

    def pull_b(g):
        return g.reshape(-1, c_out).sum(axis=0)

    return _result(out, [(x, pull_x), (w, pull_w), (b, pull_b)])


def conv2d(x, w, b) -> Tensor:
    """(H, W, Cin) * (kh, kw, Cin, Cout) + (Cout,) -> (H, W, Cout)."""
    return _conv_nd(_wrap(x), _wrap(w), _wrap(b), 2)


def conv3d(x, w, b) -> Tensor:
    """(D, H, W, Cin) * (kd, kh, kw, Cin, Cout) + (Cout,) -> (D, H, W, Cout)."""
    return _conv_nd(_wrap(x), _wrap(w), _wrap(b), 3)


# ---------------------------------------------------------------------------
# rotation


def rodrigues_apply(u, theta, x) -> Tensor:
    """Rotate each row x[i] by theta[i] about unit axis u[i] (through the origin).

    r = x cos(t) + (u x x) sin(t) + u (u . x) (1 - cos(t)); differentiable in all
    three arguments (u is assumed unit-norm; feed it through normalize_rows).
    """
    u, theta, x = _wrap(u), _wrap(theta), _wrap(x)
    _check_same_dtype(u, theta, x)
    if u.data.shape != x.data.shape or u.data.ndim != 2 or u.data.shape[1] != 3:
        raise ShapeMismatch(f"rodrigues_apply axis {u.data.shape} vs points {x.data.shape}")
    if theta.data.shape != (u.data.shape[0],):
        raise ShapeMismatch(f"rodrigues_apply angles {theta.data.shape}")
    U, X = u.data, x.data
    c = np.cos(theta.data)[:, None]
    s = np.sin(theta.data)[:, None]
    cross = np.cross(U, X)
    udotx = (U * X).sum(axis=1, keepdims=True)
    data = X * c + cross * s + U * udotx * (1.0 - c)

    def pull_theta(g):
        dr = -X * s + cross * c + U * udotx * s
        return (g * dr).sum(axis=1)

    def pull_x(g):
        # dr/dx applied transposed: rotation by -theta of g
        gc = np.cross(g, U) * s  # (u x .)^T g = g x u
        return g * c - gc * -1.0 + U * (U * g).sum(axis=1, keepdims=True) * (1.0 - c)

    def pull_u(g):
        term_cross = np.cross(X, g) * s
        term_outer = (1.0 - c) * (g * udotx + X * (U * g).sum(axis=1, keepdims=True))
        return term_cross + term_outer

    return _result(data, [(u, pull_u), (theta, pull_theta), (x, pull_x)])


# Registry of the differentiable primitive set (used by grad-check sweeps).
PRIMITIVES = {
    "add": add, "sub": sub, "mul": mul, "scale": scale, "matmul": matmul,
    "concat": concat, "reshape": reshape, "sum_all": sum_all, "sum_axis": sum_axis,
    "abs": abs_, "relu": relu, "softplus": softplus, "sigmoid": sigmoid,
    "softmax": softmax_rows, "safe_arccos": safe_arccos, "l2norm": l2norm_rows,
    "normalize": normalize_rows, "bce_logits": bce_logits,
    "group_max_pool": group_max_pool, "scatter_max": scatter_max,
    "gather": gather_rows, "bilinear_sample": bilinear_sample,
    "trilinear_sample": trilinear_sample, "conv2d": conv2d, "conv3d": conv3d,
    "rodrigues_apply": rodrigues_apply,
}


# ---------------------------------------------------------------------------
# gradient checking


@dataclass
class GradientReport:
    max_rel_error: float
    per_param: dict[str, float]
    step: float
    dtype: str

    def worst(self) -> tuple[str, float]:
        name = max(self.per_param, key=self.per_param.get)
        return name, self.per_param[name]


def grad_check(fn, params: list[Parameter], h: float = 1e-5,
               max_entries: int = 10_000, seed: int = 0) -> GradientReport:
    """Compare analytic gradients of the scalar fn() against central differences.

    Every parameter entry is perturbed by +-h (a seeded random subsample above
    `max_entries` entries); relative error uses max(|analytic|, |numeric|, 1e-8)
    as the denominator. Parameters must be float64.
    """
    for p in params:
        if p.data.dtype != np.float64:
            raise ShapeMismatch(f"grad_check requires float64 parameters ({p.name})")
        p.zero_grad()
    with record() as tape:
        loss = fn()
    backward(loss, tape)
    analytic = {p.name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for p in params}
    rng = np.random.default_rng(seed)
    per_param = {}
    for p in params:
        flat = p.data.reshape(-1)
        n = flat.size
        entries = np.arange(n) if n <= max_entries else rng.choice(n, size=max_entries, replace=False)
        worst = 0.0
        ana = analytic[p.name].reshape(-1)
        for i in entries:
            orig = flat[i]
            flat[i] = orig + h
            f_plus = fn().item()
            flat[i] = orig - h
            f_minus = fn().item()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * h)
            denom = max(abs(ana[i]), abs(numeric), 1e-8)
            worst = max(worst, abs(ana[i] - numeric) / denom)
        per_param[p.name] = worst
    overall = max(per_param.values()) if per_param else 0.0
    return GradientReport(overall, per_param, h, "float64")


# ---------------------------------------------------------------------------
# parameter checkpoint file (DTCK)


def save_tensors(path, named: dict[str, np.ndarray]):
    """Write named arrays as 32-bit floats in the DTCK record format."""
    body = CHECKPOINT_MAGIC + struct.pack("<I", CHECKPOINT_VERSION)
    body += struct.pack("<I", len(named))
    for name, arr in named.items():
        body += pack_named_f32(name, arr)
    with open(path, "wb") as f:
        f.write(finish_with_checksum(body))


def load_tensors(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        raw = f.read()
    reader = open_checked(raw, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)
    count = reader.u32()
    out = {}
    for _ in range(count):
        name, arr = reader.named_f32()
        out[name] = arr
    return out
