"""Symbolic expressions in the null coordinates ``u`` and ``v``.

Expressions are immutable, hash-consed DAG nodes: two structurally equal
expressions built anywhere in the process are the same object, so identity
comparison is structural comparison and derivative caches are shared.

Only constant folding and the 0/1 identities are applied on construction.
Equality of non-identical trees is decided by evaluation (see :func:`is_zero`).

Coefficient grammar (whitespace is ignored)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | power
    power    := atom ['^' exponent]
    exponent := ['-'] INTEGER | '(' ['-'] INTEGER ')'
    atom     := NUMBER | 'u' | 'v' | FUNC '(' expr ')' | '(' expr ')'
    FUNC     := 'exp' | 'ln' | 'sin' | 'cos' | 'abs'
    NUMBER   := DIGITS ['.' DIGITS] [('e' | 'E') ['+' | '-'] DIGITS]
              | '.' DIGITS [exponent part]

``ln(x)`` denotes ``ln|x|`` and ``abs(x)`` is stored as ``exp(ln|x|)``.
Printed expressions use the same grammar, except for the internal
primed variables ``up``/``vp`` and numerically integrated nodes.
"""

from __future__ import annotations

import math
import threading
import weakref
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .errors import (
    AllPointsSingular,
    ExprSyntaxError,
    SingularPoint,
    UnknownIdentifier,
)

VARIABLES = ("u", "v", "up", "vp")
FUNCTIONS = ("exp", "ln", "sin", "cos", "abs")
SINGULAR_EPS = 1e-300


_table: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


class Expr:
    """A node of an expression DAG.

    ``kind`` is one of ``const``, ``var``, ``add``, ``mul``, ``div``, ``pow``,
    ``neg``, ``exp``, ``ln`` (log of absolute value), ``sin``, ``cos`` and
    ``int`` (a definite integral evaluated by quadrature). Build nodes with
    the module-level constructors, never directly.
    """

    __slots__ = ("kind", "value", "args", "_free", "_diff", "_str", "__weakref__")

    def __init__(self, kind, value, args):
        self.kind = kind
        self.value = value
        self.args = args
        self._free = None
        self._diff = {}
        self._str = None

    def __setattr__(self, name, val):
        if name in ("kind", "value", "args") and hasattr(self, "args"):
            raise AttributeError("Expr is immutable")
        object.__setattr__(self, name, val)

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return power(self, n)

    def __repr__(self):
        return f"Expr({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    @property
    def is_const(self):
        return self.kind == "const"

    def free_vars(self):
        if self._free is None:
            if self.kind == "var":
                free = frozenset((self.value,))
            elif self.kind == "int":
                free = self.args[0].free_vars() | {self.value[0]}
            else:
                free = frozenset().union(*(a.free_vars() for a in self.args))
            object.__setattr__(self, "_free", free)
        return self._free

    def depends_on(self, var):
        return var in self.free_vars()


def _intern(kind, value, args=()):
    key = (kind, value, tuple(id(a) for a in args))
    with _lock:
        node = _table.get(key)
        if node is None:
            node = Expr(kind, value, tuple(args))
            _table[key] = node
    return node


def const(c) -> Expr:
    c = float(c)
    if not math.isfinite(c):
        raise ValueError(f"non-finite constant {c}")
    if c == 0.0:
        c = 0.0
    return _intern("const", c)


def var(name) -> Expr:
    if name not in VARIABLES:
        raise ValueError(f"unknown variable {name!r}")
    return _intern("var", name)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return const(x)
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


ZERO = const(0)
ONE = const(1)
U = var("u")
V = var("v")


def _is(e, c):
    return e.kind == "const" and e.value == c


def add(a, b):
    if a.is_const and b.is_const:
        return const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return _intern("add", None, (a, b))


def neg(a):
    if a.is_const:
        return const(-a.value)
    if a.kind == "neg":
        return a.args[0]
    return _intern("neg", None, (a,))


def sub(a, b):
    if a is b:
        return ZERO
    return add(a, neg(b))


def mul(a, b):
    if a.is_const and b.is_const:
        return const(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return neg(b)
    if _is(b, -1.0):
        return neg(a)
    return _intern("mul", None, (a, b))


def div(a, b):
    if _is(b, 0.0):
        raise SingularPoint("division by the literal constant zero")
    if _is(a, 0.0):
        return ZERO
    if _is(b, 1.0):
        return a
    if a.is_const and b.is_const:
        return const(a.value / b.value)
    return _intern("div", None, (a, b))


def power(a, n):
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return a
    if a.is_const:
        if a.value == 0.0 and n < 0:
            raise SingularPoint("negative power of the literal constant zero")
        return const(a.value ** n)
    if a.kind == "pow":
        return power(a.args[0], a.value * n)
    return _intern("pow", n, (a,))


def exp(a):
    if a.is_const:
        return const(math.exp(a.value))
    return _intern("exp", None, (a,))


def ln(a):
    """Natural log of the absolute value of ``a``."""
    if a.is_const:
        if abs(a.value) <= SINGULAR_EPS:
            raise SingularPoint("logarithm of the literal constant zero")
        return const(math.log(abs(a.value)))
    # exact identities for ln|.|; they keep log-derivatives of products small
    if a.kind == "exp":
        return a.args[0]
    if a.kind == "neg":
        return ln(a.args[0])
    if a.kind == "mul":
        return add(ln(a.args[0]), ln(a.args[1]))
    if a.kind == "div":
        return sub(ln(a.args[0]), ln(a.args[1]))
    if a.kind == "pow":
        return mul(const(a.value), ln(a.args[0]))
    return _intern("ln", None, (a,))


def sin(a):
    if a.is_const:
        return const(math.sin(a.value))
    return _intern("sin", None, (a,))


def cos(a):
    if a.is_const:
        return const(math.cos(a.value))
    return _intern("cos", None, (a,))


def absval(a):
    if a.is_const:
        return const(abs(a.value))
    return exp(ln(a))


def integral(integrand, var_name, lower):
    """Node for ``int_{lower}^{var} integrand(s, other) ds``, evaluated by quadrature."""
    if var_name not in ("u", "v"):
        raise ValueError("integration variable must be u or v")
    if _is(integrand, 0.0):
        return ZERO
    return _intern("int", (var_name, float(lower)), (integrand,))


_BUILD = {"neg": neg, "exp": exp, "ln": ln, "sin": sin, "cos": cos}


def _postorder(root):
    """Unique nodes of the DAG below ``root``, children before parents."""
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in node.args:
            if id(child) not in seen:
                stack.append((child, False))
    return order


# ---------------------------------------------------------------- calculus


def diff(e: Expr, var_name: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``var_name``."""
    if var_name not in VARIABLES:
        raise ValueError(f"unknown variable {var_name!r}")
    cached = e._diff.get(var_name)
    if cached is not None:
        return cached
    for node in _postorder(e):
        if var_name in node._diff:
            continue
        node._diff[var_name] = _diff_node(node, var_name)
    return e._diff[var_name]


def _diff_node(node, x):
    if not node.depends_on(x):
        return ZERO
    k = node.kind
    if k == "var":
        return ONE
    if k == "int":
        ivar, lower = node.value
        if x == ivar:
            return node.args[0]
        return integral(node.args[0]._diff[x], ivar, lower)
    d = [a._diff[x] for a in node.args]
    a = node.args[0]
    if k == "add":
        return add(d[0], d[1])
    if k == "neg":
        return neg(d[0])
    if k == "mul":
        b = node.args[1]
        return add(mul(d[0], b), mul(a, d[1]))
    if k == "div":
        # (a' - (a/b) b') / b keeps intermediate magnitudes near the result's
        b = node.args[1]
        return div(sub(d[0], mul(node, d[1])), b)
    if k == "pow":
        n = node.value
        return mul(mul(const(n), power(a, n - 1)), d[0])
    if k == "exp":
        return mul(node, d[0])
    if k == "ln":
        return div(d[0], a)
    if k == "sin":
        return mul(cos(a), d[0])
    if k == "cos":
        return neg(mul(sin(a), d[0]))
    raise AssertionError(k)


def substitute(e: Expr, mapping: dict) -> Expr:
    """Replace variables by expressions, e.g. ``{"v": const(0)}``."""
    mapping = {k: as_expr(val) for k, val in mapping.items()}
    out = {}
    for node in _postorder(e):
        k = node.kind
        if k == "const":
            new = node
        elif k == "var":
            new = mapping.get(node.value, node)
        elif k == "int":
            ivar, lower = node.value
            if ivar in mapping:
                raise ValueError("cannot substitute the integration variable of a quadrature node")
            new = integral(out[id(node.args[0])], ivar, lower)
        else:
            args = [out[id(a)] for a in node.args]
            if k == "add":
                new = add(*args)
            elif k == "mul":
                new = mul(*args)
            elif k == "div":
                new = div(*args)
            elif k == "pow":
                new = power(args[0], node.value)
            else:
                new = _BUILD[k](args[0])
        out[id(node)] = new
    return out[id(e)]


def mixed(e: Expr) -> Expr:
    """The mixed partial d^2 e / du dv."""
    return diff(diff(e, "v"), "u")


# ---------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class EvalPoint:
    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("evaluation point must be finite")


def _evaluate_arrays(e, env, want_scale=False):
    """Evaluate on broadcast arrays; singular entries come back as NaN.

    With ``want_scale`` also returns a per-point magnitude estimate of the
    terms combined along the way, used as the floating-point noise floor.
    """
    vals, mags = {}, {}
    shape = np.broadcast(*env.values()).shape if env else ()
    with np.errstate(all="ignore"):
        for node in _postorder(e):
            k = node.kind
            if k == "const":
                val = np.full(shape, node.value)
                mag = np.abs(val)
            elif k == "var":
                if node.value not in env:
                    raise ValueError(f"no value supplied for variable {node.value!r}")
                val = np.broadcast_to(np.asarray(env[node.value], dtype=float), shape)
                mag = np.abs(val)
            elif k == "int":
                val = _quadrature(node, env, shape)
                mag = np.abs(val)
            else:
                a = vals[id(node.args[0])]
                ma = mags[id(node.args[0])]
                if k in ("add", "mul", "div"):
                    b = vals[id(node.args[1])]
                    mb = mags[id(node.args[1])]
                if k == "add":
                    val = a + b
                    mag = ma + mb
                elif k == "neg":
                    val = -a
                    mag = ma
                elif k == "mul":
                    val = a * b
                    mag = ma * np.abs(b) + np.abs(a) * mb
                elif k == "div":
                    bad = np.abs(b) <= SINGULAR_EPS
                    safe = np.where(bad, 1.0, b)
                    val = np.where(bad, np.nan, a / safe)
                    mag = np.where(bad, np.nan, (ma + np.abs(val) * mb) / np.abs(safe))
                elif k == "pow":
                    n = node.value
                    if n < 0:
                        bad = np.abs(a) <= SINGULAR_EPS
                        safe = np.where(bad, 1.0, a)
                        val = np.where(bad, np.nan, safe ** n)
                        mag = abs(n) * np.abs(val / safe) * ma
                    else:
                        val = a ** n
                        mag = n * np.abs(a) ** (n - 1) * ma
                elif k == "exp":
                    val = np.exp(a)
                    mag = np.abs(val) * (1.0 + ma)
                elif k == "ln":
                    bad = np.abs(a) <= SINGULAR_EPS
                    safe = np.abs(np.where(bad, 1.0, a))
                    val = np.where(bad, np.nan, np.log(safe))
                    mag = np.abs(val) + ma / safe
                elif k == "sin":
                    val = np.sin(a)
                    mag = 1.0 + ma
                elif k == "cos":
                    val = np.cos(a)
                    mag = 1.0 + ma
                else:
                    raise AssertionError(k)
            vals[id(node)] = val
            if want_scale:
                mags[id(node)] = mag
            else:
                mags[id(node)] = 0.0
    if want_scale:
        return vals[id(e)], mags[id(e)]
    return vals[id(e)]


def _quadrature(node, env, shape):
    ivar, lower = node.value
    f = node.args[0]
    upper = np.broadcast_to(np.asarray(env[ivar], dtype=float), shape).ravel()
    others = {k: np.broadcast_to(np.asarray(val, dtype=float), shape).ravel()
              for k, val in env.items() if k != ivar}
    span = upper - lower
    if span.size == 0:
        return np.zeros(shape)

    def integrand(t):
        local = dict(others)
        local[ivar] = lower + t * span
        return _evaluate_arrays(f, local) * span

    res, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=1e-10, epsrel=1e-12, norm="max")
    return np.asarray(res).reshape(shape)


def evaluate(e: Expr, u=None, v=None, **primed):
    """Evaluate ``e`` at scalars or broadcastable arrays.

    Raises :class:`SingularPoint` if a denominator or logarithm argument
    vanishes (|x| <= 1e-300) at any requested point.
    """
    if isinstance(u, EvalPoint):
        u, v = u.u, u.v
    env = {}
    if u is not None:
        env["u"] = u
    if v is not None:
        env["v"] = v
    env.update(primed)
    val = _evaluate_arrays(e, env)
    if np.any(np.isnan(val)):
        raise SingularPoint(f"{to_string(e)[:80]} is singular at a requested point")
    if np.ndim(val) == 0:
        return float(val)
    return np.array(val)


def evaluate_masked(e: Expr, u, v):
    """Evaluate on arrays, returning NaN at singular points instead of raising."""
    return _evaluate_arrays(e, {"u": u, "v": v})


# ---------------------------------------------------------------- zero test


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle ``[u_lo, u_hi] x [v_lo, v_hi]`` in the (u, v) plane."""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        if not (self.u_hi > self.u_lo and self.v_hi > self.v_lo):
            raise ValueError("rectangle must have positive area")

    def shrink(self, fraction):
        du = (self.u_hi - self.u_lo) * fraction / 2
        dv = (self.v_hi - self.v_lo) * fraction / 2
        return Rect(self.u_lo + du, self.u_hi - du, self.v_lo + dv, self.v_hi - dv)

    def contains(self, other: "Rect") -> bool:
        return (self.u_lo <= other.u_lo and other.u_hi <= self.u_hi
                and self.v_lo <= other.v_lo and other.v_hi <= self.v_hi)


def sample_points(rect: Rect, count: int, singular_offsets=(), margin=0.05, seed=0):
    """Quasi-random (scrambled Halton) points in ``rect`` away from lines u = v + c."""
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    us, vs = [], []
    need = count
    for _ in range(64):
        pts = sampler.random(max(4 * need, 16))
        u = rect.u_lo + pts[:, 0] * (rect.u_hi - rect.u_lo)
        v = rect.v_lo + pts[:, 1] * (rect.v_hi - rect.v_lo)
        keep = np.ones(u.shape, dtype=bool)
        for c in singular_offsets:
            keep &= np.abs(u - v - c) > margin
        us.extend(u[keep][:need])
        vs.extend(v[keep][:need])
        need = count - len(us)
        if need <= 0:
            break
    return np.array(us[:count]), np.array(vs[:count])


def is_zero(e: Expr, domain: Rect | None = None, trials: int = 64, tol: float = 1e-9,
            singular_offsets=(), margin: float = 0.05, relative: bool = True) -> bool:
    """Probabilistic identical-zero test.

    Constants are decided directly. Otherwise ``e`` is sampled at ``trials``
    quasi-random points of ``domain`` and declared zero when every regular
    sample satisfies ``|e(p)| <= tol * max(1, scale(p))``, where ``scale`` is
    the magnitude of the terms combined while evaluating (so cancellation
    noise in large intermediate terms is not mistaken for a nonzero value).
    With ``relative=False`` the plain bound ``|e(p)| <= tol`` is used.

    This is a sampling test, not a decision procedure.
    """
    if trials < 8:
        raise ValueError("is_zero needs at least 8 trials")
    if e.is_const:
        return abs(e.value) <= tol
    if domain is None:
        domain = Rect(0.0, 1.0, 0.0, 1.0)
    u, v = sample_points(domain, trials, singular_offsets, margin)
    if u.size == 0:
        raise AllPointsSingular("no sample points left after excluding singular lines")
    val, scale = _evaluate_arrays(e, {"u": u, "v": v}, want_scale=True)
    regular = np.isfinite(val) & np.isfinite(scale)
    if not regular.any():
        raise AllPointsSingular(f"{to_string(e)[:80]} is singular at every sample point")
    bound = tol * (np.maximum(1.0, scale[regular]) if relative else 1.0)
    return bool(np.all(np.abs(val[regular]) <= bound))


# ---------------------------------------------------------------- integration


def _linear_in(e, x):
    """Numeric slope b if ``e`` is a + b*x with a free of x and b != 0, else None."""
    d = diff(e, x)
    if not d.is_const or d.value == 0.0:
        return None
    return d.value


def _factors(e):
    """Split a product into (numeric coefficient, list of factors)."""
    coeff, out, stack = 1.0, [], [e]
    while stack:
        node = stack.pop()
        if node.kind == "mul":
            stack.extend(node.args)
        elif node.kind == "neg":
            coeff = -coeff
            stack.append(node.args[0])
        elif node.is_const:
            coeff *= node.value
        else:
            out.append(node)
    return coeff, out


def _product(coeff, factors):
    result = const(coeff)
    for f in factors:
        result = mul(result, f)
    return result


def _antiderivative_factor(f, x):
    if f.kind == "var" and f.value == x:
        return mul(const(0.5), power(f, 2))
    if f.kind == "pow":
        base, n = f.args[0], f.value
        slope = _linear_in(base, x)
        if slope is None:
            return None
        if n == -1:
            return div(ln(base), const(slope))
        return div(power(base, n + 1), const(slope * (n + 1)))
    if f.kind == "div" and not f.args[1].depends_on(x):
        inner = antiderivative(f.args[0], x)
        return None if inner is None else div(inner, f.args[1])
    if f.kind == "div" and not f.args[0].depends_on(x):
        den = f.args[1]
        if den.kind == "pow":
            inner = _antiderivative_factor(power(den.args[0], -den.value), x)
        else:
            inner = _antiderivative_factor(power(den, -1), x)
        return None if inner is None else mul(f.args[0], inner)
    if f.kind in ("exp", "sin", "cos"):
        slope = _linear_in(f.args[0], x)
        if slope is None:
            return None
        if f.kind == "exp":
            return div(f, const(slope))
        if f.kind == "sin":
            return div(neg(cos(f.args[0])), const(slope))
        return div(sin(f.args[0]), const(slope))
    if f.kind in ("add", "neg", "mul"):
        return antiderivative(f, x)
    return None


def antiderivative(e: Expr, x: str) -> Expr | None:
    """Closed-form antiderivative in ``x`` from a small table, or None.

    Covers linear combinations of products of an ``x``-free factor with one
    of: powers of ``x``, integer powers of a linear form in ``x`` (including
    1/(v-u)^n), and exp/sin/cos of a linear form.
    """
    if not e.depends_on(x):
        return mul(e, var(x))
    if e.kind == "add":
        a = antiderivative(e.args[0], x)
        b = antiderivative(e.args[1], x)
        return None if a is None or b is None else add(a, b)
    if e.kind == "neg":
        a = antiderivative(e.args[0], x)
        return None if a is None else neg(a)
    coeff, factors = _factors(e)
    free = [f for f in factors if not f.depends_on(x)]
    bound = [f for f in factors if f.depends_on(x)]
    if not bound:
        return mul(e, var(x))
    if len(bound) > 1:
        exponent = 0
        for f in bound:
            if f.kind == "var":
                exponent += 1
            elif f.kind == "pow" and f.args[0].kind == "var" and f.args[0].value == x:
                exponent += f.value
            else:
                return None
        bound = [power(var(x), exponent)]
        if exponent == 0:
            return mul(_product(coeff, free), var(x))
    inner = _antiderivative_factor(bound[0], x)
    if inner is None:
        return None
    return mul(_product(coeff, free), inner)


def definite_integral(e: Expr, x: str, lower: float) -> Expr:
    """``int_{lower}^{x} e ds`` as an Expr: closed form if the table allows, else quadrature."""
    if _is(e, 0.0):
        return ZERO
    prim = antiderivative(e, x)
    if prim is None:
        return integral(e, x, lower)
    return sub(prim, substitute(prim, {x: const(lower)}))


# ---------------------------------------------------------------- printing

_PREC = {"add": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _fmt_const(c):
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


def _prec(node):
    if node.kind == "const":
        return 3 if node.value < 0 else 5
    return _PREC.get(node.kind, 5)


def to_string(e: Expr) -> str:
    """Print in the coefficient grammar; ``parse(to_string(e))`` evaluates identically."""
    if e._str is not None:
        return e._str
    for node in _postorder(e):
        if node._str is not None:
            continue
        object.__setattr__(node, "_str", _print_node(node))
    return e._str


def _wrap(child, min_prec):
    s = child._str
    return f"({s})" if _prec(child) < min_prec else s


def _print_node(node):
    k = node.kind
    if k == "const":
        return _fmt_const(node.value)
    if k == "var":
        return node.value
    if k == "int":
        ivar, lower = node.value
        return f"integral_{ivar}({node.args[0]._str}; {_fmt_const(lower)})"
    if k == "add":
        a, b = node.args
        if b.kind == "neg":
            return f"{_wrap(a, 1)} - {_wrap(b.args[0], 2)}"
        if b.kind == "const" and b.value < 0:
            return f"{_wrap(a, 1)} - {_fmt_const(-b.value)}"
        return f"{_wrap(a, 1)} + {_wrap(b, 2)}"
    if k == "mul":
        return f"{_wrap(node.args[0], 2)}*{_wrap(node.args[1], 3)}"
    if k == "div":
        return f"{_wrap(node.args[0], 2)}/{_wrap(node.args[1], 3)}"
    if k == "neg":
        return f"-{_wrap(node.args[0], 3)}"
    if k == "pow":
        n = node.value
        exponent = str(n) if n >= 0 else f"({n})"
        return f"{_wrap(node.args[0], 5)}^{exponent}"
    if k == "exp" and node.args[0].kind == "ln":
        return f"abs({node.args[0].args[0]._str})"
    return f"{k}({node.args[0]._str})"


# ---------------------------------------------------------------- parsing


def _tokenize(text):
    tokens, i, n = [], 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(("NUMBER", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("NAME", text[i:j], i))
            i = j
        elif ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i,
                                  ("NUMBER", "NAME", "(", "+", "-"))
    tokens.append(("EOF", "", n))
    return tokens


class _Parser:
    _ATOM_START = ("NUMBER", "u", "v", "exp", "ln", "sin", "cos", "abs", "(", "-", "+")

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind, expected):
        tok = self.peek()
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise ExprSyntaxError(f"unexpected {found!r}", tok[2], expected)
        self.pos += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2],
                                  ("+", "-", "*", "/", "^", "end of input"))
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.tokens[self.pos][0]
            self.pos += 1
            rhs = self.term()
            e = add(e, rhs) if op == "+" else add(e, neg(rhs))
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.tokens[self.pos][0]
            self.pos += 1
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.pos += 1
            return neg(self.unary())
        if kind == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.pos += 1
            return power(base, self.exponent())
        return base

    def exponent(self):
        paren = self.peek()[0] == "("
        if paren:
            self.pos += 1
        sign = 1
        if self.peek()[0] == "-":
            sign = -1
            self.pos += 1
        tok = self.take("NUMBER", ("integer exponent", "-", "("))
        if not tok[1].isdigit():
            raise ExprSyntaxError("exponent must be an integer", tok[2], ("integer exponent",))
        if paren:
            self.take(")", (")",))
        return sign * int(tok[1])

    def atom(self):
        tok = self.peek()
        kind, text, offset = tok
        if kind == "NUMBER":
            self.pos += 1
            return const(float(text))
        if kind == "NAME":
            self.pos += 1
            if text in ("u", "v"):
                return var(text)
            if text in FUNCTIONS:
                self.take("(", ("(",))
                arg = self.expr()
                self.take(")", (")", "+", "-", "*", "/", "^"))
                if text == "abs":
                    return absval(arg)
                return _BUILD[text](arg)
            raise UnknownIdentifier(text, offset)
        if kind == "(":
            self.pos += 1
            e = self.expr()
            self.take(")", (")", "+", "-", "*", "/", "^"))
            return e
        found = text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", offset, self._ATOM_START)


def parse(text: str) -> Expr:
    """Parse a coefficient string into an expression."""
    return _Parser(text).parse()
