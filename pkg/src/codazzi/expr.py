"""Scalar expressions over chart coordinates.

Nodes are immutable and hash-consed, so structurally equal expressions are
the same object and derivatives can be memoized on the node itself.
"""

from __future__ import annotations

import math
import weakref

import numpy as np

PI = 3.141592653589793

UNARY_OPS = ("neg", "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")
FUNCTIONS = UNARY_OPS[1:]
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class ExprDomainError(ExprError, ArithmeticError):
    """Raised when evaluation leaves the domain of some node."""

    def __init__(self, message, node=None):
        where = f" in {to_text(node)}" if node is not None else ""
        super().__init__(message + where)
        self.node = node


_interned: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()


class Expr:
    __slots__ = ("kind", "value", "args", "_derivs", "_hash", "__weakref__")

    def __new__(cls, *a, **k):
        raise TypeError("use const(), var() or the operator helpers")

    @classmethod
    def _intern(cls, kind, value, args):
        if kind == "const":
            key = ("const", float(value))
        else:
            key = (kind, value) + tuple(id(x) for x in args)
        node = _interned.get(key)
        if node is None:
            node = object.__new__(cls)
            node.kind = kind
            node.value = value
            node.args = args
            node._derivs = {}
            node._hash = hash(key)
            _interned[key] = node
        return node

    def __setattr__(self, name, val):
        if hasattr(self, "_hash"):
            raise AttributeError("Expr is immutable")
        object.__setattr__(self, name, val)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (parse_tree, (to_tree(self),))

    @property
    def is_const(self):
        return self.kind == "const"

    def __repr__(self):
        return f"Expr({to_text(self)})"

    def __str__(self):
        return to_text(self)

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

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)


def const(c) -> Expr:
    return Expr._intern("const", float(c), ())


def var(index: int) -> Expr:
    if index < 0:
        raise ValueError("coordinate index must be nonnegative")
    return Expr._intern("var", int(index), ())


ZERO = const(0.0)
ONE = const(1.0)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, np.integer, np.floating)):
        return const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _is(e, c):
    return e.kind == "const" and e.value == c


# scalar kernels shared by constant folding and evaluation

def _apply_unary(op, x):
    if op == "neg":
        return -x
    if op == "log":
        if x <= 0.0:
            raise ValueError("log of nonpositive value")
        return math.log(x)
    if op == "sqrt":
        if x < 0.0:
            raise ValueError("sqrt of negative value")
        return math.sqrt(x)
    if op == "tan":
        r = math.tan(x)
    else:
        r = getattr(math, op)(x)
    return r


def _apply_binary(op, x, y):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if y == 0.0:
            raise ValueError("division by zero")
        return x / y
    if x < 0.0 and y != math.floor(y):
        raise ValueError("non-integer power of negative base")
    if x == 0.0 and y < 0.0:
        raise ValueError("zero to a negative power")
    return math.pow(x, y)


def _fold(fn, *xs):
    try:
        r = fn(*xs)
    except (ValueError, OverflowError, ZeroDivisionError):
        return None
    return r if math.isfinite(r) else None


def unary(op: str, a: Expr) -> Expr:
    if op not in UNARY_OPS:
        raise ValueError(f"unknown unary op {op!r}")
    if a.kind == "const":
        r = _fold(_apply_unary, op, a.value)
        if r is not None:
            return const(r)
    if op == "neg" and a.kind == "neg":
        return a.args[0]
    return Expr._intern(op, None, (a,))


def neg(a: Expr) -> Expr:
    return unary("neg", a)


def add(a: Expr, b: Expr) -> Expr:
    if a.kind == "const" and b.kind == "const":
        return const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return Expr._intern("add", None, (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if a.kind == "const" and b.kind == "const":
        return const(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    if a is b:
        return ZERO
    return Expr._intern("sub", None, (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if a.kind == "const" and b.kind == "const":
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
    return Expr._intern("mul", None, (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if a.kind == "const" and b.kind == "const":
        r = _fold(_apply_binary, "div", a.value, b.value)
        if r is not None:
            return const(r)
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    return Expr._intern("div", None, (a, b))


def power(a: Expr, b: Expr) -> Expr:
    if a.kind == "const" and b.kind == "const":
        r = _fold(_apply_binary, "pow", a.value, b.value)
        if r is not None:
            return const(r)
    if _is(b, 1.0):
        return a
    if _is(b, 0.0):
        return ONE
    if _is(a, 1.0):
        return ONE
    return Expr._intern("pow", None, (a, b))


_BUILDERS = {"add": add, "sub": sub, "mul": mul, "div": div, "pow": power}


def binary(op: str, a: Expr, b: Expr) -> Expr:
    return _BUILDERS[op](a, b)


def sin(a):
    return unary("sin", as_expr(a))


def cos(a):
    return unary("cos", as_expr(a))


def exp(a):
    return unary("exp", as_expr(a))


def log(a):
    return unary("log", as_expr(a))


def sqrt(a):
    return unary("sqrt", as_expr(a))


# -- differentiation ---------------------------------------------------------

def differentiate(e: Expr, i: int) -> Expr:
    """Exact partial derivative with respect to coordinate ``i``."""
    cached = e._derivs.get(i)
    if cached is not None:
        return cached
    k = e.kind
    if k == "const":
        r = ZERO
    elif k == "var":
        r = ONE if e.value == i else ZERO
    elif k in BINARY_OPS:
        a, b = e.args
        da = differentiate(a, i)
        db = differentiate(b, i)
        if k == "add":
            r = add(da, db)
        elif k == "sub":
            r = sub(da, db)
        elif k == "mul":
            r = add(mul(da, b), mul(a, db))
        elif k == "div":
            r = sub(div(da, b), div(mul(a, db), power(b, const(2.0))))
        elif b.kind == "const":
            r = mul(mul(b, power(a, const(b.value - 1.0))), da)
        else:
            r = mul(e, add(mul(db, log(a)), div(mul(b, da), a)))
    else:
        a = e.args[0]
        da = differentiate(a, i)
        if _is(da, 0.0):
            r = ZERO
        elif k == "neg":
            r = neg(da)
        elif k == "sin":
            r = mul(cos(a), da)
        elif k == "cos":
            r = neg(mul(sin(a), da))
        elif k == "tan":
            r = div(da, power(cos(a), const(2.0)))
        elif k == "exp":
            r = mul(e, da)
        elif k == "log":
            r = div(da, a)
        elif k == "sqrt":
            r = div(da, mul(const(2.0), e))
        elif k == "sinh":
            r = mul(unary("cosh", a), da)
        elif k == "cosh":
            r = mul(unary("sinh", a), da)
        else:
            r = mul(sub(ONE, power(e, const(2.0))), da)
    e._derivs[i] = r
    return r


def derivative(e: Expr, indices) -> Expr:
    for i in indices:
        e = differentiate(e, i)
    return e


def free_vars(e: Expr) -> set:
    out = set()
    for node in _postorder(e):
        if node.kind == "var":
            out.add(node.value)
    return out


def _postorder(root: Expr):
    seen = set()
    order = []
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(node.args):
            if id(child) not in seen:
                stack.append((child, False))
    return order


def node_count(e: Expr) -> int:
    return len(_postorder(e))


# -- evaluation ----------------------------------------------------------------

def evaluate(e: Expr, point) -> float:
    point = [float(x) for x in point]
    values = {}
    for node in _postorder(e):
        k = node.kind
        if k == "const":
            v = node.value
        elif k == "var":
            if node.value >= len(point):
                raise ExprDomainError(f"coordinate index {node.value} outside a point of length {len(point)}")
            v = point[node.value]
        else:
            args = [values[id(a)] for a in node.args]
            try:
                if k in BINARY_OPS:
                    v = _apply_binary(k, *args)
                else:
                    v = _apply_unary(k, *args)
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise ExprDomainError(str(exc), node) from None
            if not math.isfinite(v):
                raise ExprDomainError("non-finite value", node)
        values[id(node)] = v
    return values[id(e)]


_NUMPY_UNARY = {
    "neg": "-({})", "sin": "_np.sin({})", "cos": "_np.cos({})", "tan": "_np.tan({})",
    "exp": "_np.exp({})", "log": "_np.log({})", "sqrt": "_np.sqrt({})",
    "sinh": "_np.sinh({})", "cosh": "_np.cosh({})", "tanh": "_np.tanh({})",
}
_NUMPY_BINARY = {
    "add": "({} + {})", "sub": "({} - {})", "mul": "({} * {})", "div": "({} / {})",
}


class CompiledExprs:
    """Vectorized evaluator for a batch of expressions sharing subterms.

    Calling it with points of shape (P, n) returns an array of shape (m, P).
    Non-finite output falls back to the scalar evaluator to name the node.
    """

    def __init__(self, exprs, n=None):
        self.exprs = list(exprs)
        self.n = n
        names = {}
        lines = []
        counter = 0
        for root in self.exprs:
            for node in _postorder(root):
                if id(node) in names:
                    continue
                k = node.kind
                if k == "const":
                    names[id(node)] = repr(node.value)
                    continue
                if k == "var":
                    names[id(node)] = f"X[{node.value}]"
                    continue
                args = [names[id(a)] for a in node.args]
                if k in _NUMPY_BINARY:
                    code = _NUMPY_BINARY[k].format(*args)
                elif k == "pow":
                    b = node.args[1]
                    if b.kind == "const" and b.value == 2.0:
                        code = f"({args[0]} * {args[0]})"
                    else:
                        code = f"_np.power({args[0]}, {args[1]})"
                else:
                    code = _NUMPY_UNARY[k].format(args[0])
                name = f"t{counter}"
                counter += 1
                lines.append(f"    {name} = {code}")
                names[id(node)] = name
        outs = ", ".join(f"_full({names[id(r)]})" for r in self.exprs)
        src = "def _f(X, _full):\n" + "\n".join(lines) + f"\n    return [{outs}]\n"
        scope = {"_np": np}
        exec(compile(src, "<codazzi-expr>", "exec"), scope)
        self._fn = scope["_f"]
        self.source = src

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        P = pts.shape[0]
        X = pts.T

        def full(v):
            return np.broadcast_to(np.asarray(v, dtype=float), (P,))

        with np.errstate(all="ignore"):
            out = np.array(self._fn(X, full), dtype=float).reshape(len(self.exprs), P)
        if not np.all(np.isfinite(out)):
            bad = np.argwhere(~np.isfinite(out))[0]
            evaluate(self.exprs[bad[0]], pts[bad[1]])
            raise ExprDomainError(f"non-finite value at point {tuple(pts[bad[1]])}")
        return out


def compile_exprs(exprs, n=None) -> CompiledExprs:
    return CompiledExprs(exprs, n)


# -- printing and parsing --------------------------------------------------------

def to_text(e: Expr, coords=None) -> str:
    """Fully parenthesized text that parses back to an equal-valued Expr."""
    if e is None:
        return "?"
    memo = {}
    for node in _postorder(e):
        k = node.kind
        if k == "const":
            v = node.value
            s = repr(v) if v >= 0 or v != v else f"(-{repr(-v)})"
            if "inf" in s or "nan" in s:
                raise ExprError(f"cannot print non-finite constant {s}")
        elif k == "var":
            s = coords[node.value] if coords is not None else f"x{node.value}"
        elif k in BINARY_OPS:
            a, b = (memo[id(x)] for x in node.args)
            s = f"({a} {_SYMBOLS[k]} {b})"
        elif k == "neg":
            s = f"(-{memo[id(node.args[0])]})"
        else:
            s = f"{k}({memo[id(node.args[0])]})"
        memo[id(node)] = s
    return memo[id(e)]


def to_tree(e: Expr):
    memo = {}
    for node in _postorder(e):
        if node.kind in ("const", "var"):
            memo[id(node)] = (node.kind, node.value)
        else:
            memo[id(node)] = (node.kind,) + tuple(memo[id(a)] for a in node.args)
    return memo[id(e)]


def parse_tree(tree) -> Expr:
    kind = tree[0]
    if kind == "const":
        return const(tree[1])
    if kind == "var":
        return var(tree[1])
    args = [parse_tree(t) for t in tree[1:]]
    if kind in BINARY_OPS:
        return binary(kind, *args)
    return unary(kind, *args)


class _Parser:
    def __init__(self, text, coords):
        self.text = text
        self.coords = {name: i for i, name in enumerate(coords)}
        self.tokens = self._lex(text)
        self.pos = 0

    @staticmethod
    def _lex(text):
        tokens = []
        i = 0
        data = text.encode("utf-8")
        while i < len(data):
            c = chr(data[i])
            if c in " \t\r\n":
                i += 1
            elif c == "#":
                while i < len(data) and data[i] != ord("\n"):
                    i += 1
            elif c.isdigit() or (c == "." and i + 1 < len(data) and chr(data[i + 1]).isdigit()):
                j = i
                while j < len(data) and chr(data[j]).isdigit():
                    j += 1
                if j < len(data) and chr(data[j]) == ".":
                    j += 1
                    while j < len(data) and chr(data[j]).isdigit():
                        j += 1
                if j < len(data) and chr(data[j]) in "eE":
                    k = j + 1
                    if k < len(data) and chr(data[k]) in "+-":
                        k += 1
                    if k < len(data) and chr(data[k]).isdigit():
                        while k < len(data) and chr(data[k]).isdigit():
                            k += 1
                        j = k
                tokens.append(("num", data[i:j].decode(), i))
                i = j
            elif c.isalpha() or c == "_":
                j = i
                while j < len(data) and (chr(data[j]).isalnum() or chr(data[j]) == "_"):
                    j += 1
                tokens.append(("ident", data[i:j].decode(), i))
                i = j
            elif c in "+-*/^()":
                tokens.append((c, c, i))
                i += 1
            else:
                raise ExprSyntaxError(f"unexpected character {c!r}", i)
        tokens.append(("end", "", len(data)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {kind!r}, found {what}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            e = add(e, self.term()) if op == "+" else sub(e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            e = mul(e, self.factor()) if op == "*" else div(e, self.factor())
        return e

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            return power(base, self.factor())
        return base

    def atom(self):
        kind, text, offset = self.peek()
        if kind == "num":
            self.take()
            return const(float(text))
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "ident":
            self.take()
            if text in FUNCTIONS:
                self.take("(")
                e = self.expr()
                self.take(")")
                return unary(text, e)
            if text in self.coords:
                return var(self.coords[text])
            if text == "pi":
                return const(PI)
            raise UnknownIdentifierError(text, offset)
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", offset)


def check_coords(coords):
    coords = list(coords)
    if not coords:
        raise ValueError("coordinate list is empty")
    if len(set(coords)) != len(coords):
        raise ValueError("coordinate names must be distinct")
    for name in coords:
        if not (name[:1].isalpha() or name[:1] == "_") or not all(ch.isalnum() or ch == "_" for ch in name):
            raise ValueError(f"invalid coordinate name {name!r}")
        if name in FUNCTIONS or name == "pi":
            raise ValueError(f"coordinate name {name!r} clashes with a reserved word")
    return coords


def parse(text: str, coords) -> Expr:
    return _Parser(text, check_coords(coords)).parse()
