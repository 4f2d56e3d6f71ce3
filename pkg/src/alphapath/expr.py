"""Arithmetic expression DSL for drift and diffusion functions.

Expressions are written over the time variable ``t`` and the state variables
``x0 .. x{n-1}`` (position and its derivatives) of an order-n problem, e.g.
``"x0 + 2*t"`` or ``"2 + tanh(x0)"``. The grammar supports ``+ - * / ^``,
unary negation, parentheses, and a fixed whitelist of functions. ``^`` is
right-associative and binds tighter than unary minus, so ``-x0^2`` means
``-(x0^2)``. There is no implicit multiplication: ``2x0`` is a lex/parse
error, never ``2*x0``.

Trees are immutable and safe to share across concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

from .errors import (
    LexError,
    NonFiniteError,
    ParseError,
    UnknownFunctionError,
    UnknownVariableError,
)

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tanh": math.tanh,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}

_OPERATORS = "+-*/^"


def state_variables(order: int) -> list[str]:
    """Legal variable names for an order-n problem: t, x0 .. x{n-1}."""
    return ["t"] + [f"x{k}" for k in range(order)]


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | lparen | rparen | comma
    lexeme: str
    position: int


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / ^
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExprAst"


ExprAst = Union[Const, Var, Neg, BinOp, Call]


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; whitespace is skipped, anything else must lex.

    Concatenating the lexemes (ignoring whitespace) reproduces the input.
    Raises LexError for characters outside the DSL alphabet and for numeric
    literals that do not represent finite doubles.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    while k < n and source[k].isdigit():
                        k += 1
                    j = k
            lexeme = source[i:j]
            if not math.isfinite(float(lexeme)):
                raise LexError(i, lexeme)
            tokens.append(Token("number", lexeme, i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("identifier", source[i:j], i))
            i = j
        elif ch in _OPERATORS:
            tokens.append(Token("operator", ch, i))
            i += 1
        elif ch == "(":
            tokens.append(Token("lparen", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(Token("rparen", ch, i))
            i += 1
        elif ch == ",":
            tokens.append(Token("comma", ch, i))
            i += 1
        else:
            raise LexError(i, ch)
    return tokens


class _Parser:
    """Recursive descent with precedence ^ > unary-neg > * / > + -."""

    def __init__(self, tokens: list[Token], order: int):
        self.tokens = tokens
        self.pos = 0
        self.variables = frozenset(state_variables(order))

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _end_position(self) -> int:
        if self.tokens:
            last = self.tokens[-1]
            return last.position + len(last.lexeme)
        return 0

    def _at_operator(self, ops: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == "operator" and tok.lexeme in ops

    def parse(self) -> ExprAst:
        if not self.tokens:
            raise ParseError(0, "an expression")
        node = self.expression()
        tok = self._peek()
        if tok is not None:
            raise ParseError(tok.position, "end of input")
        return node

    def expression(self) -> ExprAst:
        node = self.term()
        while self._at_operator("+-"):
            op = self._advance().lexeme
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.unary()
        while self._at_operator("*/"):
            op = self._advance().lexeme
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ExprAst:
        if self._at_operator("-"):
            self._advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> ExprAst:
        node = self.primary()
        if self._at_operator("^"):
            self._advance()
            # right-associative; the exponent slot admits a leading unary minus
            return BinOp("^", node, self.unary())
        return node

    def primary(self) -> ExprAst:
        tok = self._peek()
        if tok is None:
            raise ParseError(self._end_position(), "a value")
        if tok.kind == "number":
            self._advance()
            return Const(float(tok.lexeme))
        if tok.kind == "identifier":
            self._advance()
            nxt = self._peek()
            if nxt is not None and nxt.kind == "lparen":
                return self._call(tok)
            if tok.lexeme not in self.variables:
                raise UnknownVariableError(tok.lexeme, tok.position)
            return Var(tok.lexeme)
        if tok.kind == "lparen":
            self._advance()
            node = self.expression()
            closing = self._peek()
            if closing is None or closing.kind != "rparen":
                raise ParseError(
                    closing.position if closing else self._end_position(), "')'"
                )
            self._advance()
            return node
        raise ParseError(tok.position, "a value")

    def _call(self, name: Token) -> ExprAst:
        if name.lexeme not in FUNCTIONS:
            raise UnknownFunctionError(name.lexeme, name.position)
        self._advance()  # lparen
        args = [self.expression()]
        while True:
            tok = self._peek()
            if tok is not None and tok.kind == "comma":
                self._advance()
                args.append(self.expression())
                continue
            break
        closing = self._peek()
        if closing is None or closing.kind != "rparen":
            raise ParseError(
                closing.position if closing else self._end_position(), "')'"
            )
        self._advance()
        if len(args) != 1:
            raise ParseError(name.position, f"exactly one argument to {name.lexeme}")
        return Call(name.lexeme, args[0])


def parse(tokens: list[Token], order: int) -> ExprAst:
    """Parse a token stream for a problem of the given order."""
    return _Parser(tokens, order).parse()


def parse_source(source: str, order: int) -> ExprAst:
    """Tokenize and parse in one call."""
    return parse(tokenize(source), order)


# ── Rendering ────────────────────────────────────────────────────────

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PRECEDENCE = 3
_ATOM_PRECEDENCE = 9


def pretty(node: ExprAst) -> str:
    """Render to DSL source that parses back to a structurally identical tree."""
    return _render(node, 0)


def _render(node: ExprAst, min_prec: int) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg, 0)})"
    if isinstance(node, Neg):
        text = "-" + _render(node.operand, _NEG_PRECEDENCE)
        return f"({text})" if _NEG_PRECEDENCE < min_prec else text
    prec = _PRECEDENCE[node.op]
    if node.op == "^":
        # left operand must be an atom-level item; the exponent slot is `unary`
        text = _render(node.left, prec + 1) + "^" + _render(node.right, _NEG_PRECEDENCE)
    else:
        text = f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


# ── Evaluation ───────────────────────────────────────────────────────


def evaluate(ast: ExprAst, env: Mapping[str, float]) -> float:
    """Evaluate with IEEE doubles.

    Any non-finite intermediate (division by zero, ln of a non-positive
    value, overflow, fractional power of a negative base) raises
    NonFiniteError naming the offending subexpression. Pure and
    deterministic: identical (ast, env) give bit-identical results.
    """
    if isinstance(ast, Const):
        if not math.isfinite(ast.value):
            raise NonFiniteError(repr(ast.value))
        return ast.value
    if isinstance(ast, Var):
        try:
            return env[ast.name]
        except KeyError:
            raise UnknownVariableError(ast.name) from None
    if isinstance(ast, Neg):
        return -evaluate(ast.operand, env)
    if isinstance(ast, BinOp):
        a = evaluate(ast.left, env)
        b = evaluate(ast.right, env)
        try:
            if ast.op == "+":
                value = a + b
            elif ast.op == "-":
                value = a - b
            elif ast.op == "*":
                value = a * b
            elif ast.op == "/":
                value = a / b
            else:
                value = math.pow(a, b)
        except (ValueError, OverflowError, ZeroDivisionError):
            raise NonFiniteError(pretty(ast)) from None
        if not math.isfinite(value):
            raise NonFiniteError(pretty(ast))
        return value
    a = evaluate(ast.arg, env)
    try:
        value = FUNCTIONS[ast.func](a)
    except (ValueError, OverflowError):
        raise NonFiniteError(pretty(ast)) from None
    if not math.isfinite(value):
        raise NonFiniteError(pretty(ast))
    return float(value)


def partial_fd(
    ast: ExprAst, var: str, env: Mapping[str, float], eps: float = 1e-6
) -> float:
    """Central finite-difference estimate of the partial derivative wrt ``var``.

    Uses step h = eps * max(1, |env[var]|), balancing truncation against
    roundoff for doubles at the default eps. Propagates NonFiniteError from
    either one-sided evaluation.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    try:
        x = env[var]
    except KeyError:
        raise UnknownVariableError(var) from None
    h = eps * max(1.0, abs(x))
    hi = dict(env)
    hi[var] = x + h
    lo = dict(env)
    lo[var] = x - h
    return (evaluate(ast, hi) - evaluate(ast, lo)) / (2.0 * h)


def variables_of(ast: ExprAst) -> set[str]:
    """All variable names referenced by the tree."""
    if isinstance(ast, Var):
        return {ast.name}
    if isinstance(ast, Neg):
        return variables_of(ast.operand)
    if isinstance(ast, BinOp):
        return variables_of(ast.left) | variables_of(ast.right)
    if isinstance(ast, Call):
        return variables_of(ast.arg)
    return set()


# ── Compilation for tight solver loops ───────────────────────────────

_COMPILE_NAMESPACE = {
    "sin": math.sin,
    "cos": math.cos,
    "tanh": math.tanh,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
    "pow": math.pow,
    "__builtins__": {},
}

_CALL_NAMES = {"ln": "log"}


def compile_evaluator(
    ast: ExprAst, order: int
) -> Callable[[float, Sequence[float]], float]:
    """Compile the tree to a Python function of (t, y) where y[k] binds xk.

    The generated code performs the same operations in the same order as
    evaluate(), so results are bit-identical; domain failures surface as
    ValueError / OverflowError / ZeroDivisionError (the solver translates
    them). Variables outside t, x0..x{order-1} are rejected here.
    """
    legal = frozenset(state_variables(order))
    for name in variables_of(ast):
        if name not in legal:
            raise UnknownVariableError(name)
    body = _emit(ast)
    source = f"def _compiled(t, y):\n    return {body}\n"
    namespace = dict(_COMPILE_NAMESPACE)
    exec(compile(source, "<expr>", "exec"), namespace)
    return namespace["_compiled"]


def _emit(node: ExprAst) -> str:
    if isinstance(node, Const):
        return f"({node.value!r})"
    if isinstance(node, Var):
        return "t" if node.name == "t" else f"y[{node.name[1:]}]"
    if isinstance(node, Neg):
        return f"(-{_emit(node.operand)})"
    if isinstance(node, BinOp):
        if node.op == "^":
            return f"pow({_emit(node.left)}, {_emit(node.right)})"
        return f"({_emit(node.left)} {node.op} {_emit(node.right)})"
    return f"{_CALL_NAMES.get(node.func, node.func)}({_emit(node.arg)})"
