"""The flow-condition language: lexer, parser, canonical printer, evaluator.

Conditions guard the arrows between canvas nodes.  The language is total
(every parsed condition evaluates to a boolean for every outcome) and small
enough to be built from structured pickers in a child-facing UI:

    cond  := or
    or    := and ("or" and)*
    and   := unary ("and" unary)*
    unary := "not" unary | atom
    atom  := "(" cond ")" | "completed" | metric cmp number

Metrics are ``score``, ``attempts`` and ``duration``; comparators are
``>= > <= < == !=``.  Keywords are case-insensitive and whitespace is
insignificant.  Score literals must lie in [0, 100].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import CanvasError

METRICS = ("score", "attempts", "duration")
OPERATORS = (">=", ">", "<=", "<", "==", "!=")
KEYWORDS = ("and", "or", "not", "completed") + METRICS

MAX_SOURCE_LENGTH = 4096
MAX_DEPTH = 32

# Recursion guard for the descent itself; redundant parentheses may nest
# beyond any legal tree depth, but not unboundedly.
_MAX_PARSER_NESTING = 160

# OutcomeRecord attribute each metric reads (duck-typed so this module has
# no dependency on the domain model).
_METRIC_ATTRS = {
    "score": "score_percent",
    "attempts": "attempts",
    "duration": "duration_seconds",
}


@dataclass(frozen=True)
class Comparison:
    """``metric cmp literal``, e.g. score >= 80."""

    metric: str
    op: str
    value: Union[int, float]


@dataclass(frozen=True)
class Completed:
    """True when the outcome's completed flag is set."""


@dataclass(frozen=True)
class Not:
    child: "Condition"


@dataclass(frozen=True)
class And:
    children: tuple["Condition", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Condition", ...]


Condition = Union[Comparison, Completed, Not, And, Or]


@dataclass(frozen=True)
class ParseDiagnostic:
    """Position and hint for a syntax error, 1-based line/column."""

    line: int
    column: int
    message: str
    expected: Optional[str] = None

    def describe(self) -> str:
        hint = f" (expected {self.expected})" if self.expected else ""
        return f"{self.line}:{self.column}: {self.message}{hint}"


class ConditionSyntaxError(CanvasError):
    code = "ConditionSyntax"

    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.describe())
        self.diagnostic = diagnostic


class InvalidCondition(CanvasError):
    """A programmatically built condition violates a structural invariant."""

    code = "InvalidCondition"


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | op | number | lparen | rparen | end
    text: str
    line: int
    column: int
    value: Union[int, float, None] = None


def _fail(line: int, column: int, message: str, expected: Optional[str] = None):
    raise ConditionSyntaxError(ParseDiagnostic(line, column, message, expected))


def _tokenize(source: str) -> list[_Token]:
    if len(source) > MAX_SOURCE_LENGTH:
        _fail(1, 1, f"condition source exceeds {MAX_SOURCE_LENGTH} characters")
    tokens: list[_Token] = []
    line, column = 1, 1
    i = 0
    while i < len(source):
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            column = 1
            continue
        if ch.isspace():
            i += 1
            column += 1
            continue
        if ch == "(":
            tokens.append(_Token("lparen", "(", line, column))
            i += 1
            column += 1
            continue
        if ch == ")":
            tokens.append(_Token("rparen", ")", line, column))
            i += 1
            column += 1
            continue
        if ch.isalpha():
            start = i
            while i < len(source) and (source[i].isalpha() or source[i].isdigit()):
                i += 1
            word = source[start:i]
            tokens.append(_Token("ident", word.lower(), line, column))
            column += i - start
            continue
        if ch.isdigit():
            start = i
            while i < len(source) and source[i].isdigit():
                i += 1
            if i < len(source) and source[i] == ".":
                i += 1
                if i >= len(source) or not source[i].isdigit():
                    _fail(line, column + (i - start), "malformed number", "digit after decimal point")
                while i < len(source) and source[i].isdigit():
                    i += 1
            text = source[start:i]
            value: Union[int, float] = float(text) if "." in text else int(text)
            tokens.append(_Token("number", text, line, column, value))
            column += i - start
            continue
        two = source[i : i + 2]
        if two in (">=", "<=", "==", "!="):
            tokens.append(_Token("op", two, line, column))
            i += 2
            column += 2
            continue
        if ch in ("<", ">"):
            tokens.append(_Token("op", ch, line, column))
            i += 1
            column += 1
            continue
        _fail(line, column, f"unexpected character {ch!r}")
    tokens.append(_Token("end", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0
        self._depth = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _expect_end(self):
        tok = self._peek()
        if tok.kind != "end":
            _fail(tok.line, tok.column, f"unexpected {tok.text!r} after complete condition")

    def _enter(self, tok: _Token):
        self._depth += 1
        if self._depth > _MAX_PARSER_NESTING:
            _fail(tok.line, tok.column, "condition nests too deeply")

    def _leave(self):
        self._depth -= 1

    def parse(self) -> Condition:
        cond = self._or()
        self._expect_end()
        if tree_depth(cond) > MAX_DEPTH:
            _fail(1, 1, f"condition tree deeper than {MAX_DEPTH} levels")
        return cond

    def _or(self) -> Condition:
        self._enter(self._peek())
        children = [self._and()]
        while self._peek().kind == "ident" and self._peek().text == "or":
            self._advance()
            children.append(self._and())
        self._leave()
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _and(self) -> Condition:
        self._enter(self._peek())
        children = [self._unary()]
        while self._peek().kind == "ident" and self._peek().text == "and":
            self._advance()
            children.append(self._unary())
        self._leave()
        return children[0] if len(children) == 1 else And(tuple(children))

    def _unary(self) -> Condition:
        tok = self._peek()
        if tok.kind == "ident" and tok.text == "not":
            self._advance()
            self._enter(tok)
            child = self._unary()
            self._leave()
            return Not(child)
        return self._atom()

    def _atom(self) -> Condition:
        tok = self._advance()
        if tok.kind == "lparen":
            self._enter(tok)
            inner = self._or()
            self._leave()
            closing = self._advance()
            if closing.kind != "rparen":
                _fail(closing.line, closing.column, "unclosed parenthesis", "')'")
            return inner
        if tok.kind == "ident":
            if tok.text == "completed":
                return Completed()
            if tok.text in METRICS:
                return self._comparison(tok)
            _fail(tok.line, tok.column, f"unknown word {tok.text!r}",
                  "'completed', 'not', '(' or a metric name")
        _fail(tok.line, tok.column,
              "expected the start of a condition" if tok.kind == "end"
              else f"unexpected {tok.text!r}",
              "'completed', 'not', '(' or a metric name")

    def _comparison(self, metric_tok: _Token) -> Comparison:
        op_tok = self._advance()
        if op_tok.kind != "op":
            _fail(op_tok.line, op_tok.column,
                  f"expected a comparator after {metric_tok.text!r}",
                  "one of " + " ".join(OPERATORS))
        num_tok = self._advance()
        if num_tok.kind != "number":
            _fail(num_tok.line, num_tok.column,
                  "expected a number" if num_tok.kind == "end"
                  else f"expected a number, found {num_tok.text!r}",
                  "number")
        value = num_tok.value
        if metric_tok.text == "score" and not 0 <= value <= 100:
            _fail(num_tok.line, num_tok.column,
                  f"score literal {num_tok.text} outside [0, 100]")
        return Comparison(metric_tok.text, op_tok.text, value)


def parse(source: str) -> Condition:
    """Parse condition source text; raises ConditionSyntaxError with a
    position-bearing diagnostic on any lexical or syntax error."""
    return _Parser(_tokenize(source)).parse()


def tree_depth(condition: Condition) -> int:
    if isinstance(condition, (Completed, Comparison)):
        return 1
    if isinstance(condition, Not):
        return 1 + tree_depth(condition.child)
    return 1 + max(tree_depth(child) for child in condition.children)


def _format_number(value: Union[int, float]) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value)


# Precedence: or < and < not < atoms.  A child prints parenthesized when its
# binding is too loose for its context, including equal-precedence nesting
# (an And directly inside an And would otherwise flatten on re-parse).
_PRECEDENCE = {Or: 1, And: 2, Not: 3, Comparison: 4, Completed: 4}


def unparse(condition: Condition) -> str:
    """Canonical source text; parse(unparse(c)) is structurally equal to c."""

    def prec(c: Condition) -> int:
        return _PRECEDENCE[type(c)]

    def render(c: Condition, parent_prec: int) -> str:
        if isinstance(c, Completed):
            text = "completed"
        elif isinstance(c, Comparison):
            text = f"{c.metric} {c.op} {_format_number(c.value)}"
        elif isinstance(c, Not):
            # "not" admits equal-precedence children (not not x) unchanged.
            text = "not " + render(c.child, prec(c) - 1)
        elif isinstance(c, (And, Or)):
            word = " and " if isinstance(c, And) else " or "
            text = word.join(render(child, prec(c)) for child in c.children)
        else:
            raise InvalidCondition(f"not a condition node: {c!r}")
        if prec(c) <= parent_prec:
            return f"({text})"
        return text

    return render(condition, 0)


def validate(condition: Condition, _depth: int = 1) -> None:
    """Check the structural invariants of a programmatically built tree;
    raises InvalidCondition.  Parsed trees satisfy these by construction."""
    if _depth > MAX_DEPTH:
        raise InvalidCondition(f"condition nests deeper than {MAX_DEPTH} levels")
    if isinstance(condition, Completed):
        return
    if isinstance(condition, Comparison):
        if condition.metric not in METRICS:
            raise InvalidCondition(f"unknown metric {condition.metric!r}")
        if condition.op not in OPERATORS:
            raise InvalidCondition(f"unknown comparator {condition.op!r}")
        if isinstance(condition.value, bool) or not isinstance(condition.value, (int, float)):
            raise InvalidCondition(f"literal {condition.value!r} is not a number")
        if not math.isfinite(condition.value):
            raise InvalidCondition(f"literal {condition.value!r} is not finite")
        if condition.metric == "score" and not 0 <= condition.value <= 100:
            raise InvalidCondition(f"score literal {condition.value!r} outside [0, 100]")
        return
    if isinstance(condition, Not):
        validate(condition.child, _depth + 1)
        return
    if isinstance(condition, (And, Or)):
        if len(condition.children) < 2:
            raise InvalidCondition("and/or need at least two operands")
        for child in condition.children:
            validate(child, _depth + 1)
        return
    raise InvalidCondition(f"not a condition node: {condition!r}")


def evaluate(condition: Condition, outcome) -> bool:
    """Evaluate against an outcome record (anything exposing score_percent,
    attempts, duration_seconds and completed).  Total: always a boolean."""
    if isinstance(condition, Completed):
        return bool(outcome.completed)
    if isinstance(condition, Comparison):
        actual = getattr(outcome, _METRIC_ATTRS[condition.metric])
        expected = condition.value
        if condition.op == ">=":
            return actual >= expected
        if condition.op == ">":
            return actual > expected
        if condition.op == "<=":
            return actual <= expected
        if condition.op == "<":
            return actual < expected
        if condition.op == "==":
            return actual == expected
        return actual != expected
    if isinstance(condition, Not):
        return not evaluate(condition.child, outcome)
    if isinstance(condition, And):
        return all(evaluate(child, outcome) for child in condition.children)
    if isinstance(condition, Or):
        return any(evaluate(child, outcome) for child in condition.children)
    raise InvalidCondition(f"not a condition node: {condition!r}")
