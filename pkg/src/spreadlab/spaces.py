"""A small expression language for composing norm constructions.

Grammar (whitespace-insensitive)::

    expr := "lp" "(" number ")"
          | "c0"
          | "summing"
          | "james" "(" expr ")"
          | "cjames" "(" expr ")"
          | "max" "(" expr "," expr ")"
          | "schreier_u" "(" expr ")"
          | "schreier_c" "(" expr ["," "grid"] ")"
          | "saturate" "(" expr ["," "levels=" int] ")"

Parsing and elaboration are separate phases: ``parse_space`` builds the AST
and reports syntax errors with a byte offset, ``elaborate`` builds the norm
oracle and reports the violated structural flag when a composition is not
permitted (for example ``cjames`` over a base that is not subsymmetric).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .config import DEFAULT, Config
from .jamesify import JamesifiedNorm
from .oracles import ConfigurationError, LpNorm, MaxNorm, NormOracle, SummingNorm, c0_norm
from .saturate import SaturatedNorm, default_params
from .schreierify import SchreierConditionalNorm, SchreierUnconditionalNorm


class ParseError(ValueError):
    """Syntax error with the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self):
        if self.p != math.inf and self.p < 1:
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")

    def __str__(self) -> str:
        return "lp(inf)" if self.p == math.inf else f"lp({self.p:g})"


@dataclass(frozen=True)
class C0:
    def __str__(self) -> str:
        return "c0"


@dataclass(frozen=True)
class Summing:
    def __str__(self) -> str:
        return "summing"


@dataclass(frozen=True)
class James:
    inner: "SpaceExpr"

    def __str__(self) -> str:
        return f"james({self.inner})"


@dataclass(frozen=True)
class CJames:
    inner: "SpaceExpr"

    def __str__(self) -> str:
        return f"cjames({self.inner})"


@dataclass(frozen=True)
class Max:
    left: "SpaceExpr"
    right: "SpaceExpr"

    def __str__(self) -> str:
        return f"max({self.left}, {self.right})"


@dataclass(frozen=True)
class SchreierU:
    inner: "SpaceExpr"

    def __str__(self) -> str:
        return f"schreier_u({self.inner})"


@dataclass(frozen=True)
class SchreierC:
    inner: "SpaceExpr"
    grid: bool = False

    def __str__(self) -> str:
        return f"schreier_c({self.inner}, grid)" if self.grid else f"schreier_c({self.inner})"


@dataclass(frozen=True)
class Saturate:
    base: "SpaceExpr"
    levels: int = 8

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")

    def __str__(self) -> str:
        return f"saturate({self.base}, levels={self.levels})"


SpaceExpr = Union[Lp, C0, Summing, James, CJames, Max, SchreierU, SchreierC, Saturate]


_NUMBER = re.compile(r"(inf|[0-9]+(?:\.[0-9]+)?)")
_NAME = re.compile(r"[a-z_0-9]+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def name(self) -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number or 'inf'")
        self.pos = m.end()
        return math.inf if m.group() == "inf" else float(m.group())

    def integer(self) -> int:
        self.skip_ws()
        m = re.compile(r"[0-9]+").match(self.text, self.pos)
        if not m:
            raise self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def expr(self) -> SpaceExpr:
        start = self.pos
        head = self.name()
        if head == "c0":
            return C0()
        if head == "summing":
            return Summing()
        if head == "lp":
            self.expect("(")
            p = self.number()
            try:
                node = Lp(p)
            except ValueError as exc:
                self.pos = start
                raise self.error(str(exc)) from exc
            self.expect(")")
            return node
        if head in ("james", "cjames", "schreier_u"):
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return {"james": James, "cjames": CJames, "schreier_u": SchreierU}[head](inner)
        if head == "max":
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return Max(left, right)
        if head == "schreier_c":
            self.expect("(")
            inner = self.expr()
            grid = False
            if self.peek(","):
                self.expect(",")
                if self.name() != "grid":
                    raise self.error("expected 'grid'")
                grid = True
            self.expect(")")
            return SchreierC(inner, grid)
        if head == "saturate":
            self.expect("(")
            base = self.expr()
            levels = 8
            if self.peek(","):
                self.expect(",")
                self.expect("levels=")
                levels = self.integer()
            self.expect(")")
            try:
                return Saturate(base, levels)
            except ValueError as exc:
                self.pos = start
                raise self.error(str(exc)) from exc
        self.pos = start
        raise self.error(f"unknown space constructor {head!r}")


def parse_space(text: str) -> SpaceExpr:
    """Parse a space expression; raises ParseError with a byte offset."""
    parser = _Parser(text)
    node = parser.expr()
    parser.skip_ws()
    if parser.pos != len(text):
        raise parser.error("trailing input")
    return node


def print_space(expr: SpaceExpr) -> str:
    return str(expr)


def elaborate(expr: SpaceExpr, cfg: Config = DEFAULT) -> NormOracle:
    """Build the norm oracle for an AST, checking structural flags.

    Raises ConfigurationError naming the missing flag when a composition is
    not permitted.
    """
    if isinstance(expr, Lp):
        return LpNorm(expr.p)
    if isinstance(expr, C0):
        return c0_norm()
    if isinstance(expr, Summing):
        return SummingNorm()
    if isinstance(expr, (James, CJames)):
        inner = elaborate(expr.inner, cfg)
        try:
            inner.flags.require("unconditional_1", "spreading_1")
        except ConfigurationError as exc:
            raise ConfigurationError(
                f"{type(expr).__name__.lower()} needs a subsymmetric base: {exc}"
            ) from exc
        mode = "gaps" if isinstance(expr, James) else "consecutive"
        return JamesifiedNorm(inner, mode, cfg)
    if isinstance(expr, Max):
        return MaxNorm(elaborate(expr.left, cfg), elaborate(expr.right, cfg))
    if isinstance(expr, SchreierU):
        inner = elaborate(expr.inner, cfg)
        inner.flags.require("unconditional_1", "spreading_1", "suppression_unconditional")
        return SchreierUnconditionalNorm(inner, cfg)
    if isinstance(expr, SchreierC):
        inner = elaborate(expr.inner, cfg)
        inner.flags.require("bimonotone", "esa")
        return SchreierConditionalNorm(inner, "grid" if expr.grid else "ideal", cfg=cfg)
    if isinstance(expr, Saturate):
        base = elaborate(expr.base, cfg)
        return SaturatedNorm(base, default_params(expr.levels), cfg)
    raise TypeError(f"not a space expression: {expr!r}")


def space_oracle(text: str, cfg: Config = DEFAULT) -> NormOracle:
    """Parse and elaborate in one step."""
    return elaborate(parse_space(text), cfg)
