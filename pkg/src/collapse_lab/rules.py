"""Parameter rules over the sequence index ``i``.

A rule is a comma-separated list of products such as ``1``, ``1/i``,
``1/i^2``, ``2*pi/i`` or ``0.5*i/i^3``. Only numbers, ``pi``, ``i`` with an
optional integer power (``i^2``, ``i**2``, ``i²``), ``*`` and ``/`` are
understood; there is no general expression evaluator.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

_SUPERSCRIPTS = {"²": 2, "³": 3, "⁴": 4}
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<pi>pi)|(?P<var>i)(?:(?:\^|\*\*)(?P<pow>\d+)|(?P<sup>[²³⁴]))?"
    r"|(?P<op>[*/]))"
)


class RuleSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class _Factor:
    const: float
    power: int  # exponent of i


def _parse_product(text: str) -> _Factor:
    pos, const, power = 0, 1.0, 0
    op = "*"
    expect_operand = True
    text = text.strip()
    if not text:
        raise RuleSyntaxError("empty expression in rule")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise RuleSyntaxError(f"cannot parse {text[pos:]!r} in rule term {text!r}")
        pos = m.end()
        if m.group("op"):
            if expect_operand:
                raise RuleSyntaxError(f"dangling operator in {text!r}")
            op, expect_operand = m.group("op"), True
            continue
        if not expect_operand:
            raise RuleSyntaxError(f"missing operator in {text!r}")
        if m.group("num") is not None:
            c, p = float(m.group("num")), 0
        elif m.group("pi"):
            c, p = math.pi, 0
        else:
            c = 1.0
            if m.group("pow"):
                p = int(m.group("pow"))
            elif m.group("sup"):
                p = _SUPERSCRIPTS[m.group("sup")]
            else:
                p = 1
        if op == "*":
            const, power = const * c, power + p
        else:
            if c == 0.0:
                raise RuleSyntaxError(f"division by zero in {text!r}")
            const, power = const / c, power - p
        expect_operand = False
    if expect_operand:
        raise RuleSyntaxError(f"expression {text!r} ends with an operator")
    return _Factor(const, power)


@dataclass(frozen=True)
class Rule:
    """A parsed rule mapping an index to a tuple of parameters."""

    text: str
    factors: tuple[_Factor, ...]

    def __call__(self, i: int) -> tuple[float, ...]:
        return tuple(f.const * float(i) ** f.power for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def parse_rule(text: str) -> Rule:
    if not isinstance(text, str) or not text.strip():
        raise RuleSyntaxError("rule must be a nonempty string")
    return Rule(text, tuple(_parse_product(part) for part in text.split(",")))


def parse_range(text: str) -> tuple[int, int]:
    """``"10:100"`` -> (10, 100), inclusive and nonempty."""
    m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+)\s*", text)
    if not m:
        raise RuleSyntaxError(f"index range must look like 'lo:hi', got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo < 1 or hi < lo:
        raise RuleSyntaxError(f"index range {text!r} is empty or starts below 1")
    return lo, hi
