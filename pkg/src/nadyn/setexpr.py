"""Parser for the set-expression language used on the command line.

::

    expr   := term { ("+" | "-") term }
    term   := factor { "&" factor }
    factor := "~" factor | atom
    atom   := "U:" digits | "ALL" | "EMPTY" | "(" expr ")"

``+`` is union, ``-`` difference, ``&`` intersection, ``~`` complement.
"""
from __future__ import annotations

from .shift import DIGITS, ClopenSet, check_alphabet, cylinder


class SetExprError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str, p: int):
        self.text = text
        self.p = p
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, token: str) -> bool:
        self.skip()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def parse(self) -> ClopenSet:
        result = self.expr()
        if self.peek():
            raise SetExprError(f"unexpected {self.peek()!r}", self.pos)
        return result

    def expr(self) -> ClopenSet:
        left = self.term()
        while True:
            if self.accept("+"):
                left = left | self.term()
            elif self.accept("-"):
                left = left - self.term()
            else:
                return left

    def term(self) -> ClopenSet:
        left = self.factor()
        while self.accept("&"):
            left = left & self.factor()
        return left

    def factor(self) -> ClopenSet:
        if self.accept("~"):
            return self.factor().complement()
        return self.atom()

    def atom(self) -> ClopenSet:
        start = self.pos
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                raise SetExprError("expected ')'", self.pos)
            return inner
        if self.accept("ALL"):
            return ClopenSet.full(self.p)
        if self.accept("EMPTY"):
            return ClopenSet.empty(self.p)
        if self.accept("U:"):
            word = []
            while self.pos < len(self.text) and self.text[self.pos].lower() in DIGITS:
                d = DIGITS.index(self.text[self.pos].lower())
                if d >= self.p:
                    raise ValueError(
                        f"digit {self.text[self.pos]!r} at position {self.pos} "
                        f"is not a base-{self.p} symbol")
                word.append(d)
                self.pos += 1
            return cylinder(word, self.p)
        self.skip()
        raise SetExprError("expected 'U:', 'ALL', 'EMPTY' or '('", max(start, self.pos))


def parse_set_expr(text: str, p: int) -> ClopenSet:
    check_alphabet(p)
    return _Parser(text, p).parse()


def parse_set_list(text: str, p: int) -> list[ClopenSet]:
    """``|``-separated list of expressions (partitions and covers)."""
    return [parse_set_expr(part, p) for part in text.split("|")]
