"""Plain-text experiment description language: parser and serializer.

One statement per line, ``#`` starts a comment.  Statements:

    crystal <pA>:<m> <pB>:<m> [g=<float>] [modes=<m1,m2,...>]
    shift <path> <int>
    phase <path> <float>
    misalign <path> T=<float>
    relabel <p1> <p2>
    detectors <p> <p> ...
    order <int>
    pairs <int>

Mode tokens are integers or the polarization aliases H (0) and V (1).
Parsing collects every problem in one pass and reports each with its
line, column, and length.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .elements import (
    Crystal,
    Element,
    Misalignment,
    ModeShifter,
    MultimodeCrystal,
    PhaseShifter,
    Relabel,
)
from .experiment import Experiment
from .fock import ModeLabel

_MODE_ALIASES = {"H": 0, "V": 1}


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    length: int


@dataclass(frozen=True)
class ParseIssue:
    span: SourceSpan
    message: str
    expected: str = ""

    def __str__(self) -> str:
        suffix = f" (expected {self.expected})" if self.expected else ""
        return f"{self.span.line}:{self.span.column}: {self.message}{suffix}"


class ExperimentParseError(ValueError):
    """Raised with the full list of issues found in one parsing pass."""

    def __init__(self, issues: list[ParseIssue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


@dataclass(frozen=True)
class _Token:
    text: str
    span: SourceSpan


def _tokenize(line: str, line_no: int) -> list[_Token]:
    stripped = line.split("#", 1)[0]
    return [
        _Token(m.group(0), SourceSpan(line_no, m.start() + 1, len(m.group(0))))
        for m in re.finditer(r"\S+", stripped)
    ]


class _LineParser:
    """Statement-level parsing with issue collection."""

    def __init__(self):
        self.issues: list[ParseIssue] = []
        self.elements: list[Element] = []
        self.detectors: tuple[str, ...] | None = None
        self.detectors_span: SourceSpan | None = None
        self.order: int | None = None
        self.pairs: int | None = None

    def fail(self, token: _Token, message: str, expected: str = "") -> None:
        self.issues.append(ParseIssue(token.span, message, expected))

    def parse_line(self, tokens: list[_Token]) -> None:
        keyword = tokens[0]
        handler = {
            "crystal": self._crystal,
            "shift": self._shift,
            "phase": self._phase,
            "misalign": self._misalign,
            "relabel": self._relabel,
            "detectors": self._detectors,
            "order": self._order,
            "pairs": self._pairs,
        }.get(keyword.text)
        if handler is None:
            self.fail(keyword, f"unknown keyword {keyword.text!r}",
                      "crystal, shift, phase, misalign, relabel, detectors, order, pairs")
            return
        handler(tokens)

    # -- helpers ---------------------------------------------------------

    def _want(self, tokens: list[_Token], count: int, usage: str) -> bool:
        if len(tokens) - 1 < count:
            self.fail(tokens[0], f"statement needs {count} argument(s)", usage)
            return False
        return True

    def _int(self, token: _Token) -> int | None:
        try:
            return int(token.text)
        except ValueError:
            self.fail(token, f"malformed integer {token.text!r}", "an integer")
            return None

    def _float(self, token: _Token, text: str | None = None) -> float | None:
        raw = token.text if text is None else text
        try:
            return float(raw)
        except ValueError:
            self.fail(token, f"malformed number {raw!r}", "a number")
            return None

    def _mode(self, token: _Token, text: str) -> int | None:
        if text in _MODE_ALIASES:
            return _MODE_ALIASES[text]
        try:
            return int(text)
        except ValueError:
            self.fail(token, f"malformed mode {text!r}", "an integer, H, or V")
            return None

    def _labeled(self, token: _Token) -> ModeLabel | None:
        path, sep, mode_text = token.text.partition(":")
        if not sep or not path:
            self.fail(token, f"expected path:mode, got {token.text!r}", "path:mode")
            return None
        mode = self._mode(token, mode_text)
        if mode is None:
            return None
        return ModeLabel(path, mode)

    # -- statements ---------------------------------------------------------

    def _crystal(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 2, "crystal pA:m pB:m [g=x] [modes=i,j,...]"):
            return
        label_a = self._labeled(tokens[1])
        label_b = self._labeled(tokens[2])
        g = 0.1
        modes: tuple[int, ...] | None = None
        ok = label_a is not None and label_b is not None
        for token in tokens[3:]:
            key, sep, value = token.text.partition("=")
            if key == "g" and sep:
                parsed = self._float(token, value)
                if parsed is None:
                    ok = False
                else:
                    g = parsed
            elif key == "modes" and sep:
                items = []
                for piece in value.split(","):
                    mode = self._mode(token, piece)
                    if mode is None:
                        ok = False
                        break
                    items.append(mode)
                else:
                    modes = tuple(items)
            else:
                self.fail(token, f"unknown crystal option {token.text!r}", "g=<float> or modes=<list>")
                ok = False
        if not ok:
            return
        try:
            if modes is None:
                self.elements.append(Crystal(label_a, label_b, g=g))
            else:
                self.elements.append(
                    MultimodeCrystal(label_a.path, label_b.path, modes=modes, g=g)
                )
        except ValueError as exc:
            self.fail(tokens[0], str(exc))

    def _shift(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 2, "shift <path> <int>"):
            return
        delta = self._int(tokens[2])
        if delta is not None:
            self.elements.append(ModeShifter(tokens[1].text, delta))

    def _phase(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 2, "phase <path> <float>"):
            return
        phi = self._float(tokens[2])
        if phi is not None:
            self.elements.append(PhaseShifter(tokens[1].text, phi))

    def _misalign(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 2, "misalign <path> T=<float>"):
            return
        key, sep, value = tokens[2].text.partition("=")
        if key != "T" or not sep:
            self.fail(tokens[2], f"expected T=<float>, got {tokens[2].text!r}", "T=<float>")
            return
        t = self._float(tokens[2], value)
        if t is None:
            return
        try:
            self.elements.append(Misalignment(tokens[1].text, t))
        except ValueError as exc:
            self.fail(tokens[2], str(exc))

    def _relabel(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 2, "relabel <from> <to>"):
            return
        self.elements.append(Relabel(tokens[1].text, tokens[2].text))

    def _detectors(self, tokens: list[_Token]) -> None:
        if self.detectors is not None:
            self.fail(tokens[0], "duplicate detectors line")
            return
        if len(tokens) < 2:
            self.fail(tokens[0], "detectors line lists no paths", "detectors <p> <p> ...")
            return
        paths = tuple(t.text for t in tokens[1:])
        for i, token in enumerate(tokens[1:]):
            if token.text in paths[:i]:
                self.fail(token, f"duplicate detector path {token.text!r}")
                return
        self.detectors = paths
        self.detectors_span = tokens[0].span

    def _order(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 1, "order <int>"):
            return
        value = self._int(tokens[1])
        if value is None:
            return
        if value < 1:
            self.fail(tokens[1], "expansion order must be >= 1")
            return
        self.order = value

    def _pairs(self, tokens: list[_Token]) -> None:
        if not self._want(tokens, 1, "pairs <int>"):
            return
        value = self._int(tokens[1])
        if value is None:
            return
        if value < 0:
            self.fail(tokens[1], "pair budget must be >= 0")
            return
        self.pairs = value


def parse(text: str) -> Experiment:
    """Parse a full description; raises with every issue found."""
    parser = _LineParser()
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(line, line_no)
        if tokens:
            parser.parse_line(tokens)
    if parser.detectors is None:
        parser.issues.append(
            ParseIssue(SourceSpan(1, 1, 1), "missing detectors statement", "detectors <p> ...")
        )
    if parser.issues:
        raise ExperimentParseError(parser.issues)
    return Experiment(
        elements=tuple(parser.elements),
        detectors=parser.detectors,
        max_pairs=parser.pairs,
        expansion_order=parser.order if parser.order is not None else 2,
    )


def _format_float(value: float) -> str:
    return repr(value)


def serialize(exp: Experiment) -> str:
    """Canonical text for an experiment; parsing it back is the identity."""
    lines = []
    if exp.expansion_order != 2:
        lines.append(f"order {exp.expansion_order}")
    if exp.max_pairs is not None:
        lines.append(f"pairs {exp.max_pairs}")
    lines.append("detectors " + " ".join(exp.detectors))
    for element in exp.elements:
        if isinstance(element, Crystal):
            line = (
                f"crystal {element.out_a.path}:{element.out_a.mode}"
                f" {element.out_b.path}:{element.out_b.mode}"
            )
            if element.g != 0.1:
                line += f" g={_format_float(element.g)}"
            lines.append(line)
        elif isinstance(element, MultimodeCrystal):
            line = (
                f"crystal {element.path_a}:0 {element.path_b}:0"
                f" g={_format_float(element.g)}"
                f" modes={','.join(str(m) for m in element.modes)}"
            )
            lines.append(line)
        elif isinstance(element, ModeShifter):
            lines.append(f"shift {element.path} {element.delta}")
        elif isinstance(element, PhaseShifter):
            lines.append(f"phase {element.path} {_format_float(element.phi)}")
        elif isinstance(element, Misalignment):
            lines.append(f"misalign {element.path} T={_format_float(element.transmissivity)}")
        elif isinstance(element, Relabel):
            lines.append(f"relabel {element.source} {element.target}")
        else:
            raise TypeError(f"cannot serialize {element!r}")
    return "\n".join(lines) + "\n"
