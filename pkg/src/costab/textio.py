"""Sectioned text files: ``[name]`` headers followed by content lines.

Blank lines and ``#`` comments are ignored. Every content line keeps its
1-based line number so parse errors can point at it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class Sections:
    path: str | None = None
    order: list[str] = field(default_factory=list)
    lines: dict[str, list[tuple[int, str]]] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.lines

    def get(self, name: str) -> list[tuple[int, str]]:
        return self.lines.get(name, [])

    def require(self, name: str) -> list[tuple[int, str]]:
        if name not in self.lines:
            raise ParseError(f"missing section [{name}]", path=self.path)
        return self.lines[name]

    def keyvalues(self, name: str) -> dict[str, tuple[int, str]]:
        out = {}
        for no, text in self.get(name):
            if "=" not in text:
                raise ParseError(f"expected 'key = value', got {text!r}", no, self.path)
            k, v = text.split("=", 1)
            out[k.strip()] = (no, v.strip())
        return out

    def error(self, message: str, line: int | None = None) -> ParseError:
        return ParseError(message, line, self.path)


def parse_sections(text: str, path: str | None = None) -> Sections:
    s = Sections(path=path)
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in s.lines:
                raise ParseError(f"duplicate section [{current}]", no, path)
            s.order.append(current)
            s.lines[current] = []
            continue
        if current is None:
            raise ParseError("content before first section header", no, path)
        s.lines[current].append((no, line))
    return s


def read_sections(path) -> Sections:
    p = Path(path)
    return parse_sections(p.read_text(encoding="utf-8"), str(p))


def format_sections(sections: list[tuple[str, list[str]]], header: str | None = None) -> str:
    out = []
    if header:
        out.append(f"# {header}")
    for name, lines in sections:
        out.append(f"[{name}]")
        out.extend(lines)
        out.append("")
    return "\n".join(out)


def parse_number(text: str, line: int | None = None, path: str | None = None):
    """Exact rational for ``a/b`` or integer literals, float for decimals."""
    t = text.strip()
    try:
        if "/" in t:
            num, den = t.split("/")
            return Fraction(int(num), int(den))
        if all(c in "+-0123456789" for c in t):
            return Fraction(int(t))
        return float(t)
    except ValueError:
        raise ParseError(f"malformed number {text.strip()!r}", line, path) from None


def format_number(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))
