"""Strip references, colours and presentation-only commands from tabulars."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ._scan import read_arg, read_command, read_optional
from .extract import TabularSource

# Commands the cleaner must never remove, whatever the strip-list says.
STRUCTURAL = frozenset(
    {"multirow", "multicolumn", "hline", "cline", "begin", "end", "\\", "&"}
)


@dataclass(frozen=True)
class StripRule:
    name: str
    nargs: int = 0
    keep_last: bool = False


def parse_strip_list(text: str) -> dict[str, StripRule]:
    rules: dict[str, StripRule] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        name = parts[0].lstrip("\\")
        nargs = 0
        keep_last = False
        for extra in parts[1:]:
            if extra == "keep-last":
                keep_last = True
            elif extra.isdigit():
                nargs = int(extra)
            else:
                raise ValueError(f"strip-list line {lineno}: unexpected field {extra!r}")
        if keep_last and nargs == 0:
            raise ValueError(f"strip-list line {lineno}: keep-last needs at least one argument")
        if name in STRUCTURAL:
            raise ValueError(f"strip-list line {lineno}: {name!r} is structural")
        rules[name] = StripRule(name, nargs, keep_last)
    return rules


def load_strip_list(path: str | Path | None = None) -> dict[str, StripRule]:
    """Load a strip-list file; ``None`` loads the packaged default."""
    if path is None:
        text = resources.files("tabreward.latex").joinpath("default_strip.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return parse_strip_list(text)


DEFAULT_STRIP = load_strip_list()


def _clean_once(text: str, rules: dict[str, StripRule]) -> str:
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] != "\\":
            out.append(text[i])
            i += 1
            continue
        name, j = read_command(text, i)
        rule = rules.get(name)
        if rule is None:
            out.append(text[i:j])
            i = j
            continue
        try:
            if j < n and text[j] == "*":
                j += 1
            _, j = read_optional(text, j)
            args = []
            for _ in range(rule.nargs):
                arg, j = read_arg(text, j)
                args.append(arg)
                _, j = read_optional(text, j)
        except ValueError:
            # malformed arguments: leave the command alone
            out.append(text[i : i + 1 + len(name)])
            i += 1 + len(name)
            continue
        if rule.nargs == 0:
            # a control word swallows the spaces that terminate it
            while j < n and text[j] in " \t":
                j += 1
        if rule.keep_last:
            out.append(args[-1])
        i = j
    return "".join(out)


def clean_text(text: str, rules: dict[str, StripRule] | None = None) -> str:
    rules = DEFAULT_STRIP if rules is None else rules
    # removing one command can splice two fragments into a new strippable
    # command, so iterate to a fixed point
    for _ in range(100):
        new = _clean_once(text, rules)
        if new == text:
            return new
        text = new
    return text


def clean(source: TabularSource | str, rules: dict[str, StripRule] | None = None) -> TabularSource:
    """Return ``source`` with strip-listed commands removed.

    ``\\textcolor{red}{5}``-style wrappers (``keep-last`` rules) are replaced
    by their last argument. Structural commands are never touched. The
    result is a fixed point: ``clean(clean(x)) == clean(x)``.
    """
    if isinstance(source, str):
        source = TabularSource(source)
    return TabularSource(clean_text(source.raw, rules), source.origin, source.offset)
