"""Low-level character scanning helpers shared by the LaTeX modules."""

from __future__ import annotations


def read_command(text: str, i: int) -> tuple[str, int]:
    """Read the control sequence starting at ``text[i] == '\\'``.

    Returns the name (without backslash) and the index just past it. A
    control word is a run of letters; anything else is a one-char control
    symbol such as ``\\\\`` or ``\\&``.
    """
    j = i + 1
    if j >= len(text):
        return "", j
    if not text[j].isalpha():
        return text[j], j + 1
    while j < len(text) and text[j].isalpha():
        j += 1
    return text[i + 1 : j], j


def skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def read_group(text: str, i: int, open_: str = "{", close: str = "}") -> tuple[str, int]:
    """Read a balanced group whose opening delimiter is at ``text[i]``.

    Returns the inner text and the index after the closing delimiter.
    Raises ValueError when the group never closes.
    """
    assert text[i] == open_
    depth = 0
    j = i
    while j < len(text):
        ch = text[j]
        if ch == "\\":
            j += 2
            continue
        if ch == open_:
            depth += 1
        elif ch == close:
            depth -= 1
            if depth == 0:
                return text[i + 1 : j], j + 1
        elif open_ != "{" and ch == "{":
            # square-bracket args may contain braced material with ']' inside
            _, j = read_group(text, j)
            continue
        j += 1
    raise ValueError(f"unbalanced {open_!r} at offset {i}")


def read_optional(text: str, i: int) -> tuple[str | None, int]:
    """Read an optional ``[...]`` argument if one follows (after spaces)."""
    j = skip_ws(text, i)
    if j < len(text) and text[j] == "[":
        inner, end = read_group(text, j, "[", "]")
        return inner, end
    return None, i


def read_arg(text: str, i: int) -> tuple[str, int]:
    """Read a mandatory argument: a braced group or a single token."""
    j = skip_ws(text, i)
    if j >= len(text):
        raise ValueError(f"missing argument at offset {i}")
    if text[j] == "{":
        return read_group(text, j)
    if text[j] == "\\":
        _, end = read_command(text, j)
        return text[j:end], end
    return text[j], j + 1


def strip_comments(text: str) -> str:
    """Drop ``%`` comments up to (not including) the end of line."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            out.append(text[i : i + 2])
            i += 2
        elif ch == "%":
            while i < n and text[i] != "\n":
                i += 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)
