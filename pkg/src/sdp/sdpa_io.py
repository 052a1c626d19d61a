"""
SDPA sparse format (.dat-s).

    line 1   m
    line 2   number of blocks
    line 3   block sizes, negative for diagonal blocks
    line 4   c_1 .. c_m
    then     matno blockno i j value     (matno 0 is F_0)

Lines starting with a double quote or an asterisk are comments. Punctuation
such as braces, parentheses and commas around numbers is ignored. The
objective sign and offset of a reduced program travel in a comment line
of the form `"symmetra objective_sign=-1 offset=0.5`.
"""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterator, List, Tuple

from src.errors import SDPAParseError
from src.sdp.problem import SDPAProblem

_NUMBER = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eEdD][-+]?\d+)?")
_META = re.compile(r"symmetra\s+objective_sign=(\S+)\s+offset=(\S+)")


def _numbers(line: str) -> List[str]:
    return [tok.replace("d", "e").replace("D", "e") for tok in _NUMBER.findall(line)]


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "\"*":
            continue
        yield lineno, line


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        value = float(tok)
    except ValueError:
        raise SDPAParseError(lineno, f"{what}: cannot read {tok!r}") from None
    if value != int(value):
        raise SDPAParseError(lineno, f"{what}: expected an integer, got {tok!r}")
    return int(value)


def parse_sdpa(text: str) -> SDPAProblem:
    objective_sign, offset = 1.0, 0.0
    for raw in text.splitlines():
        hit = _META.search(raw)
        if hit and raw.lstrip().startswith('"'):
            objective_sign, offset = float(hit.group(1)), float(hit.group(2))

    lines = _lines(text)
    try:
        lineno, line = next(lines)
        toks = _numbers(line)
        if not toks:
            raise SDPAParseError(lineno, "expected the number of constraint matrices")
        m = _int(toks[0], lineno, "m")

        lineno, line = next(lines)
        toks = _numbers(line)
        if not toks:
            raise SDPAParseError(lineno, "expected the number of blocks")
        nblocks = _int(toks[0], lineno, "number of blocks")

        lineno, line = next(lines)
        toks = _numbers(line)
        if len(toks) < nblocks:
            raise SDPAParseError(lineno, f"expected {nblocks} block sizes, found {len(toks)}")
        block_struct = [_int(t, lineno, "block size") for t in toks[:nblocks]]
        if any(s == 0 for s in block_struct):
            raise SDPAParseError(lineno, "block size 0")

        c: List[float] = []
        while len(c) < m:
            lineno, line = next(lines)
            c.extend(float(t) for t in _numbers(line))
        if len(c) > m:
            raise SDPAParseError(lineno, f"expected {m} objective coefficients, found {len(c)}")
    except StopIteration:
        raise SDPAParseError(len(text.splitlines()), "unexpected end of file in header") from None

    entries = []
    for lineno, line in lines:
        toks = _numbers(line)
        if len(toks) != 5:
            raise SDPAParseError(lineno, f"expected 'matno blockno i j value', got {line!r}")
        matno, blockno, i, j = (_int(t, lineno, "entry index") for t in toks[:4])
        if not 0 <= matno <= m:
            raise SDPAParseError(lineno, f"matrix number {matno} out of range 0..{m}")
        if not 1 <= blockno <= nblocks:
            raise SDPAParseError(lineno, f"block number {blockno} out of range 1..{nblocks}")
        size = abs(block_struct[blockno - 1])
        if not (1 <= i <= size and 1 <= j <= size):
            raise SDPAParseError(lineno, f"entry ({i}, {j}) outside block {blockno} of size {size}")
        if block_struct[blockno - 1] < 0 and i != j:
            raise SDPAParseError(lineno, f"off-diagonal entry ({i}, {j}) in diagonal block {blockno}")
        entries.append((matno, blockno, i, j, float(toks[4])))

    return SDPAProblem.from_entries(
        m, block_struct, c, entries, objective_sign=objective_sign, offset=offset
    )


def read_sdpa(path: str | Path) -> SDPAProblem:
    return parse_sdpa(Path(path).read_text(encoding="utf-8"))


def format_sdpa(problem: SDPAProblem) -> str:
    fmt = "{:.17g}".format
    out = []
    if problem.objective_sign != 1.0 or problem.offset != 0.0:
        out.append(f'"symmetra objective_sign={fmt(problem.objective_sign)} offset={fmt(problem.offset)}')
    out.append(str(problem.m))
    out.append(str(len(problem.blocks)))
    out.append(" ".join(str(s) for s in problem.block_struct))
    out.append(" ".join(fmt(v) for v in problem.c) if problem.m else "")
    for matno, blockno, i, j, value in problem.entries():
        out.append(f"{matno} {blockno} {i} {j} {fmt(value)}")
    return "\n".join(out) + "\n"


def write_sdpa(problem: SDPAProblem, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_sdpa(problem), encoding="utf-8")
