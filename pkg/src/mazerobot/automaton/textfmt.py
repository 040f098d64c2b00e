"""Automaton description files.

Line-oriented text; ``#`` starts a comment. Example::

    automaton v1
    dimension 2
    pebbles 1
    initial walk

    state walk move +e1 carry 0 role control
      obs 1** home          # pebble bit set, any flag/random bit
      obs 0*0 walk
      obs 0*1 away
    state home move -e1 carry 1
      obs *** walk
    ...

Observation patterns list the bits in order pebble_1..pebble_n, flag,
random; ``*`` matches either value and the first matching row wins. The
table must end up total.

Files made of ``choice``/``terminal`` records describe a rational-probability
automaton instead::

    choice s
      1/3 a move +e1 carry -
      2/3 b move -e2 carry -
    terminal a
    terminal b

``gadget`` records (written for compiled automata) carry choice-point
metadata so that compiled programs round-trip without loss.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Union

from ..lattice import format_move, parse_move
from .compiler import RationalAutomaton, RationalTransition, compile_rational
from .model import ROLES, AutomatonError, Gadget, RobotAutomaton

HEADER = "automaton v1"


class AutomatonParseError(AutomatonError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {"type": "parse_error", "message": self.message, "line": self.line, "column": self.column}


class _Tok:
    __slots__ = ("text", "line", "col")

    def __init__(self, text, line, col):
        self.text, self.line, self.col = text, line, col


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [_Tok(m.group(), i, m.start() + 1) for m in re.finditer(r"\S+", body)]
        if toks:
            yield i, raw[:1].isspace(), toks


def _fail(tok: _Tok, msg: str):
    raise AutomatonParseError(msg, tok.line, tok.col)


def _int(tok: _Tok) -> int:
    try:
        return int(tok.text)
    except ValueError:
        _fail(tok, f"expected an integer, got {tok.text!r}")


def _move(tok: _Tok, k: int) -> int:
    try:
        code = parse_move(tok.text)
    except ValueError as e:
        _fail(tok, str(e))
    if abs(code) > k:
        _fail(tok, f"move {tok.text} does not exist in Z^{k}")
    return code


def _carry(tok: _Tok, n: int) -> int:
    if n == 0:
        if tok.text not in ("-", "0", ""):
            _fail(tok, "carry mask must be '-' when there are no pebbles")
        return 0
    if len(tok.text) != n or set(tok.text) - {"0", "1"}:
        _fail(tok, f"carry mask must be {n} bits")
    return sum(1 << i for i, ch in enumerate(tok.text) if ch == "1")


def _keyvals(toks, start, allowed):
    out = {}
    i = start
    while i < len(toks):
        key = toks[i]
        if key.text not in allowed:
            _fail(key, f"unexpected token {key.text!r}")
        if i + 1 >= len(toks):
            _fail(key, f"missing value after {key.text!r}")
        out[key.text] = toks[i + 1]
        i += 2
    return out


def loads(text: str) -> Union[RobotAutomaton, RationalAutomaton]:
    """Parse a description; returns the automaton kind the file declares."""
    it = list(_lines(text))
    if not it:
        raise AutomatonParseError("empty automaton description", 1, 1)
    ln, _, toks = it[0]
    if " ".join(t.text for t in toks) != HEADER:
        _fail(toks[0], f"expected header {HEADER!r}")
    header = {}
    records = []  # (kind, head tokens, [body token lists])
    for ln, indented, toks in it[1:]:
        head = toks[0].text
        if indented:
            if not records:
                _fail(toks[0], "indented row outside a record")
            records[-1][2].append(toks)
        elif head in ("dimension", "pebbles", "initial"):
            if len(toks) != 2:
                _fail(toks[0], f"{head} takes exactly one value")
            if head in header:
                _fail(toks[0], f"duplicate {head}")
            header[head] = toks[1]
        elif head in ("state", "choice", "terminal", "gadget"):
            records.append((head, toks, []))
        else:
            _fail(toks[0], f"unknown record {head!r}")
    for key in ("dimension", "pebbles", "initial"):
        if key not in header:
            raise AutomatonParseError(f"missing '{key}' line", ln, 1)
    k = _int(header["dimension"])
    n = _int(header["pebbles"])
    if k < 1:
        _fail(header["dimension"], "dimension must be >= 1")
    if n < 0:
        _fail(header["pebbles"], "pebble count must be >= 0")
    kinds = {r[0] for r in records}
    if not records:
        raise AutomatonParseError("no state records", ln, 1)
    if "state" in kinds and kinds & {"choice", "terminal"}:
        rec = next(r for r in records if r[0] in ("choice", "terminal"))
        _fail(rec[1][0], "cannot mix 'state' records with rational 'choice'/'terminal' records")
    if "state" in kinds:
        return _robot(records, k, n, header["initial"])
    return _rational(records, k, n, header["initial"])


def _robot(records, k, n, init_tok) -> RobotAutomaton:
    W = 1 << (n + 2)
    names, moves, carry, roles, tables, gads = [], [], [], [], [], []
    for kind, head, body in records:
        if kind == "gadget":
            gads.append((head, body))
            continue
        if len(head) < 2:
            _fail(head[0], "state record needs a name")
        name = head[1].text
        if name in names:
            _fail(head[1], f"duplicate state {name!r}")
        kv = _keyvals(head, 2, {"move", "carry", "role"})
        names.append(name)
        moves.append(_move(kv["move"], k) if "move" in kv else 0)
        carry.append(_carry(kv["carry"], n) if "carry" in kv else 0)
        role = kv["role"].text if "role" in kv else "control"
        if role not in ROLES:
            _fail(kv["role"], f"unknown role {role!r}")
        roles.append(role)
        rows = []
        for toks in body:
            if toks[0].text != "obs" or len(toks) != 3:
                _fail(toks[0], "expected 'obs PATTERN TARGET'")
            pat = toks[1].text
            if len(pat) != n + 2 or set(pat) - set("01*"):
                _fail(toks[1], f"pattern must be {n + 2} characters of 0, 1, *")
            rows.append((pat, toks[2]))
        tables.append((head, rows))
    idx = {nm: i for i, nm in enumerate(names)}
    nxt = []
    for head, rows in tables:
        row = [None] * W
        for pat, target in rows:
            if target.text not in idx:
                _fail(target, f"unknown target state {target.text!r}")
            for code in range(W):
                if row[code] is None and _matches(pat, code, n):
                    row[code] = idx[target.text]
        if any(r is None for r in row):
            missing = [_pattern(c, n) for c in range(W) if row[c] is None]
            _fail(head[1], f"transition table not total; missing {missing}")
        nxt.append(tuple(row))
    if init_tok.text not in idx:
        _fail(init_tok, f"unknown initial state {init_tok.text!r}")
    gadgets = [_gadget(h, b, idx) for h, b in gads]
    return RobotAutomaton(k, n, tuple(names), tuple(moves), tuple(carry), tuple(nxt),
                          idx[init_tok.text], tuple(roles), tuple(gadgets))


def _gadget(head, body, idx) -> Gadget:
    def ref(tok):
        if tok.text not in idx:
            _fail(tok, f"unknown state {tok.text!r}")
        return idx[tok.text]

    if len(head) < 2:
        _fail(head[0], "gadget record needs a root")
    kv = _keyvals(head, 2, {"axis", "depth", "name"})
    probs, commits, counts, tree, restart = [], [], [], [], []
    for toks in body:
        what = toks[0].text
        if what == "branch":
            if len(toks) != 5 or toks[3].text != "leaves":
                _fail(toks[0], "expected 'branch PROB COMMIT leaves COUNT'")
            probs.append(_fraction(toks[1]))
            commits.append(ref(toks[2]))
            counts.append(_int(toks[4]))
        elif what == "tree":
            tree += [ref(t) for t in toks[1:]]
        elif what == "restart":
            restart += [ref(t) for t in toks[1:]]
        else:
            _fail(toks[0], f"unexpected gadget row {what!r}")
    depth = _int(kv["depth"])
    return Gadget(ref(head[1]), tuple(probs), tuple(commits), tuple(tree), tuple(restart),
                  depth, 1 << depth, tuple(counts), _int(kv["axis"]),
                  kv["name"].text if "name" in kv else head[1].text)


def _fraction(tok) -> Fraction:
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        _fail(tok, f"bad probability {tok.text!r}")


def _rational(records, k, n, init_tok) -> RationalAutomaton:
    states, trs, pending = [], [], []
    for kind, head, body in records:
        if kind == "gadget":
            _fail(head[0], "gadget records belong to compiled automata")
        if len(head) != 2:
            _fail(head[0], f"'{kind}' takes exactly one state name")
        name = head[1].text
        if name in states:
            _fail(head[1], f"duplicate state {name!r}")
        states.append(name)
        if kind == "terminal":
            if body:
                _fail(body[0][0], "terminal states have no transitions")
            trs.append(())
            continue
        if not body:
            _fail(head[0], "choice state without transitions")
        row = []
        for toks in body:
            if len(toks) < 2:
                _fail(toks[0], "expected 'PROB TARGET [move M] [carry C]'")
            kv = _keyvals(toks, 2, {"move", "carry"})
            row.append(RationalTransition(
                _fraction(toks[0]), toks[1].text,
                _move(kv["move"], k) if "move" in kv else 0,
                _carry(kv["carry"], n) if "carry" in kv else 0))
            pending.append(toks[1])
        trs.append(tuple(row))
    for tok in pending:
        if tok.text not in states:
            _fail(tok, f"unknown target state {tok.text!r}")
    if init_tok.text not in states:
        _fail(init_tok, f"unknown initial state {init_tok.text!r}")
    for head_rec, row in zip(records, trs):
        total = sum((t.probability for t in row), Fraction(0))
        if row and (total != 1 or any(t.probability <= 0 for t in row)):
            _fail(head_rec[1][1], f"probabilities must be positive and sum to 1 (got {total})")
    return RationalAutomaton(k, n, tuple(states), init_tok.text, tuple(trs))


def _matches(pat: str, code: int, n: int) -> bool:
    return all(ch == "*" or int(ch) == b for ch, b in zip(pat, _bits(code, n)))


def _bits(code: int, n: int):
    return [(code >> i) & 1 for i in range(n)] + [(code >> n) & 1, (code >> (n + 1)) & 1]


def _pattern(code: int, n: int) -> str:
    return "".join(map(str, _bits(code, n)))


def _carry_text(mask: int, n: int) -> str:
    return "-" if n == 0 else "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def dumps(a: Union[RobotAutomaton, RationalAutomaton]) -> str:
    out = [HEADER, f"dimension {a.dimension}", f"pebbles {a.pebbles}"]
    n = a.pebbles
    if isinstance(a, RationalAutomaton):
        out.append(f"initial {a.initial}")
        for name, row in zip(a.states, a.transitions):
            if not row:
                out.append(f"terminal {name}")
                continue
            out.append(f"choice {name}")
            for t in row:
                out.append(f"  {t.probability} {t.target} move {format_move(t.move)} carry {_carry_text(t.carry, n)}")
        return "\n".join(out) + "\n"
    out.append(f"initial {a.names[a.initial]}")
    W = a.width
    rbit = 1 << (n + 1)
    for q, name in enumerate(a.names):
        out.append(f"state {name} move {format_move(a.moves[q])} carry {_carry_text(a.carry[q], n)} role {a.roles[q]}")
        row = a.next[q]
        wild = "*" * (n + 1)
        if len(set(row)) == 1:
            out.append(f"  obs {wild}* {a.names[row[0]]}")
        elif all(row[c] == row[c & rbit] for c in range(W)):
            out.append(f"  obs {wild}0 {a.names[row[0]]}")
            out.append(f"  obs {wild}1 {a.names[row[rbit]]}")
        else:
            for c in range(W):
                out.append(f"  obs {_pattern(c, n)} {a.names[row[c]]}")
    for g in a.gadgets:
        label = "" if g.name == a.names[g.root] else f" name {g.name}"
        out.append(f"gadget {a.names[g.root]} axis {g.axis} depth {g.depth}{label}")
        for p, c, cnt in zip(g.probabilities, g.commits, g.leaf_counts):
            out.append(f"  branch {p} {a.names[c]} leaves {cnt}")
        for i in range(0, len(g.tree), 16):
            out.append("  tree " + " ".join(a.names[t] for t in g.tree[i:i + 16]))
        if g.restart:
            out.append("  restart " + " ".join(a.names[t] for t in g.restart))
    return "\n".join(out) + "\n"


def read(path: Union[str, Path]) -> Union[RobotAutomaton, RationalAutomaton]:
    return loads(Path(path).read_text())


def read_robot(path: Union[str, Path]) -> RobotAutomaton:
    """Load a file as a coin-flip automaton, compiling rational descriptions."""
    a = read(path)
    return compile_rational(a) if isinstance(a, RationalAutomaton) else a


def write(a: Union[RobotAutomaton, RationalAutomaton], path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(a))
