"""Recursive-descent parser for the select/from/where query language.

::

    query   := ["possible"] body
    body    := term ("union" term)*
    term    := "(" body ")" | select
    select  := "select" cols "from" rels ["where" conj]
    cols    := "*" | ident ("," ident)*
    rels    := relref ("," relref)*      relref := ident [["as"] alias]
    conj    := atom ("and" atom)*
    atom    := operand op operand | operand "between" operand "and" operand

Operands are (qualified) identifiers or literals: integers, decimals,
``'strings'`` and ``date 'YYYY-MM-DD'``.
"""
from __future__ import annotations

import datetime
import re
from dataclasses import dataclass
from decimal import Decimal

from ..errors import QueryError, QuerySyntaxError
from ..model import COMPARISON_OPS
from .ast import Atom, ColRef, Const, Join, Poss, Project, Query, Relation, Select, Union, literal

KEYWORDS = {"select", "from", "where", "and", "union", "possible", "date", "between", "as"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>'(?:[^']|'')*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?)
  | (?P<op><>|!=|<=|>=|=|<|>)
  | (?P<punct>[(),*-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int

    @property
    def keyword(self) -> str | None:
        if self.kind == "ident" and self.text.lower() in KEYWORDS:
            return self.text.lower()
        return None


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise QuerySyntaxError(f"expected {what}, found {found}", t.pos)

    def at_kw(self, kw: str) -> bool:
        return self.tok.keyword == kw

    def expect_kw(self, kw: str):
        if not self.at_kw(kw):
            self.fail(f"'{kw}'")
        return self.advance()

    def at_punct(self, p: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == p

    def expect_punct(self, p: str):
        if not self.at_punct(p):
            self.fail(f"'{p}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident" or self.tok.keyword:
            self.fail(what)
        return self.advance().text

    # grammar ---------------------------------------------------------------

    def query(self) -> Query:
        poss = False
        if self.at_kw("possible"):
            self.advance()
            poss = True
        q = self.body()
        if self.tok.kind != "end":
            self.fail("end of query")
        return Poss(q) if poss else q

    def body(self) -> Query:
        q = self.term()
        while self.at_kw("union"):
            self.advance()
            q = Union(q, self.term())
        return q

    def term(self) -> Query:
        if self.at_punct("("):
            self.advance()
            q = self.body()
            self.expect_punct(")")
            return q
        return self.select()

    def select(self) -> Query:
        self.expect_kw("select")
        if self.at_punct("*"):
            self.advance()
            cols = None
        else:
            names = [self.ident("column name")]
            while self.at_punct(","):
                self.advance()
                names.append(self.ident("column name"))
            cols = tuple((n, ColRef(n)) for n in names)
        self.expect_kw("from")
        rels = [self.relref()]
        while self.at_punct(","):
            self.advance()
            rels.append(self.relref())
        atoms: list[Atom] = []
        if self.at_kw("where"):
            self.advance()
            atoms.extend(self.atom())
            while self.at_kw("and"):
                self.advance()
                atoms.extend(self.atom())
        return Project(place_conditions(rels, atoms), cols)

    def relref(self) -> Relation:
        name = self.ident("relation name")
        if "." in name:
            raise QuerySyntaxError(f"relation name {name!r} may not be qualified", self.tokens[self.i - 1].pos)
        alias = None
        if self.at_kw("as"):
            self.advance()
            alias = self.ident("alias")
        elif self.tok.kind == "ident" and not self.tok.keyword:
            alias = self.advance().text
        if alias is not None and "." in alias:
            raise QuerySyntaxError(f"alias {alias!r} may not be qualified", self.tokens[self.i - 1].pos)
        return Relation(name, alias)

    def atom(self) -> list[Atom]:
        left = self.operand()
        if self.at_kw("between"):
            self.advance()
            low = self.operand()
            self.expect_kw("and")
            high = self.operand()
            return [Atom(left, ">=", low), Atom(left, "<=", high)]
        if self.tok.kind != "op":
            self.fail("comparison operator")
        op = self.advance().text
        if op == "!=":
            op = "<>"
        assert op in COMPARISON_OPS
        return [Atom(left, op, self.operand())]

    def operand(self):
        t = self.tok
        if t.kind == "punct" and t.text == "-":
            self.advance()
            if self.tok.kind != "number":
                self.fail("number")
            return Const(_number("-" + self.advance().text))
        if t.kind == "number":
            self.advance()
            return Const(_number(t.text))
        if t.kind == "string":
            self.advance()
            return Const(_string(t.text))
        if t.keyword == "date":
            self.advance()
            if self.tok.kind != "string":
                self.fail("date string")
            s = self.advance()
            try:
                return Const(datetime.date.fromisoformat(_string(s.text)))
            except ValueError:
                raise QuerySyntaxError(f"invalid date {s.text}", s.pos) from None
        if t.kind == "ident" and not t.keyword:
            self.advance()
            return ColRef(t.text)
        self.fail("column or literal")


def _number(text: str):
    return Decimal(text) if "." in text else int(text)


def _string(text: str) -> str:
    return text[1:-1].replace("''", "'")


def place_conditions(rels: list[Relation], atoms: list[Atom]) -> Query:
    """Build the left-deep join of ``rels`` and hang each atom as low as its
    qualifiers allow.  Atoms with bare column names in a multi-relation query
    stay in a selection above the joins."""
    quals = [r.qualifier for r in rels]
    single = len(rels) == 1
    leaf: list[list[Atom]] = [[] for _ in rels]
    join: list[list[Atom]] = [[] for _ in rels]
    top: list[Atom] = []
    for a in atoms:
        refs = a.refs()
        if single and refs:
            leaf[0].append(a)
            continue
        idx = set()
        for r in refs:
            q, dot, _ = r.partition(".")
            if not dot or q not in quals:
                idx = None
                break
            idx.add(quals.index(q))
        if not idx:
            top.append(a)
        elif len(idx) == 1:
            leaf[idx.pop()].append(a)
        else:
            join[max(idx)].append(a)
    nodes = [Select(r, tuple(c)) if c else r for r, c in zip(rels, leaf)]
    q = nodes[0]
    for k in range(1, len(nodes)):
        q = Join(q, nodes[k], tuple(join[k]))
    return Select(q, tuple(top)) if top else q


def parse(text: str) -> Query:
    """Parse query text into a logical query tree.

    >>> parse("possible (select Id from R where Type='Tank' and Faction='Enemy')")
    Poss(child=Project(child=Select(child=Relation(name='R', alias=None), cond=(Atom(left=ColRef(name='Type'), op='=', right=Const(value='Tank')), Atom(left=ColRef(name='Faction'), op='=', right=Const(value='Enemy')))), columns=(('Id', ColRef(name='Id')),)))
    """
    return _Parser(text).query()


# ---------------------------------------------------------------------------
# printing back to text


def to_sql(q: Query) -> str:
    """Print a parser-shaped query tree back to query text."""
    if isinstance(q, Poss):
        return f"possible ({_body(q.child)})"
    return _body(q)


def _body(q: Query) -> str:
    if isinstance(q, Union):
        return f"{_body(q.left)} union {_term(q.right)}"
    return _term(q)


def _term(q: Query) -> str:
    if isinstance(q, Union):
        return f"({_body(q)})"
    if not isinstance(q, Project):
        raise QueryError(f"query tree is not in select/from/where shape: {q!r}")
    cols = "*" if q.columns is None else ", ".join(_col(n, r) for n, r in q.columns)
    node = q.child
    atoms: list[Atom] = []
    if isinstance(node, Select) and not isinstance(node.child, Relation):
        atoms_top = list(node.cond)
        node = node.child
    else:
        atoms_top = []
    rels: list[Relation] = []
    joins: list[Atom] = []

    def leaves(n):
        if isinstance(n, Join):
            leaves(n.left)
            leaves(n.right)
            joins.extend(n.cond)
        elif isinstance(n, Select) and isinstance(n.child, Relation):
            rels.append(n.child)
            atoms.extend(n.cond)
        elif isinstance(n, Relation):
            rels.append(n)
        else:
            raise QueryError(f"query tree is not in select/from/where shape: {n!r}")

    leaves(node)
    atoms += joins + atoms_top
    text = f"select {cols} from " + ", ".join(r.name if r.alias is None else f"{r.name} {r.alias}" for r in rels)
    if atoms:
        text += " where " + " and ".join(f"{_operand(a.left)} {a.op} {_operand(a.right)}" for a in atoms)
    return text


def _col(name: str, ref: ColRef) -> str:
    if name != ref.name:
        raise QueryError(f"renamed column {ref.name} as {name} has no text form")
    return name


def _operand(o) -> str:
    return o.name if isinstance(o, ColRef) else literal(o.value)
