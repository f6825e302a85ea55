"""Seeded generator of uncertain order-processing databases.

A certain baseline database over five tables (nation, supplier, customer,
orders, lineitem) is drawn first.  Every field is then made uncertain with
probability ``x``; the uncertain fields are shuffled and handed out to
variables whose dependent field count (DFC) follows truncated Zipf weights
``z**i``.  A variable ranges over a sample of the combinations of its
fields' alternatives, so fields sharing a variable are correlated.
"""
from __future__ import annotations

import datetime
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import ParameterError
from .model import UDatabase, WorldTable, make_database, make_partition, world_count_log10

NATIONS = (
    "ALGERIA", "ARGENTINA", "BRAZIL", "CANADA", "EGYPT", "ETHIOPIA", "FRANCE", "GERMANY",
    "INDIA", "INDONESIA", "IRAN", "IRAQ", "JAPAN", "JORDAN", "KENYA", "MOROCCO",
    "MOZAMBIQUE", "PERU", "CHINA", "ROMANIA", "SAUDI ARABIA", "VIETNAM", "RUSSIA",
    "UNITED KINGDOM", "UNITED STATES",
)
SEGMENTS = ("AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY")

SCHEMA = {
    "nation": ("nationkey", "name", "regionkey"),
    "supplier": ("suppkey", "name", "nationkey", "acctbal"),
    "customer": ("custkey", "name", "nationkey", "mktsegment", "acctbal"),
    "orders": ("orderkey", "custkey", "orderdate", "shippriority", "totalprice"),
    "lineitem": ("orderkey", "linenumber", "suppkey", "quantity", "extendedprice", "discount", "shipdate"),
}

START_DATE = datetime.date(1992, 1, 1)
DATE_SPAN = 2405  # days up to 1998-08-02


@dataclass(frozen=True)
class GenParams:
    s: float = 0.001
    x: float = 0.01
    z: float = 0.5
    m: int = 8
    p: float = 0.25
    k: int = 4
    seed: int = 0

    def __post_init__(self):
        if not self.s > 0:
            raise ParameterError(f"scale must be positive, got {self.s}")
        if not 0 <= self.x <= 1:
            raise ParameterError(f"uncertainty ratio must lie in [0, 1], got {self.x}")
        if not 0 < self.z <= 1:
            raise ParameterError(f"correlation ratio must lie in (0, 1], got {self.z}")
        if self.m < 2:
            raise ParameterError(f"max alternatives must be at least 2, got {self.m}")
        if not 0 < self.p <= 1:
            raise ParameterError(f"combination probability must lie in (0, 1], got {self.p}")
        if self.k < 1:
            raise ParameterError(f"max DFC must be at least 1, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class GenStats:
    worlds_log10: float
    max_rng: int
    total_rows: int
    variables_by_dfc: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# formulas


def zipf_bucket_counts(n: int, z: float, k: int) -> list[int]:
    """``ceil(C * z**i)`` for i = 0..k with ``C = n(z-1)/(z**(k+1)-1)``.

    >>> zipf_bucket_counts(100, 0.5, 3)
    [54, 27, 14, 7]
    """
    zf = Fraction(str(z))
    c = Fraction(n, k + 1) if zf == 1 else n * (zf - 1) / (zf ** (k + 1) - 1)
    return [math.ceil(c * zf**i) for i in range(k + 1)]


def round_half_up(q: Fraction) -> int:
    return math.floor(q + Fraction(1, 2))


def domain_size(ms, p: float) -> int:
    """``max(2, round(p**(k-1) * prod(ms)))`` for a variable with k = len(ms) fields.

    >>> domain_size([8, 8], 0.25)
    16
    """
    ms = list(ms)
    val = Fraction(str(p)) ** (len(ms) - 1) * math.prod(ms)
    return max(2, round_half_up(val))


def dfc_weights(z: float, k: int) -> np.ndarray:
    w = np.array([z**i for i in range(1, k + 1)], dtype=float)
    return w / w.sum()


# ---------------------------------------------------------------------------
# baseline


def row_counts(s: float) -> dict[str, int]:
    return {
        "nation": len(NATIONS),
        "supplier": max(1, round(10 * s)),
        "customer": max(1, round(150 * s)),
        "orders": max(1, round(1500 * s)),
        "lineitem": max(1, round(6000 * s)),
    }


def _cents(rng, low: int, high: int) -> Decimal:
    return Decimal(int(rng.integers(low, high))) / 100


def _date(rng) -> datetime.date:
    return START_DATE + datetime.timedelta(days=int(rng.integers(0, DATE_SPAN)))


def baseline(s: float, rng) -> dict[str, list[tuple]]:
    n = row_counts(s)
    tables: dict[str, list[tuple]] = {}
    tables["nation"] = [(i, name, i // 5) for i, name in enumerate(NATIONS)]
    tables["supplier"] = [
        (i, f"Supplier#{i:06d}", int(rng.integers(0, 25)), _cents(rng, -99999, 999999))
        for i in range(1, n["supplier"] + 1)
    ]
    tables["customer"] = [
        (i, f"Customer#{i:06d}", int(rng.integers(0, 25)), SEGMENTS[int(rng.integers(0, 5))], _cents(rng, -99999, 999999))
        for i in range(1, n["customer"] + 1)
    ]
    tables["orders"] = [
        (i, int(rng.integers(1, n["customer"] + 1)), _date(rng), 0, _cents(rng, 100000, 50000000))
        for i in range(1, n["orders"] + 1)
    ]
    lines, per_order = [], {}
    for _ in range(n["lineitem"]):
        ok = int(rng.integers(1, n["orders"] + 1))
        per_order[ok] = per_order.get(ok, 0) + 1
        qty = int(rng.integers(1, 51))
        odate = tables["orders"][ok - 1][2]
        lines.append((
            ok,
            per_order[ok],
            int(rng.integers(1, n["supplier"] + 1)),
            qty,
            _cents(rng, 90000, 10500000),
            Decimal(int(rng.integers(0, 11))) / 100,
            odate + datetime.timedelta(days=int(rng.integers(1, 122))),
        ))
    tables["lineitem"] = lines
    return tables


def alternative(relation: str, attr: str, base, counts: dict[str, int], rng):
    """One random value for a field, drawn like the baseline draws its values."""
    if attr == "name" and relation == "nation":
        return NATIONS[int(rng.integers(0, len(NATIONS)))]
    if attr == "name":
        return f"{base.split('#')[0]}#{int(rng.integers(1, 10**6)):06d}"
    if attr == "mktsegment":
        return SEGMENTS[int(rng.integers(0, len(SEGMENTS)))]
    key_ranges = {
        "nationkey": len(NATIONS) - 1, "regionkey": 4, "suppkey": counts["supplier"],
        "custkey": counts["customer"], "orderkey": counts["orders"],
    }
    if attr in key_ranges:
        low = 0 if attr in ("nationkey", "regionkey") else 1
        return int(rng.integers(low, key_ranges[attr] + 1))
    if isinstance(base, datetime.date):
        return base + datetime.timedelta(days=int(rng.integers(-60, 61)))
    if isinstance(base, Decimal):
        if attr == "discount":
            return Decimal(int(rng.integers(0, 11))) / 100
        return (base * Decimal(int(rng.integers(50, 151))) / 100).quantize(Decimal("0.01"))
    if attr == "quantity":
        return int(rng.integers(1, 51))
    if attr == "linenumber":
        return int(rng.integers(1, 8))
    return int(rng.integers(0, 5))


# ---------------------------------------------------------------------------
# uncertainty


def _combinations(ms: list[int], size: int, rng) -> list[tuple]:
    """``size`` distinct index combinations, the all-baseline one first."""
    total = math.prod(ms)
    first = (0,) * len(ms)
    if size * 2 >= total:
        rest = [c for c in np.ndindex(*ms) if c != first]
        picks = rng.choice(len(rest), size=size - 1, replace=False)
        return [first] + [tuple(int(x) for x in rest[i]) for i in sorted(picks)]
    seen, out = {first}, [first]
    while len(out) < size:
        c = tuple(int(rng.integers(0, mi)) for mi in ms)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def generate(params: GenParams) -> UDatabase:
    """Draw a valid, reduced uncertain database; deterministic per seed."""
    base_seq, unc_seq = np.random.SeedSequence(params.seed).spawn(2)
    base_rng = np.random.default_rng(base_seq)
    rng = np.random.default_rng(unc_seq)
    tables = baseline(params.s, base_rng)
    counts = {name: len(rows) for name, rows in tables.items()}

    pool = []
    for name, attrs in SCHEMA.items():
        draws = rng.random((len(tables[name]), len(attrs)))
        for i in range(len(tables[name])):
            for j in range(len(attrs)):
                if draws[i, j] < params.x:
                    pool.append((name, i, j))
    order = rng.permutation(len(pool)) if pool else []
    pool = [pool[i] for i in order]

    weights = dfc_weights(params.z, params.k)
    domains: dict[str, tuple] = {}
    guards: dict[tuple, list] = {}
    pos, vid = 0, 0
    while pos < len(pool):
        dfc = int(rng.choice(params.k, p=weights)) + 1
        fields_ = pool[pos : pos + dfc]
        pos += len(fields_)
        vid += 1
        var = f"v{vid}"
        ms = [int(rng.integers(2, params.m + 1)) for _ in fields_]
        size = domain_size(ms, params.p)
        combos = _combinations(ms, size, rng)
        domains[var] = tuple(range(1, size + 1))
        for slot, (name, i, j) in enumerate(fields_):
            basev = tables[name][i][j]
            alts = [basev] + [alternative(name, SCHEMA[name][j], basev, counts, rng) for _ in range(ms[slot] - 1)]
            guards[(name, i, j)] = [({var: l + 1}, alts[c[slot]]) for l, c in enumerate(combos)]

    relations = {}
    for name, attrs in SCHEMA.items():
        parts = []
        for j, attr in enumerate(attrs):
            rows = []
            for i, row in enumerate(tables[name]):
                tid = i + 1
                alts = guards.get((name, i, j))
                if alts is None:
                    rows.append((None, tid, (row[j],)))
                else:
                    rows.extend((d, tid, (v,)) for d, v in alts)
            parts.append(make_partition(name, [attr], rows))
        relations[name] = (list(attrs), parts)
    return make_database(WorldTable(domains), relations, reduced=True)


# ---------------------------------------------------------------------------
# statistics


def stats(db: UDatabase) -> GenStats:
    fields: dict[str, set] = {}
    for name, rel in db.relations.items():
        for part in rel.partitions:
            for d, t, _ in part.rows:
                for var in d.variables:
                    fields.setdefault(var, set()).update((name, t, a) for a in part.attrs)
    by_dfc: dict[int, int] = {}
    for var in db.world.domains:
        dfc = len(fields.get(var, ()))
        by_dfc[dfc] = by_dfc.get(dfc, 0) + 1
    return GenStats(
        worlds_log10=world_count_log10(db.world),
        max_rng=max((len(v) for v in db.world.domains.values()), default=0),
        total_rows=db.total_rows(),
        variables_by_dfc=dict(sorted(by_dfc.items())),
    )


# ---------------------------------------------------------------------------
# sample queries


def sample_queries() -> dict[str, str]:
    """The shipped query files, keyed by file name."""
    pkg = resources.files("urel") / "sql"
    return {f.name: f.read_text(encoding="utf-8") for f in sorted(pkg.iterdir(), key=lambda f: f.name) if f.name.endswith(".sql")}


def sample_query(name: str) -> str:
    return sample_queries()[name if name.endswith(".sql") else name + ".sql"].strip()
