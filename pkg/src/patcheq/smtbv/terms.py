"""Hash-consed bit-vector/boolean term DAG with folding and interval analysis.

Boolean nodes have width 0.  Comparisons are canonicalized to strict forms
(ule becomes not(ult(b, a))) so that logically identical assertions built by
different code paths collapse to the same node, which in turn lets whole
equivalence queries fold away before any SAT search.
"""

from __future__ import annotations

from .. import bvarith


class Node:
    __slots__ = ("kind", "width", "args", "nid")

    def __init__(self, kind: str, width: int, args: tuple, nid: int):
        self.kind = kind
        self.width = width
        self.args = args
        self.nid = nid

    def __repr__(self):
        return f"<{self.kind}/{self.width}#{self.nid} {self.args!r}>"


class TermTable:
    """Interning table; one per solver session."""

    def __init__(self):
        self._table: dict[tuple, Node] = {}
        self._next = 0
        self.TRUE = self._node("bconst", 0, (True,))
        self.FALSE = self._node("bconst", 0, (False,))

    def _node(self, kind: str, width: int, args: tuple) -> Node:
        key = (kind, width, tuple(a.nid if isinstance(a, Node) else a for a in args))
        found = self._table.get(key)
        if found is not None:
            return found
        node = Node(kind, width, args, self._next)
        self._next += 1
        self._table[key] = node
        return node

    def bconst(self, value: bool) -> Node:
        return self.TRUE if value else self.FALSE

    def const(self, value: int, width: int) -> Node:
        return self._node("const", width, (value & bvarith.mask(width),))

    def var(self, name: str, width: int) -> Node:
        return self._node("var", width, (name,))

    # --- boolean constructors ---

    def bnot(self, a: Node) -> Node:
        if a.kind == "bconst":
            return self.bconst(not a.args[0])
        if a.kind == "bnot":
            return a.args[0]
        return self._node("bnot", 0, (a,))

    def band(self, items) -> Node:
        flat: list[Node] = []
        seen = set()
        for x in items:
            if x.kind == "bconst":
                if not x.args[0]:
                    return self.FALSE
                continue
            parts = x.args if x.kind == "band" else (x,)
            for p in parts:
                if p.nid in seen:
                    continue
                seen.add(p.nid)
                flat.append(p)
        neg_ids = {p.args[0].nid for p in flat if p.kind == "bnot"}
        if any(p.nid in neg_ids for p in flat):
            return self.FALSE
        if not flat:
            return self.TRUE
        if len(flat) == 1:
            return flat[0]
        return self._node("band", 0, tuple(flat))

    def bor(self, items) -> Node:
        flat: list[Node] = []
        seen = set()
        for x in items:
            if x.kind == "bconst":
                if x.args[0]:
                    return self.TRUE
                continue
            parts = x.args if x.kind == "bor" else (x,)
            for p in parts:
                if p.nid in seen:
                    continue
                seen.add(p.nid)
                flat.append(p)
        neg_ids = {p.args[0].nid for p in flat if p.kind == "bnot"}
        if any(p.nid in neg_ids for p in flat):
            return self.TRUE
        if not flat:
            return self.FALSE
        if len(flat) == 1:
            return flat[0]
        return self._node("bor", 0, tuple(flat))

    def beq(self, a: Node, b: Node) -> Node:
        if a.nid == b.nid:
            return self.TRUE
        if a.kind == "bconst":
            return b if a.args[0] else self.bnot(b)
        if b.kind == "bconst":
            return a if b.args[0] else self.bnot(a)
        if a.nid > b.nid:
            a, b = b, a
        return self._node("beq", 0, (a, b))

    def implies(self, a: Node, b: Node) -> Node:
        return self.bor([self.bnot(a), b])

    def bite(self, c: Node, a: Node, b: Node) -> Node:
        # boolean-valued ite
        if c.kind == "bconst":
            return a if c.args[0] else b
        if a.nid == b.nid:
            return a
        return self.bor([self.band([c, a]), self.band([self.bnot(c), b])])

    # --- atoms ---

    def eq(self, a: Node, b: Node) -> Node:
        if a.width == 0:
            return self.beq(a, b)
        if a.nid == b.nid:
            return self.TRUE
        if a.kind == "const" and b.kind == "const":
            return self.bconst(a.args[0] == b.args[0])
        if a.nid > b.nid:
            a, b = b, a
        return self._node("eq", 0, (a, b))

    def ult(self, a: Node, b: Node) -> Node:
        if a.nid == b.nid:
            return self.FALSE
        if a.kind == "const" and b.kind == "const":
            return self.bconst(a.args[0] < b.args[0])
        if b.kind == "const" and b.args[0] == 0:
            return self.FALSE
        if a.kind == "const" and a.args[0] == bvarith.mask(a.width):
            return self.FALSE
        return self._node("ult", 0, (a, b))

    def slt(self, a: Node, b: Node) -> Node:
        if a.nid == b.nid:
            return self.FALSE
        if a.kind == "const" and b.kind == "const":
            w = a.width
            return self.bconst(bvarith.slt(a.args[0], b.args[0], w))
        return self._node("slt", 0, (a, b))

    def ule(self, a: Node, b: Node) -> Node:
        return self.bnot(self.ult(b, a))

    def sle(self, a: Node, b: Node) -> Node:
        return self.bnot(self.slt(b, a))

    # --- bit-vector operators ---

    def _fold2(self, op: str, a: Node, b: Node):
        if a.kind == "const" and b.kind == "const":
            fn = getattr(bvarith, _FOLD_NAMES[op])
            return self.const(fn(a.args[0], b.args[0], a.width), a.width)
        return None

    def bv2(self, op: str, a: Node, b: Node) -> Node:
        folded = self._fold2(op, a, b)
        if folded is not None:
            return folded
        w = a.width
        zero, ones = 0, bvarith.mask(w)
        ca = a.args[0] if a.kind == "const" else None
        cb = b.args[0] if b.kind == "const" else None
        if op == "add":
            if ca == 0:
                return b
            if cb == 0:
                return a
        elif op == "sub":
            if cb == 0:
                return a
            if a.nid == b.nid:
                return self.const(0, w)
        elif op == "mul":
            if ca == 0 or cb == 0:
                return self.const(0, w)
            if ca == 1:
                return b
            if cb == 1:
                return a
            if ca is not None and cb is None:
                a, b, ca, cb = b, a, cb, ca  # constant on the right
        elif op == "and":
            if ca == 0 or cb == 0:
                return self.const(0, w)
            if ca == ones:
                return b
            if cb == ones:
                return a
            if a.nid == b.nid:
                return a
        elif op == "or":
            if ca == ones or cb == ones:
                return self.const(ones, w)
            if ca == 0:
                return b
            if cb == 0:
                return a
            if a.nid == b.nid:
                return a
        elif op == "xor":
            if ca == 0:
                return b
            if cb == 0:
                return a
            if a.nid == b.nid:
                return self.const(0, w)
        elif op in ("shl", "lshr"):
            if cb == 0:
                return a
            if ca == 0:
                return self.const(0, w)
            if cb is not None and cb >= w:
                return self.const(0, w)
        elif op == "udiv":
            if cb == 1:
                return a
        elif op == "urem":
            if cb == 1:
                return self.const(0, w)
        if op in ("add", "mul", "and", "or", "xor") and a.nid > b.nid:
            a, b = b, a  # canonical order for commutative ops
        return self._node(op, w, (a, b))

    def neg(self, a: Node) -> Node:
        if a.kind == "const":
            return self.const(bvarith.neg(a.args[0], a.width), a.width)
        return self.bv2("sub", self.const(0, a.width), a)

    def bvnot(self, a: Node) -> Node:
        return self.bv2("xor", a, self.const(bvarith.mask(a.width), a.width))

    def sdiv(self, a: Node, b: Node) -> Node:
        if a.kind == "const" and b.kind == "const":
            return self.const(bvarith.sdiv(a.args[0], b.args[0], a.width), a.width)
        w = a.width
        zero = self.const(0, w)
        a_neg = self.slt(a, zero)
        b_neg = self.slt(b, zero)
        mag_a = self.ite(a_neg, self.neg(a), a)
        mag_b = self.ite(b_neg, self.neg(b), b)
        q = self.bv2("udiv", mag_a, mag_b)
        return self.ite(self.beq(a_neg, b_neg), q, self.neg(q))

    def srem(self, a: Node, b: Node) -> Node:
        if a.kind == "const" and b.kind == "const":
            return self.const(bvarith.srem(a.args[0], b.args[0], a.width), a.width)
        w = a.width
        zero = self.const(0, w)
        a_neg = self.slt(a, zero)
        b_neg = self.slt(b, zero)
        mag_a = self.ite(a_neg, self.neg(a), a)
        mag_b = self.ite(b_neg, self.neg(b), b)
        r = self.bv2("urem", mag_a, mag_b)
        return self.ite(a_neg, self.neg(r), r)

    def ashr(self, a: Node, b: Node) -> Node:
        if a.kind == "const" and b.kind == "const":
            return self.const(bvarith.ashr(a.args[0], b.args[0], a.width), a.width)
        w = a.width
        sign = self.slt(a, self.const(0, w))
        flipped = self.bv2("lshr", self.bvnot(a), b)
        return self.ite(sign, self.bvnot(flipped), self.bv2("lshr", a, b))

    def ite(self, c: Node, a: Node, b: Node) -> Node:
        if c.kind == "bconst":
            return a if c.args[0] else b
        if a.nid == b.nid:
            return a
        return self._node("ite", a.width, (c, a, b))

    def extract(self, hi: int, lo: int, a: Node) -> Node:
        if a.kind == "const":
            return self.const((a.args[0] >> lo) & bvarith.mask(hi - lo + 1), hi - lo + 1)
        if lo == 0 and hi == a.width - 1:
            return a
        return self._node("extract", hi - lo + 1, (hi, lo, a))

    def zext(self, extra: int, a: Node) -> Node:
        if extra == 0:
            return a
        if a.kind == "const":
            return self.const(a.args[0], a.width + extra)
        return self._node("zext", a.width + extra, (extra, a))

    def sext(self, extra: int, a: Node) -> Node:
        if extra == 0:
            return a
        if a.kind == "const":
            v = bvarith.to_signed(a.args[0], a.width)
            return self.const(bvarith.to_unsigned(v, a.width + extra), a.width + extra)
        return self._node("sext", a.width + extra, (extra, a))

    def concat(self, a: Node, b: Node) -> Node:
        # a is the high part per SMT-LIB
        if a.kind == "const" and b.kind == "const":
            return self.const((a.args[0] << b.width) | b.args[0], a.width + b.width)
        return self._node("concat", a.width + b.width, (a, b))


_FOLD_NAMES = {
    "add": "add", "sub": "sub", "mul": "mul", "udiv": "udiv", "urem": "urem",
    "shl": "shl", "lshr": "lshr", "and": "bvand", "or": "bvor", "xor": "bvxor",
}


# ---------------------------------------------------------------------------
# Concrete evaluation


def eval_node(node: Node, env: dict[str, int], memo: dict[int, int] | None = None):
    """Evaluate a node under unsigned-canonical variable values.

    Unassigned variables default to 0.  Returns ints for bit-vector nodes and
    bools for boolean nodes.
    """
    if memo is None:
        memo = {}

    def rec(n: Node):
        got = memo.get(n.nid)
        if got is not None or n.nid in memo:
            return got
        k = n.kind
        if k == "const":
            v = n.args[0]
        elif k == "bconst":
            v = n.args[0]
        elif k == "var":
            v = env.get(n.args[0], 0)
        elif k == "bnot":
            v = not rec(n.args[0])
        elif k == "band":
            v = all(rec(x) for x in n.args)
        elif k == "bor":
            v = any(rec(x) for x in n.args)
        elif k == "beq":
            v = rec(n.args[0]) == rec(n.args[1])
        elif k == "eq":
            v = rec(n.args[0]) == rec(n.args[1])
        elif k == "ult":
            v = rec(n.args[0]) < rec(n.args[1])
        elif k == "slt":
            w = n.args[0].width
            v = bvarith.slt(rec(n.args[0]), rec(n.args[1]), w)
        elif k == "ite":
            v = rec(n.args[1]) if rec(n.args[0]) else rec(n.args[2])
        elif k == "extract":
            hi, lo, a = n.args
            v = (rec(a) >> lo) & bvarith.mask(hi - lo + 1)
        elif k == "zext":
            v = rec(n.args[1])
        elif k == "sext":
            extra, a = n.args
            v = bvarith.to_unsigned(bvarith.to_signed(rec(a), a.width), n.width)
        elif k == "concat":
            a, b = n.args
            v = (rec(a) << b.width) | rec(b)
        else:
            fn = getattr(bvarith, _FOLD_NAMES[k])
            v = fn(rec(n.args[0]), rec(n.args[1]), n.width)
        memo[n.nid] = v
        return v

    return rec(node)


def free_vars(node: Node, acc: dict[str, Node] | None = None, seen: set | None = None):
    if acc is None:
        acc = {}
    if seen is None:
        seen = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if n.nid in seen:
            continue
        seen.add(n.nid)
        if n.kind == "var":
            acc[n.args[0]] = n
        else:
            stack.extend(a for a in n.args if isinstance(a, Node))
    return acc


def const_values(node: Node, width: int, acc: set | None = None, seen: set | None = None):
    """All constant values of a given width appearing in the DAG."""
    if acc is None:
        acc = set()
    if seen is None:
        seen = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if n.nid in seen:
            continue
        seen.add(n.nid)
        if n.kind == "const" and n.width == width:
            acc.add(n.args[0])
        else:
            stack.extend(a for a in n.args if isinstance(a, Node))
    return acc


# ---------------------------------------------------------------------------
# Interval analysis

FULL = None  # marker for "no information"


class Intervals:
    """Per-node signed and unsigned interval approximation.

    ``bounds`` maps var name -> [ulo, uhi, slo, shi].  Every op is sound:
    when a result may wrap, the affected view widens to the whole range.
    """

    def __init__(self, bounds: dict[str, list[int]]):
        self.bounds = bounds
        self.memo: dict[int, tuple[int, int, int, int]] = {}

    def full(self, w: int) -> tuple[int, int, int, int]:
        return (0, bvarith.mask(w), -(1 << (w - 1)), (1 << (w - 1)) - 1)

    def of(self, n: Node) -> tuple[int, int, int, int]:
        got = self.memo.get(n.nid)
        if got is not None:
            return got
        w = n.width
        smin, smax = -(1 << (w - 1)), (1 << (w - 1)) - 1
        umax = bvarith.mask(w)
        k = n.kind
        out = self.full(w)
        if k == "const":
            v = n.args[0]
            out = (v, v, bvarith.to_signed(v, w), bvarith.to_signed(v, w))
        elif k == "var":
            b = self.bounds.get(n.args[0])
            if b is not None:
                out = tuple(b)
        elif k in ("add", "sub", "mul"):
            a, b = (self.of(x) for x in n.args[:2])
            if k == "add":
                slo, shi = a[2] + b[2], a[3] + b[3]
                ulo, uhi = a[0] + b[0], a[1] + b[1]
            elif k == "sub":
                slo, shi = a[2] - b[3], a[3] - b[2]
                ulo, uhi = a[0] - b[1], a[1] - b[0]
            else:
                prods = [x * y for x in a[2:] for y in b[2:]]
                slo, shi = min(prods), max(prods)
                ulo, uhi = a[0] * b[0], a[1] * b[1]
            su = (ulo, uhi) if 0 <= ulo and uhi <= umax else (0, umax)
            ss = (slo, shi) if smin <= slo and shi <= smax else (smin, smax)
            out = self._norm(w, (*su, *ss))
        elif k == "shl":
            a, b = n.args
            if b.kind == "const":
                ia = self.of(a)
                c = b.args[0]
                if c >= w:
                    out = (0, 0, 0, 0)
                elif ia[1] << c <= umax:
                    out = self._norm(w, (ia[0] << c, ia[1] << c, smin, smax))
        elif k == "lshr":
            a, b = n.args
            if b.kind == "const":
                ia = self.of(a)
                c = min(b.args[0], w)
                out = self._norm(w, (ia[0] >> c, ia[1] >> c, smin, smax))
        elif k == "udiv":
            a, b = n.args
            if b.kind == "const" and b.args[0] != 0:
                ia = self.of(a)
                c = b.args[0]
                out = self._norm(w, (ia[0] // c, ia[1] // c, smin, smax))
        elif k == "urem":
            a, b = n.args
            if b.kind == "const" and b.args[0] != 0:
                ia = self.of(a)
                c = b.args[0]
                if ia[1] < c:
                    out = self._norm(w, (ia[0], ia[1], smin, smax))
                else:
                    out = self._norm(w, (0, c - 1, smin, smax))
        elif k == "and":
            a, b = (self.of(x) for x in n.args[:2])
            out = self._norm(w, (0, min(a[1], b[1]), smin, smax))
        elif k == "or":
            a, b = (self.of(x) for x in n.args[:2])
            hi = (1 << max(a[1], b[1]).bit_length()) - 1
            out = self._norm(w, (min(a[0], b[0]), min(hi, umax), smin, smax))
            # lower bound: or is at least each operand's minimum
            out = self._norm(w, (max(a[0], b[0], out[0]), out[1], out[2], out[3]))
        elif k == "xor":
            a, b = (self.of(x) for x in n.args[:2])
            hi = (1 << max(a[1], b[1]).bit_length()) - 1
            out = self._norm(w, (0, min(hi, umax), smin, smax))
        elif k == "ite":
            a, b = self.of(n.args[1]), self.of(n.args[2])
            out = (min(a[0], b[0]), max(a[1], b[1]), min(a[2], b[2]), max(a[3], b[3]))
        elif k == "zext":
            ia = self.of(n.args[1])
            out = self._norm(w, (ia[0], ia[1], smin, smax))
        elif k == "sext":
            ia = self.of(n.args[1])
            out = self._norm_signed(w, ia[2], ia[3])
        elif k == "extract":
            hi, lo, a = n.args
            ia = self.of(a)
            if lo == 0 and ia[1] <= bvarith.mask(n.width):
                out = self._norm(w, (ia[0], ia[1], smin, smax))
        self.memo[n.nid] = out
        return out

    def _norm(self, w: int, quad) -> tuple[int, int, int, int]:
        """Tighten the signed view from the unsigned one and vice versa."""
        ulo, uhi, slo, shi = quad
        smin, smax = -(1 << (w - 1)), (1 << (w - 1)) - 1
        umax = bvarith.mask(w)
        ulo, uhi = max(ulo, 0), min(uhi, umax)
        slo, shi = max(slo, smin), min(shi, smax)
        half = 1 << (w - 1)
        # unsigned -> signed
        if uhi < half:
            slo, shi = max(slo, ulo), min(shi, uhi)
        elif ulo >= half:
            slo, shi = max(slo, ulo - (1 << w)), min(shi, uhi - (1 << w))
        # signed -> unsigned
        if slo >= 0:
            ulo, uhi = max(ulo, slo), min(uhi, shi)
        elif shi < 0:
            ulo, uhi = max(ulo, slo + (1 << w)), min(uhi, shi + (1 << w))
        if ulo > uhi or slo > shi:
            # contradictory constraints; keep a hair of soundness by widening
            return self.full(w)
        return (ulo, uhi, slo, shi)

    def _norm_signed(self, w, slo, shi):
        smin, smax = -(1 << (w - 1)), (1 << (w - 1)) - 1
        return self._norm(w, (0, bvarith.mask(w), max(slo, smin), min(shi, smax)))


class Simplifier:
    """Rebuild a DAG bottom-up under variable bounds, folding decided atoms."""

    def __init__(self, table: TermTable, intervals: Intervals):
        self.t = table
        self.iv = intervals
        self.memo: dict[int, Node] = {}

    def run(self, n: Node) -> Node:
        got = self.memo.get(n.nid)
        if got is not None:
            return got
        t = self.t
        k = n.kind
        if k in ("const", "bconst"):
            out = n
        elif k == "var":
            b = self.iv.bounds.get(n.args[0])
            if b is not None and b[0] == b[1]:
                out = t.const(b[0], n.width)
            else:
                out = n
        elif k == "bnot":
            out = t.bnot(self.run(n.args[0]))
        elif k == "band":
            out = t.band([self.run(x) for x in n.args])
        elif k == "bor":
            out = t.bor([self.run(x) for x in n.args])
        elif k == "beq":
            out = t.beq(self.run(n.args[0]), self.run(n.args[1]))
        elif k in ("eq", "ult", "slt"):
            a, b = self.run(n.args[0]), self.run(n.args[1])
            out = self._atom(k, a, b)
        elif k == "ite":
            c = self.run(n.args[0])
            if c.kind == "bconst":
                out = self.run(n.args[1]) if c.args[0] else self.run(n.args[2])
            else:
                out = t.ite(c, self.run(n.args[1]), self.run(n.args[2]))
        elif k == "extract":
            hi, lo, a = n.args
            out = t.extract(hi, lo, self.run(a))
        elif k == "zext":
            out = t.zext(n.args[0], self.run(n.args[1]))
        elif k == "sext":
            out = t.sext(n.args[0], self.run(n.args[1]))
        elif k == "concat":
            out = t.concat(self.run(n.args[0]), self.run(n.args[1]))
        else:
            a, b = self.run(n.args[0]), self.run(n.args[1])
            out = t.bv2(k, a, b) if k in _FOLD_NAMES else t._node(k, n.width, (a, b))
        self.memo[n.nid] = out
        return out

    def _atom(self, kind: str, a: Node, b: Node) -> Node:
        t = self.t
        ia, ib = self.iv.of(a), self.iv.of(b)
        if kind == "ult":
            if ia[1] < ib[0]:
                return t.TRUE
            if ia[0] >= ib[1]:
                return t.FALSE
            return t.ult(a, b)
        if kind == "slt":
            if ia[3] < ib[2]:
                return t.TRUE
            if ia[2] >= ib[3]:
                return t.FALSE
            return t.slt(a, b)
        # eq: fold when either view proves disjointness
        if ia[1] < ib[0] or ib[1] < ia[0] or ia[3] < ib[2] or ib[3] < ia[2]:
            return t.FALSE
        return t.eq(a, b)
