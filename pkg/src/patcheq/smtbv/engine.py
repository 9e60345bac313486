"""Check-sat pipeline: harvest bounds, simplify, probe, then bit-blast.

The assertion stack mirrors SMT-LIB push/pop.  Definitional clauses from
bit-blasting are permanent; per-level assertions enter the SAT solver as
assumptions, so popped state costs nothing and learned clauses survive.
Every sat answer is validated by concrete evaluation of the original
assertions before it is reported.
"""

from __future__ import annotations

import time
from itertools import product

from .. import bvarith
from .sat import Solver
from .bitblast import Blaster
from .terms import Intervals, Node, Simplifier, TermTable, const_values, eval_node, free_vars

PROBE_COMBO_CAP = 1024
PROBE_CANDIDATES_PER_VAR = 16


class SmtError(Exception):
    pass


class SmtEngine:
    def __init__(self):
        self.table = TermTable()
        self.solver = Solver()
        self.blaster = Blaster(self.solver)
        self.decl_levels: list[dict[str, int]] = [{}]  # name -> width
        self.assert_levels: list[list[Node]] = [[]]
        self.timeout_ms: int | None = None
        self.last_model: dict[str, int] | None = None

    # --- state management ---

    def declare(self, name: str, width: int):
        for lvl in self.decl_levels:
            if name in lvl:
                raise SmtError(f"{name} already declared")
        self.decl_levels[-1][name] = width

    def lookup_width(self, name: str) -> int | None:
        for lvl in reversed(self.decl_levels):
            if name in lvl:
                return lvl[name]
        return None

    def assert_node(self, node: Node):
        if node.width != 0:
            raise SmtError("assert requires a boolean term")
        self.assert_levels[-1].append(node)
        self.last_model = None

    def push(self, n: int = 1):
        for _ in range(n):
            self.assert_levels.append([])
            self.decl_levels.append({})

    def pop(self, n: int = 1):
        for _ in range(n):
            if len(self.assert_levels) == 1:
                raise SmtError("pop past the root level")
            self.assert_levels.pop()
            self.decl_levels.pop()
        self.last_model = None

    def reset(self):
        self.__init__()

    def declared(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for lvl in self.decl_levels:
            out.update(lvl)
        return out

    # --- bounds harvesting ---

    def _harvest_bounds(self, actives: list[Node]):
        """Intersect top-level interval facts per variable; None if contradictory."""
        bounds: dict[str, list[int]] = {}

        def get(var: Node) -> list[int]:
            name = var.args[0]
            b = bounds.get(name)
            if b is None:
                w = var.width
                b = [0, bvarith.mask(w), -(1 << (w - 1)), (1 << (w - 1)) - 1]
                bounds[name] = b
            return b

        def atom(n: Node, positive: bool):
            if n.kind == "bnot":
                atom(n.args[0], not positive)
                return
            if n.kind not in ("ult", "slt", "eq"):
                return
            a, b = n.args
            if a.kind == "var" and b.kind == "const":
                var, cst, var_left = a, b.args[0], True
            elif a.kind == "const" and b.kind == "var":
                var, cst, var_left = b, a.args[0], False
            else:
                return
            w = var.width
            bb = get(var)
            if n.kind == "eq":
                if positive:
                    s = bvarith.to_signed(cst, w)
                    bb[0] = max(bb[0], cst)
                    bb[1] = min(bb[1], cst)
                    bb[2] = max(bb[2], s)
                    bb[3] = min(bb[3], s)
                return
            if n.kind == "ult":
                if var_left:
                    if positive:
                        bb[1] = min(bb[1], cst - 1)  # v < c
                    else:
                        bb[0] = max(bb[0], cst)  # v >= c
                else:
                    if positive:
                        bb[0] = max(bb[0], cst + 1)  # c < v
                    else:
                        bb[1] = min(bb[1], cst)  # v <= c
                return
            s = bvarith.to_signed(cst, w)
            if var_left:
                if positive:
                    bb[3] = min(bb[3], s - 1)
                else:
                    bb[2] = max(bb[2], s)
            else:
                if positive:
                    bb[2] = max(bb[2], s + 1)
                else:
                    bb[3] = min(bb[3], s)

        def spine(n: Node):
            if n.kind == "band":
                for x in n.args:
                    spine(x)
            else:
                atom(n, True)

        for a in actives:
            spine(a)

        iv = Intervals({})
        for name, b in bounds.items():
            w = None
            for lvl in self.decl_levels:
                if name in lvl:
                    w = lvl[name]
            if w is None:
                continue
            normalized = iv._norm(w, tuple(b))
            full = iv.full(w)
            if b[0] > b[1] or b[2] > b[3]:
                return None  # contradictory range facts
            if normalized == full and (b[0] > b[1] or b[2] > b[3]):
                return None
            bounds[name] = list(normalized)
        return bounds

    def _bound_constraints(self, bounds: dict[str, list[int]]) -> list[Node]:
        """Re-materialize harvested bounds so they are never simplified away."""
        t = self.table
        out = []
        for name, (ulo, uhi, slo, shi) in bounds.items():
            w = self.lookup_width(name)
            if w is None:
                continue
            v = t.var(name, w)
            if ulo > 0:
                out.append(t.bnot(t.ult(v, t.const(ulo, w))))
            if uhi < bvarith.mask(w):
                out.append(t.bnot(t.ult(t.const(uhi, w), v)))
            if slo > -(1 << (w - 1)):
                out.append(t.bnot(t.slt(v, t.const(bvarith.to_unsigned(slo, w), w))))
            if shi < (1 << (w - 1)) - 1:
                out.append(t.bnot(t.slt(t.const(bvarith.to_unsigned(shi, w), w), v)))
        return out

    # --- probing for easy models ---

    def _candidates(self, name: str, width: int, bounds, consts) -> list[int]:
        vals = {0, 1, bvarith.mask(width), 1 << (width - 1), (1 << (width - 1)) - 1}
        b = bounds.get(name)
        if b is not None:
            ulo, uhi, slo, shi = b
            mid = (ulo + uhi) // 2
            for v in (ulo, uhi, mid, ulo + 1, uhi - 1,
                      bvarith.to_unsigned(slo, width), bvarith.to_unsigned(shi, width)):
                vals.add(v & bvarith.mask(width))
        for c in consts:
            vals.add(c)
            vals.add((c + 1) & bvarith.mask(width))
            vals.add((c - 1) & bvarith.mask(width))
        ordered = sorted(vals)
        if b is not None:
            ulo, uhi = b[0], b[1]
            ordered = [v for v in ordered if ulo <= v <= uhi] or ordered
        return ordered[:PROBE_CANDIDATES_PER_VAR]

    def _probe(self, actives: list[Node], bounds) -> dict[str, int] | None:
        variables: dict[str, Node] = {}
        for a in actives:
            free_vars(a, variables)
        if not variables or len(variables) > 4:
            return None
        # equation partners: eq(v, t) lets us derive candidate values for v
        partners: dict[str, list[Node]] = {name: [] for name in variables}
        seen: set[int] = set()
        stack = list(actives)
        while stack:
            n = stack.pop()
            if n.nid in seen:
                continue
            seen.add(n.nid)
            if n.kind == "eq":
                a, b = n.args
                if a.kind == "var" and b.kind != "var":
                    partners[a.args[0]].append(b)
                elif b.kind == "var" and a.kind != "var":
                    partners[b.args[0]].append(a)
            stack.extend(x for x in n.args if isinstance(x, Node))

        consts: set[int] = set()
        for a in actives:
            const_values(a, max(v.width for v in variables.values()), consts)

        derived = [n for n in sorted(variables) if partners[n]]
        base = [n for n in sorted(variables) if not partners[n]]
        if not base:
            base, derived = derived[:1], derived[1:]
        cand = {
            name: self._candidates(name, variables[name].width, bounds, consts
                                    if variables[name].width == max(v.width for v in variables.values())
                                    else set())
            for name in base
        }
        total = 1
        for name in base:
            total *= len(cand[name])
        if total > PROBE_COMBO_CAP:
            return None

        masks = {name: bvarith.mask(variables[name].width) for name in variables}
        for combo in product(*(cand[name] for name in base)):
            env = dict(zip(base, combo))
            ok = True
            for name in derived:
                options = set()
                for term in partners[name]:
                    fv = free_vars(term)
                    if all(v in env for v in fv):
                        options.add(eval_node(term, env) & masks[name])
                options.add(0)
                chosen = None
                for opt in sorted(options):
                    env[name] = opt
                    if all(self._try_eval(a, env) for a in actives if self._closed(a, env)):
                        chosen = opt
                        break
                if chosen is None:
                    ok = False
                    break
                env[name] = chosen
            if not ok:
                continue
            if all(eval_node(a, env, {}) for a in actives):
                return env
        return None

    @staticmethod
    def _closed(node: Node, env: dict[str, int]) -> bool:
        return all(name in env for name in free_vars(node))

    @staticmethod
    def _try_eval(node: Node, env: dict[str, int]) -> bool:
        return bool(eval_node(node, env, {}))

    # --- the main decision procedure ---

    def check_sat(self) -> str:
        self.last_model = None
        actives = [n for lvl in self.assert_levels for n in lvl]
        if any(n is self.table.FALSE for n in actives):
            return "unsat"
        actives = [n for n in actives if n is not self.table.TRUE]
        if not actives:
            self.last_model = {}
            return "sat"

        deadline = None
        if self.timeout_ms is not None:
            deadline = time.monotonic() + self.timeout_ms / 1000.0

        bounds = self._harvest_bounds(actives)
        if bounds is None:
            return "unsat"

        iv = Intervals(bounds)
        simplifier = Simplifier(self.table, iv)
        simplified = []
        for a in actives:
            s = simplifier.run(a)
            if s is self.table.FALSE:
                return "unsat"
            if s is not self.table.TRUE:
                simplified.append(s)
        blast_set = simplified + self._bound_constraints(bounds)

        if not blast_set:
            model = {name: bounds.get(name, [0])[0] for name in self.declared()}
            if all(eval_node(a, model, {}) for a in actives):
                self.last_model = model
                return "sat"

        probed = self._probe(actives, bounds)
        if probed is not None:
            model = {name: probed.get(name, 0) for name in self.declared()}
            for name, b in bounds.items():
                if name not in probed and name in model:
                    model[name] = b[0]
            if all(eval_node(a, model, {}) for a in actives):
                self.last_model = model
                return "sat"

        result = self._solve_cnf(blast_set, actives, deadline)
        if result is not None:
            return result
        # simplified pipeline produced an invalid model: solve the originals
        result = self._solve_cnf(actives, actives, deadline)
        return result if result is not None else "unknown"

    def _solve_cnf(self, blast_set: list[Node], originals: list[Node], deadline) -> str | None:
        assumptions = []
        for node in blast_set:
            lit = self.blaster.blast(node)
            if lit == self.blaster.FALSE:
                return "unsat"
            if lit != self.blaster.TRUE:
                assumptions.append(lit)
        verdict = self.solver.solve(assumptions, deadline=deadline)
        if verdict is None:
            return "unknown"
        if verdict is False:
            return "unsat"
        model = {}
        declared = self.declared()
        for name, width in declared.items():
            value = self.blaster.model_value(name, width)
            if value is None:
                value = 0
            model[name] = value
        ok = all(eval_node(a, model, {}) for a in originals)
        self.solver._backtrack(0)
        if not ok:
            return None  # caller falls back to the unsimplified instance
        self.last_model = model
        return "sat"

    def get_values(self, names: list[str]) -> list[tuple[str, int, int]]:
        if self.last_model is None:
            raise SmtError("no model available; call check-sat first")
        out = []
        for name in names:
            width = self.lookup_width(name)
            if width is None:
                raise SmtError(f"unknown constant {name}")
            out.append((name, self.last_model.get(name, 0), width))
        return out
