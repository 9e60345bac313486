"""Child-process client for an SMT-LIB2 bit-vector solver.

The solver is an external executable configured by command line (default:
``z3 -in`` when present on PATH, otherwise the bundled ``patcheq.smtbv``
interpreter).  Commands used: set-logic, set-option, declare-const, assert,
check-sat, get-value, push, pop, exit.  A query that outlives its timeout
gets the session killed and reports unknown; unknown is never conflated with
sat or unsat.
"""

from __future__ import annotations

import os
import select
import shlex
import shutil
import subprocess
import sys
import time
from dataclasses import dataclass, field

from . import bvarith
from .formula import BvVar, Formula, serialize_formula
from .smtbv.sexpr import SexprError, parse_all

GRACE_MS = 2000

ENV_SOLVER_CMD = "PATCHEQ_SOLVER_CMD"
ENV_QUERY_TIMEOUT = "PATCHEQ_QUERY_TIMEOUT_MS"
ENV_BUDGET = "PATCHEQ_BUDGET_MS"


class SolverConfigError(Exception):
    """The solver executable is missing or the configuration is invalid."""


def bundled_solver_command() -> tuple[str, ...]:
    return (sys.executable, "-m", "patcheq.smtbv")


def default_solver_command() -> tuple[str, ...]:
    env_cmd = os.environ.get(ENV_SOLVER_CMD)
    if env_cmd:
        return tuple(shlex.split(env_cmd))
    if shutil.which("z3"):
        return ("z3", "-in")
    return bundled_solver_command()


@dataclass(frozen=True)
class SolverConfig:
    solver_cmd: tuple[str, ...] = field(default_factory=default_solver_command)
    query_timeout_ms: int = 10_000
    budget_ms: int = 120_000

    def __post_init__(self):
        if self.query_timeout_ms <= 0:
            raise SolverConfigError("query timeout must be positive")
        if self.budget_ms < self.query_timeout_ms:
            raise SolverConfigError("budget must be at least one query timeout")


def config_from_env(base: SolverConfig | None = None) -> SolverConfig:
    base = base or SolverConfig()
    timeout = int(os.environ.get(ENV_QUERY_TIMEOUT, base.query_timeout_ms))
    budget = int(os.environ.get(ENV_BUDGET, base.budget_ms))
    return SolverConfig(base.solver_cmd, timeout, budget)


@dataclass(frozen=True)
class SatResult:
    verdict: str  # 'sat' | 'unsat' | 'unknown'
    model: dict[str, int] | None = None  # sort-interpreted values

    def __post_init__(self):
        if self.verdict not in ("sat", "unsat", "unknown"):
            raise ValueError(f"bad verdict {self.verdict!r}")


class Budget:
    """Wall-clock budget for one analysis; expiry is an analysis-level outcome."""

    def __init__(self, budget_ms: int):
        self.deadline = time.monotonic() + budget_ms / 1000.0

    @property
    def expired(self) -> bool:
        return time.monotonic() >= self.deadline

    def remaining_ms(self) -> int:
        return max(0, int((self.deadline - time.monotonic()) * 1000))


class SolverSession:
    """One solver process; owned by exactly one analysis at a time."""

    def __init__(self, cfg: SolverConfig, decls: tuple[BvVar, ...] = ()):
        self.cfg = cfg
        self.decls: dict[str, BvVar] = {}
        self.dead = False
        self.query_count = 0
        env = os.environ.copy()
        if cfg.solver_cmd[:1] == (sys.executable,):
            # make the bundled solver importable when running from a checkout
            pkg_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            parts = [pkg_root] + [p for p in env.get("PYTHONPATH", "").split(os.pathsep) if p]
            env["PYTHONPATH"] = os.pathsep.join(parts)
        try:
            self.proc = subprocess.Popen(
                list(cfg.solver_cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                env=env,
            )
        except FileNotFoundError as err:
            raise SolverConfigError(f"solver executable not found: {cfg.solver_cmd[0]}") from err
        self._buffer = b""
        self._send("(set-logic QF_BV)")
        self._send(f"(set-option :timeout {cfg.query_timeout_ms})")
        for var in decls:
            self.declare(var)

    # --- plumbing ---

    def _send(self, text: str):
        if self.dead:
            raise SolverConfigError("session is dead")
        try:
            self.proc.stdin.write(text.encode() + b"\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self._teardown()
            raise ProtocolViolation("solver pipe closed")

    def _read_line(self, deadline: float) -> str | None:
        fd = self.proc.stdout.fileno()
        while True:
            nl = self._buffer.find(b"\n")
            if nl >= 0:
                line = self._buffer[:nl]
                self._buffer = self._buffer[nl + 1:]
                return line.decode().strip()
            timeout = deadline - time.monotonic()
            if timeout <= 0:
                return None
            ready, _, _ = select.select([fd], [], [], timeout)
            if not ready:
                return None
            chunk = os.read(fd, 65536)
            if not chunk:
                return None  # EOF
            self._buffer += chunk

    def _read_sexpr(self, deadline: float) -> list | None:
        text = ""
        while True:
            line = self._read_line(deadline)
            if line is None:
                return None
            text += line + "\n"
            try:
                parsed = parse_all(text)
            except SexprError:
                self._teardown()
                raise ProtocolViolation(f"unparsable solver reply: {text!r}")
            if parsed:
                return parsed[0]

    def _teardown(self):
        self.dead = True
        try:
            self.proc.kill()
        except OSError:
            pass

    def close(self):
        if not self.dead:
            try:
                self._send("(exit)")
            except Exception:
                pass
            self._teardown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # --- protocol operations ---

    def declare(self, var: BvVar):
        if var.name in self.decls:
            if self.decls[var.name] != var:
                raise ProtocolViolation(f"conflicting declaration of {var.name}")
            return
        self.decls[var.name] = var
        self._send(f"(declare-const {var.name} (_ BitVec {var.sort.width}))")

    def assert_formula(self, f: Formula):
        self._send(f"(assert {serialize_formula(f)})")

    def assert_text(self, text: str):
        self._send(f"(assert {text})")

    def push(self):
        self._send("(push 1)")

    def pop(self):
        self._send("(pop 1)")

    def check_sat(self) -> str:
        """Returns sat/unsat/unknown; timeout or protocol failure is unknown."""
        self.query_count += 1
        try:
            self._send("(check-sat)")
        except ProtocolViolation:
            return "unknown"
        deadline = time.monotonic() + (self.cfg.query_timeout_ms + GRACE_MS) / 1000.0
        while True:
            line = self._read_line(deadline)
            if line is None:
                self._teardown()
                return "unknown"
            if line in ("sat", "unsat", "unknown"):
                return line
            if line.startswith("(error"):
                self._teardown()
                return "unknown"
            # skip any informational output

    def get_values(self, variables: list[BvVar]) -> dict[str, int] | None:
        """Model values for exactly the requested variables, sort-interpreted."""
        names = " ".join(v.name for v in variables)
        try:
            self._send(f"(get-value ({names}))")
        except ProtocolViolation:
            return None
        deadline = time.monotonic() + (self.cfg.query_timeout_ms + GRACE_MS) / 1000.0
        try:
            reply = self._read_sexpr(deadline)
        except ProtocolViolation:
            return None
        if reply is None:
            self._teardown()
            return None
        by_name = {v.name: v for v in variables}
        out: dict[str, int] = {}
        try:
            for name, value in reply:
                var = by_name[name]
                raw = _parse_bv_value(value)
                if var.sort.signed:
                    out[name] = bvarith.to_signed(raw, var.sort.width)
                else:
                    out[name] = raw
        except (ValueError, KeyError, TypeError):
            self._teardown()
            return None
        if set(out) != set(by_name):
            self._teardown()
            return None
        return out

    def block_model(self, variables: list[BvVar], model: dict[str, int]):
        """Exclude one input assignment from all later checks in this session."""
        parts = []
        for var in variables:
            raw = bvarith.to_unsigned(model[var.name], var.sort.width)
            parts.append(f"(= {var.name} (_ bv{raw} {var.sort.width}))")
        conj = parts[0] if len(parts) == 1 else "(and " + " ".join(parts) + ")"
        self._send(f"(assert (not {conj}))")


class ProtocolViolation(Exception):
    pass


def _parse_bv_value(value) -> int:
    if isinstance(value, str):
        if value.startswith("#x"):
            return int(value[2:], 16)
        if value.startswith("#b"):
            return int(value[2:], 2)
        return int(value)
    if isinstance(value, list) and len(value) == 3 and value[0] == "_" and value[1].startswith("bv"):
        return int(value[1][2:])
    raise ValueError(f"unparsable bit-vector value {value!r}")


# --- one-shot convenience operations ---


def is_sat(decls, f: Formula, cfg: SolverConfig, model_vars=None) -> SatResult:
    """Single satisfiability query in a fresh session."""
    with SolverSession(cfg, tuple(decls)) as session:
        session.assert_formula(f)
        verdict = session.check_sat()
        if verdict == "sat" and model_vars:
            model = session.get_values(list(model_vars))
            if model is None:
                return SatResult("unknown")
            return SatResult("sat", model)
        return SatResult(verdict)


def get_model_projected(decls, f: Formula, project_vars, cfg: SolverConfig) -> SatResult:
    """Satisfiability plus a model restricted to the projection variables."""
    declared = {v.name for v in decls}
    for v in project_vars:
        if v.name not in declared:
            raise SolverConfigError(f"projection variable {v.name} is not declared")
    return is_sat(decls, f, cfg, model_vars=list(project_vars))


def block_model(session: SolverSession, project_vars, model: dict[str, int]):
    """Assert the negated equality conjunction for one input assignment."""
    session.block_model(list(project_vars), model)
