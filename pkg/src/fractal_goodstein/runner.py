"""Goodstein process driver, trace files, and independent trace checking.

A run steps a seed through upgrade-then-decrement over a dynamical
hierarchy, optionally attaching two kinds of termination evidence to each
step: a strictly decreasing theta certificate, and a psi witness chain whose
integers realize fundamental-sequence entries.  Traces serialize to JSONL
and can be re-checked from scratch: the verifier rebuilds the hierarchy,
recomputes every claim, and rejects any deviation.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import IO, Iterable

from .hierarchy import DEFAULT_HORIZON, FiniteHierarchy, HorizonError
from .interpretations import PsiInterpretation, ThetaInterpretation, majorize_witness
from .numerals import BitBudget, BudgetExceededError, superexp
from .ordinal_terms import (
    CntTerm,
    OrdinalError,
    as_cnt,
    compare_cnt,
    fund_seq_cnt,
    lift,
    parse_term,
    term_to_str,
)
from .successors import DynamicalHierarchy, dynamical

__all__ = [
    "StepRecord",
    "RunResult",
    "ChainStep",
    "ChainReport",
    "VerifyReport",
    "hierarchy_from_spec",
    "static_hierarchy_from_spec",
    "run",
    "write_trace",
    "verify_trace",
    "lower_bound_chain",
]

TRACE_FORMAT = "goodstein-trace"
TRACE_VERSION = 1

_CERT_ERRORS = (BudgetExceededError, HorizonError, OrdinalError, ValueError)


def _int_str(v: int) -> str:
    # CPython caps int-to-decimal conversion; traces may carry wide values
    if hasattr(sys, "get_int_max_str_digits"):
        need = v.bit_length() // 3 + 4
        if need > sys.get_int_max_str_digits():
            sys.set_int_max_str_digits(need)
    return str(v)


def _str_int(s: str) -> int:
    if hasattr(sys, "get_int_max_str_digits"):
        need = len(s) + 4
        if need > sys.get_int_max_str_digits():
            sys.set_int_max_str_digits(need)
    return int(s)


def _cnt_str(c: CntTerm) -> str:
    return term_to_str(lift(c))


def _parse_cnt(s: str) -> CntTerm:
    return as_cnt(parse_term(s))


def hierarchy_from_spec(
    spec: str,
    budget: BitBudget | None = None,
    horizon: int = DEFAULT_HORIZON,
) -> DynamicalHierarchy:
    """Parse a hierarchy description into a dynamical hierarchy.

    Understood forms: ``classic``, ``ouroboros``, ``diagonal``,
    ``finite-for: m``, ``plus-chain: b1,b2,...`` and ``finite: b1,b2,...``.
    A finite list runs as the start of its own successor chain.
    """
    budget = budget or BitBudget()
    s = spec.strip()
    if s == "classic":
        return dynamical("classic", budget=budget)
    if s == "ouroboros":
        return dynamical("ouroboros", budget=budget, horizon=horizon)
    if s == "diagonal":
        return dynamical("diagonal", budget=budget, horizon=horizon)
    head, sep, rest = s.partition(":")
    head = head.strip()
    if sep and head == "finite-for":
        return dynamical("finite-for", m=int(rest), budget=budget, horizon=horizon)
    if sep and head in ("plus-chain", "finite"):
        bases = [int(t) for t in rest.split(",") if t.strip()]
        return dynamical("plus-chain", start=bases, budget=budget, horizon=horizon)
    raise ValueError(f"unknown hierarchy description: {spec!r}")


def static_hierarchy_from_spec(spec: str) -> FiniteHierarchy:
    """Parse a finite hierarchy for interpretation and stage queries."""
    s = spec.strip()
    _, sep, rest = s.partition(":")
    if sep and s.split(":")[0].strip() == "finite":
        s = rest
    bases = [int(t) for t in s.split(",") if t.strip()]
    if not bases:
        raise ValueError(f"no bases in hierarchy description: {spec!r}")
    return FiniteHierarchy(bases)


@dataclass
class StepRecord:
    index: int
    value: int
    base: int
    theta: CntTerm | None = None
    psi_n: int | None = None
    psi_u: CntTerm | None = None


@dataclass
class RunResult:
    spec: str
    seed: int
    certify: str
    bit_budget: int
    max_steps: int | None
    records: list[StepRecord]
    outcome: str
    detail: str | None = None
    theta_stop: dict | None = None
    psi_stop: dict | None = None

    def trace_lines(self) -> list[str]:
        head = {
            "format": TRACE_FORMAT,
            "version": TRACE_VERSION,
            "hierarchy": self.spec,
            "seed": _int_str(self.seed),
            "caps": {
                "max_steps": self.max_steps,
                "bit_budget": self.bit_budget,
                "certify": self.certify,
            },
        }
        lines = [json.dumps(head)]
        for r in self.records:
            row: dict = {"i": r.index, "value": _int_str(r.value), "base": r.base}
            if r.theta is not None:
                row["theta"] = _cnt_str(r.theta)
            if r.psi_n is not None:
                row["psi"] = {"n": _int_str(r.psi_n), "u": _cnt_str(r.psi_u)}
            lines.append(json.dumps(row))
        tail = {
            "outcome": self.outcome,
            "steps": len(self.records),
            "detail": self.detail,
            "theta_stop": self.theta_stop,
            "psi_stop": self.psi_stop,
        }
        lines.append(json.dumps(tail))
        return lines


def write_trace(result: RunResult, out: IO[str]) -> None:
    for line in result.trace_lines():
        out.write(line + "\n")


def run(
    hierarchy: DynamicalHierarchy | str,
    seed: int,
    *,
    max_steps: int | None = None,
    budget: BitBudget | None = None,
    certify: str = "both",
    horizon: int = DEFAULT_HORIZON,
) -> RunResult:
    """Drive the upgrade-then-decrement process from a seed.

    certify picks the evidence attached to steps: "theta", "psi", "both" or
    "none".  Evidence generation that fails mid-run is recorded as a stop
    with its reason and never aborts the value sequence itself.
    """
    if certify not in ("theta", "psi", "both", "none"):
        raise ValueError(f"unknown certificate mode: {certify!r}")
    if seed < 0:
        raise ValueError("seeds are nonnegative")
    if isinstance(hierarchy, str):
        h = hierarchy_from_spec(hierarchy, budget, horizon)
    else:
        h = hierarchy
        if budget is not None and budget is not h.budget:
            raise ValueError(
                "a hierarchy object carries its own budget; "
                "pass a spec string to choose a different one"
            )
    bits = h.budget.bits
    records: list[StepRecord] = []
    theta_stop: dict | None = None
    psi_stop: dict | None = None
    want_theta = certify in ("theta", "both")
    want_psi = certify in ("psi", "both")
    value = seed
    psi_n: int | None = seed if want_psi else None
    prev_u: CntTerm | None = None
    outcome = "step_cap"
    detail: str | None = None
    i = 0
    while True:
        try:
            stage = h.stage(i)
            bound = h.step_bound(i)
        except (BudgetExceededError, HorizonError) as e:
            # the stage itself can be too expensive to materialize
            outcome = "budget_exceeded"
            detail = str(e)
            break
        if bound is not None and value > bound:
            raise ValueError(f"value exceeds the stage-{i} bound {bound}")
        try:
            base = stage.upper_base(value)
        except (BudgetExceededError, HorizonError) as e:
            # finding the base column can force materialization past the caps
            outcome = "budget_exceeded"
            detail = str(e)
            break
        rec = StepRecord(i, value, base)
        if want_theta and theta_stop is None:
            try:
                rec.theta = ThetaInterpretation(stage).value(value)
            except _CERT_ERRORS as e:
                theta_stop = {"step": i, "reason": str(e)}
        if want_psi and psi_stop is None:
            try:
                if psi_n > value:
                    raise OrdinalError("witness overtook the value")
                u = PsiInterpretation(stage).value(psi_n)
                if prev_u is not None and fund_seq_cnt(prev_u, i) != u:
                    raise OrdinalError("witness chain lost its linkage")
                rec.psi_n, rec.psi_u = psi_n, u
                prev_u = u
            except _CERT_ERRORS as e:
                psi_stop = {"step": i, "reason": str(e)}
        records.append(rec)
        if value == 0:
            outcome = "terminated"
            break
        if max_steps is not None and i >= max_steps:
            outcome = "step_cap"
            break
        if want_psi and psi_stop is None:
            try:
                psi_n = majorize_witness(
                    stage, h.plus_index(i), psi_n, i + 1, h.budget, h.plus_object(i)
                )
            except _CERT_ERRORS as e:
                psi_stop = {"step": i, "reason": str(e)}
                psi_n = None
        try:
            value = h.upgrade_step(i, value) - 1
        except (BudgetExceededError, HorizonError) as e:
            outcome = "budget_exceeded"
            detail = str(e)
            break
        i += 1
    return RunResult(
        spec=h.spec_string(),
        seed=seed,
        certify=certify,
        bit_budget=bits,
        max_steps=max_steps,
        records=records,
        outcome=outcome,
        detail=detail,
        theta_stop=theta_stop,
        psi_stop=psi_stop,
    )


@dataclass
class VerifyReport:
    ok: bool
    problems: list[str]
    outcome: str | None = None
    steps: int = 0


def _load_lines(source: str | Iterable[str]) -> list[str]:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return [ln for ln in fh.read().splitlines() if ln.strip()]
    return [ln for ln in source if ln.strip()]


def _try_majorize(h, target_step: int, n_prev: int):
    """Re-run the witness majorization leading into target_step."""
    i = target_step - 1
    try:
        nxt = majorize_witness(
            h.stage(i), h.plus_index(i), n_prev, target_step, h.budget, h.plus_object(i)
        )
    except _CERT_ERRORS as e:
        return False, None, str(e)
    return True, nxt, None


def _check_theta_stop(h, stop, missing: list[int], vals: list[int]) -> list[str]:
    """A declared theta stop must itself reproduce, not just be present."""
    if stop is None:
        return []
    if not isinstance(stop, dict) or not isinstance(stop.get("step"), int):
        return ["theta stop is malformed"]
    if not missing:
        return ["declared theta stop but every step carries a certificate"]
    fm = missing[0]
    if stop["step"] != fm:
        return [
            f"theta stop step {stop['step']} does not match"
            f" the first missing certificate at {fm}"
        ]
    try:
        ThetaInterpretation(h.stage(fm)).value(vals[fm])
    except _CERT_ERRORS as e:
        if str(e) != stop.get("reason"):
            return [f"step {fm}: theta stop reason does not reproduce"]
        return []
    return [f"step {fm}: declared theta stop does not reproduce"]


def _check_psi_stop(
    h,
    stop,
    missing: list[int],
    psi_ns: dict[int, int],
    vals: list[int],
    n_steps: int,
    outcome,
) -> list[str]:
    """A declared psi stop must reproduce at the step it names.

    A stop at the step before the first missing witness means majorization
    died; a stop at the first missing step means the witness arrived but the
    record-time checks rejected it.  A stop with no missing witness at all is
    only possible when the final majorization failed right before a budget
    death.  Each flavor is re-derived and its reason compared verbatim.
    """
    if stop is None:
        return []
    if not isinstance(stop, dict) or not isinstance(stop.get("step"), int):
        return ["psi stop is malformed"]
    reason = stop.get("reason")
    step = stop["step"]
    if not missing:
        last = n_steps - 1
        if last < 0 or step != last or outcome != "budget_exceeded":
            return ["declared psi stop but every step carries a witness"]
        ok, _, got = _try_majorize(h, last + 1, psi_ns[last])
        if ok:
            return [f"step {last}: declared psi stop does not reproduce"]
        if got != reason:
            return [f"step {last}: psi stop reason does not reproduce"]
        return []
    fm = missing[0]
    if step == fm - 1:
        ok, _, got = _try_majorize(h, fm, psi_ns[fm - 1])
        if ok:
            return [f"step {step}: declared psi stop does not reproduce"]
        if got != reason:
            return [f"step {step}: psi stop reason does not reproduce"]
        return []
    if step != fm:
        return [f"psi stop step {step} does not match the first missing witness at {fm}"]
    if fm == 0:
        nxt: int | None = vals[0]
        prev_u = None
    else:
        ok, nxt, got = _try_majorize(h, fm, psi_ns[fm - 1])
        if not ok:
            return [f"step {fm}: psi witness fails earlier than its declared stop: {got}"]
        try:
            prev_u = PsiInterpretation(h.stage(fm - 1)).value(psi_ns[fm - 1])
        except _CERT_ERRORS as e:
            return [f"step {fm - 1}: psi value does not recompute: {e}"]
    try:
        if nxt > vals[fm]:
            raise OrdinalError("witness overtook the value")
        u = PsiInterpretation(h.stage(fm)).value(nxt)
        if prev_u is not None and fund_seq_cnt(prev_u, fm) != u:
            raise OrdinalError("witness chain lost its linkage")
    except _CERT_ERRORS as e:
        if str(e) != reason:
            return [f"step {fm}: psi stop reason does not reproduce"]
        return []
    return [f"step {fm}: declared psi stop does not reproduce"]


def verify_trace(source: str | Iterable[str]) -> VerifyReport:
    """Re-derive every claim in a trace and report all deviations.

    The hierarchy is rebuilt from the header under the recorded bit budget;
    values, bases and certificates are recomputed from scratch, certificate
    chains are checked for strict descent and correct linkage, and the
    recorded outcome must reproduce, including a budget death.
    """
    problems: list[str] = []
    try:
        lines = _load_lines(source)
        rows = [json.loads(ln) for ln in lines]
    except (OSError, json.JSONDecodeError) as e:
        return VerifyReport(False, [f"unreadable trace: {e}"])
    if len(rows) < 2:
        return VerifyReport(False, ["trace needs a header and an outcome line"])
    head, steps, tail = rows[0], rows[1:-1], rows[-1]
    try:
        if head.get("format") != TRACE_FORMAT or head.get("version") != TRACE_VERSION:
            return VerifyReport(False, ["not a recognized trace header"])
        caps = head["caps"]
        seed = _str_int(head["seed"])
        certify = caps["certify"]
        max_steps = caps["max_steps"]
        h = hierarchy_from_spec(head["hierarchy"], BitBudget(caps["bit_budget"]))
    except (KeyError, TypeError, ValueError) as e:
        return VerifyReport(False, [f"malformed header: {e}"])
    if tail.get("steps") != len(steps):
        problems.append(
            f"outcome line claims {tail.get('steps')} steps, trace has {len(steps)}"
        )
    want_theta = certify in ("theta", "both")
    want_psi = certify in ("psi", "both")

    def stopped_by(kind: str, pos: int) -> bool:
        stop = tail.get(kind)
        return (
            isinstance(stop, dict)
            and isinstance(stop.get("step"), int)
            and stop["step"] <= pos
        )

    value = seed
    vals: list[int] = []
    theta_missing: list[int] = []
    psi_missing: list[int] = []
    psi_ns: dict[int, int] = {}
    prev_theta: CntTerm | None = None
    prev_psi: tuple[int, CntTerm] | None = None
    last_alive: tuple[int, int] | None = None
    replay_ok = True
    for pos, row in enumerate(steps):
        where = f"step {pos}"
        try:
            if row.get("i") != pos:
                problems.append(f"{where}: index {row.get('i')} out of order")
                replay_ok = False
                break
            got_value = _str_int(row["value"])
            if got_value != value:
                problems.append(f"{where}: value does not recompute")
                replay_ok = False
                break
            vals.append(value)
            stage = h.stage(pos)
            bound = h.step_bound(pos)
            if bound is not None and value > bound:
                problems.append(f"{where}: value exceeds the stage bound")
                replay_ok = False
                break
            if row.get("base") != stage.upper_base(value):
                problems.append(f"{where}: base does not recompute")
            theta_s = row.get("theta")
            if theta_s is not None:
                if not want_theta:
                    problems.append(f"{where}: theta certificate not allowed by caps")
                else:
                    cert = ThetaInterpretation(stage).value(value)
                    if _parse_cnt(theta_s) != cert:
                        problems.append(f"{where}: theta certificate does not recompute")
                    if prev_theta is not None and compare_cnt(cert, prev_theta) >= 0:
                        problems.append(f"{where}: theta certificate fails to decrease")
                    prev_theta = cert
            elif want_theta:
                theta_missing.append(pos)
                if not stopped_by("theta_stop", pos):
                    problems.append(f"{where}: theta certificate missing without a stop")
            psi_row = row.get("psi")
            if psi_row is not None:
                if not want_psi:
                    problems.append(f"{where}: psi witness not allowed by caps")
                else:
                    n = _str_int(psi_row["n"])
                    if n > value:
                        problems.append(f"{where}: psi witness exceeds the value")
                    u = PsiInterpretation(stage).value(n)
                    if _parse_cnt(psi_row["u"]) != u:
                        problems.append(f"{where}: psi value does not recompute")
                    if prev_psi is not None:
                        last_i, last_u = prev_psi
                        if last_i != pos - 1 or fund_seq_cnt(last_u, pos) != u:
                            problems.append(f"{where}: psi witness chain broken")
                    prev_psi = (pos, u)
                    psi_ns[pos] = n
            elif want_psi:
                psi_missing.append(pos)
                if not stopped_by("psi_stop", pos):
                    problems.append(f"{where}: psi witness missing without a stop")
        except _CERT_ERRORS as e:
            problems.append(f"{where}: recomputation failed: {e}")
            replay_ok = False
            break
        if value == 0:
            last_alive = None
            if pos != len(steps) - 1:
                problems.append(f"{where}: trace continues past termination")
                replay_ok = False
            break
        last_alive = (pos, value)
        if pos == len(steps) - 1:
            break
        try:
            value = h.upgrade_step(pos, value) - 1
        except (BudgetExceededError, HorizonError) as e:
            problems.append(f"{where}: upgrade dies before the trace ends: {e}")
            replay_ok = False
            break
    outcome = tail.get("outcome")
    if replay_ok:
        if want_theta:
            problems.extend(_check_theta_stop(h, tail.get("theta_stop"), theta_missing, vals))
        if want_psi:
            problems.extend(
                _check_psi_stop(
                    h, tail.get("psi_stop"), psi_missing, psi_ns, vals, len(steps), outcome
                )
            )
    if replay_ok:
        if outcome == "terminated":
            if not steps or _str_int(steps[-1]["value"]) != 0:
                problems.append("terminated outcome without a final zero")
            if tail.get("detail") is not None:
                problems.append("terminated outcome carries a death detail")
        elif outcome == "step_cap":
            if max_steps is None or len(steps) != max_steps + 1:
                problems.append("step_cap outcome does not match the step cap")
            elif last_alive is None:
                problems.append("step_cap outcome on a finished run")
            if tail.get("detail") is not None:
                problems.append("step_cap outcome carries a death detail")
        elif outcome == "budget_exceeded":
            if steps and last_alive is None:
                problems.append("budget_exceeded outcome on a finished run")
            else:
                # the death point is the upgrade, the next stage, or the
                # base column of the step that never got recorded
                try:
                    if last_alive is None:
                        nxt = seed
                        stage = h.stage(0)
                        h.step_bound(0)
                    else:
                        pos, v = last_alive
                        nxt = h.upgrade_step(pos, v) - 1
                        stage = h.stage(pos + 1)
                        h.step_bound(pos + 1)
                    stage.upper_base(nxt)
                    problems.append("claimed budget death does not reproduce")
                except (BudgetExceededError, HorizonError) as e:
                    if tail.get("detail") != str(e):
                        problems.append("budget death detail does not reproduce")
        else:
            problems.append(f"unknown outcome {outcome!r}")
    return VerifyReport(not problems, problems, outcome, len(steps))


@dataclass
class ChainStep:
    index: int
    n: int
    u: CntTerm
    linked: bool


@dataclass
class ChainReport:
    """A lower-bound witness chain next to the live value sequence.

    The chain realizes iterated fundamental-sequence entries by integers;
    linked steps carry checked linkage to their predecessor.  Failures on
    either side are reported verbatim, never swallowed.
    """

    k: int
    seed: int
    steps: list[ChainStep] = field(default_factory=list)
    complete: bool = False
    chain_failure: str | None = None
    run_values: list[int] = field(default_factory=list)
    run_failure: str | None = None

    @property
    def verified_steps(self) -> int:
        return sum(1 for s in self.steps if s.index > 0 and s.linked)


def lower_bound_chain(
    k: int,
    *,
    budget: BitBudget | None = None,
    horizon: int = DEFAULT_HORIZON,
    run_cap: int = 64,
) -> ChainReport:
    """Witness chain for the tower seed over the self-feeding hierarchy."""
    if k < 0:
        raise ValueError("chain depth must be nonnegative")
    budget = budget or BitBudget()
    oh = dynamical("ouroboros", budget=budget, horizon=horizon)
    seed = superexp(2, k + 1, budget)
    report = ChainReport(k=k, seed=seed)
    n = seed
    prev_u: CntTerm | None = None
    i = 0
    while True:
        try:
            stage = oh.stage(i)
            u = PsiInterpretation(stage).value(n)
        except _CERT_ERRORS as e:
            report.chain_failure = f"step {i}: {e}"
            break
        linked = prev_u is None or fund_seq_cnt(prev_u, i) == u
        report.steps.append(ChainStep(i, n, u, linked))
        if not linked:
            report.chain_failure = f"step {i}: linkage does not check"
            break
        if n == 0:
            report.complete = True
            break
        try:
            n = majorize_witness(stage, oh.plus_index(i), n, i + 1, budget, oh.plus_object(i))
        except _CERT_ERRORS as e:
            report.chain_failure = f"step {i}: {e}"
            break
        prev_u = u
        i += 1
    v = seed
    report.run_values.append(v)
    for j in range(run_cap):
        if v == 0:
            break
        try:
            v = oh.upgrade_step(j, v) - 1
        except (BudgetExceededError, HorizonError) as e:
            report.run_failure = f"step {j}: {e}"
            break
        report.run_values.append(v)
    else:
        report.run_failure = f"run cap of {run_cap} steps reached"
    return report
