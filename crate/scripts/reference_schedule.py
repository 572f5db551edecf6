#!/usr/bin/env python3
"""Reference traces for the budgeted scheduler.

An independent, line-by-line transcription of the scheduling pseudocode
(temporal-refinement driver plus the step-count procedure) running against a
scripted cost model. It writes the JSON fixtures that the Rust test suites
replay bit-exactly:

    crates/core/tests/fixtures/calc_steps_cases.json
    crates/core/tests/fixtures/schedules/<name>.json

Usage: python3 scripts/reference_schedule.py [--check]
"""

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "crates" / "core" / "tests" / "fixtures"
INF = math.inf


class CostModel:
    def __init__(self, base=0.0, per_step=1.0, table=()):
        self.base = base
        self.per_step = per_step
        self.table = {(e["depth"], e["pass"]): e["seconds"] for e in table}

    def cost(self, depth, p):
        if (depth, p) in self.table:
            return self.table[(depth, p)]
        return self.base + self.per_step * float(depth * p)

    def to_json(self):
        return {
            "base": self.base,
            "per_step": self.per_step,
            "table": [
                {"depth": d, "pass": p, "seconds": s}
                for (d, p), s in sorted(self.table.items())
            ],
        }


class SimClock:
    def __init__(self, model):
        self.now = 0.0
        self.model = model

    def charge(self, depth, p, deadline):
        cost = max(self.model.cost(depth, p), 0.0)
        if self.now + cost > deadline:
            self.now = max(self.now, deadline)
            return False
        self.now += cost
        return True


def query(clock, depth, timeout, levels):
    """Anytime query: pass 1 always runs, later passes respect the timeout.
    Returns (elapsed, status)."""
    start = clock.now
    status = "nominal"
    for p in range(1, levels + 1):
        if p == 1:
            deadline = INF
        else:
            if clock.now - start >= timeout:
                status = "stopped_early"
                break
            deadline = start + timeout
        if not clock.charge(depth, p, deadline):
            status = "stopped_early"
            break
    return clock.now - start, status


def calc_steps(t_start, b_steps, b, data, t_est, n, phase, status):
    t_cur = t_start + b_steps
    rec = data[t_cur]
    t_est = max(t_est, rec["time"] / rec["steps"])
    if phase == "search" and status == "nominal":
        if n * t_est < b:
            return b_steps + 1, "search", t_est
        s_left = n - b_steps
        if s_left == 0:
            return b_steps, "jump", t_est
        num_jumps = math.ceil(s_left / b_steps)
        return math.ceil(s_left / num_jumps), "jump", t_est
    if phase == "search":
        s_left = n - b_steps
        if s_left == 0:
            return b_steps, "jump", t_est
        num_jumps = math.ceil(s_left / max(b_steps - 1, 1))
        return math.ceil(s_left / num_jumps), "jump", t_est
    if status == "stopped_early":
        return max(b_steps - 1, 1), "jump", t_est
    return b_steps, "jump", t_est


def refined_reach(n, budget, model, levels):
    clock = SimClock(model)
    timeout = max(budget, 0.0)
    phase = "search"
    b_steps = 1
    t_start = t_cur = 0
    b = budget
    t_est = 0.0
    covered = 0
    log = []
    mark = clock.now
    while t_cur < n:
        before = b
        elapsed_q, status = query(clock, b_steps, timeout, levels)
        data = {t_start + b_steps: {"time": elapsed_q, "steps": b_steps}}
        if phase == "search":
            pushed = [t_start + b_steps]
        else:
            pushed = list(range(t_start + 1, t_start + b_steps + 1))
        covered += len(pushed)
        t_cur = t_start + b_steps
        now = clock.now
        elapsed = now - mark
        mark = now
        b -= elapsed
        log.append(
            {
                "phase": phase,
                "t_start": t_start,
                "depth": b_steps,
                "status": status,
                "elapsed": elapsed,
                "budget_before": "inf" if before == INF else before,
                "pushed": pushed,
            }
        )
        nxt, phase, t_est = calc_steps(t_start, b_steps, b, data, t_est, n, phase, status)
        if phase == "jump":
            t_start += b_steps
        b_steps = min(nxt, n - t_start)
        timeout = max(b, 0.0)
    assert covered == n
    return log


SCHEDULES = [
    # cost(h) = h, single pass, budget 35 over ten steps
    ("linear_budget35", 10, 35.0, 1, CostModel(0.0, 1.0)),
    # no budget limit: pure search
    ("unlimited_n6", 6, INF, 2, CostModel(0.1, 0.25)),
    # three passes; the final pass at depth 3 overruns and stops the search
    (
        "search_stop",
        12,
        40.0,
        3,
        CostModel(
            0.05,
            0.1,
            [{"depth": 3, "pass": 3, "seconds": 50.0}],
        ),
    ),
    # superlinear refinement cost: jumps run out of budget and shrink
    (
        "jump_shrink",
        16,
        15.0,
        2,
        CostModel(
            0.0,
            0.125,
            [{"depth": d, "pass": 2, "seconds": 0.25 * d * d} for d in range(4, 17)],
        ),
    ),
    # affine cost with a fixed per-pass overhead
    ("overhead", 20, 12.5, 2, CostModel(0.2, 0.0625)),
]

# (phase, status, t_start, b_steps, b, t_est, n, time)
CALC_CASES = [
    ("search", "nominal", 0, 1, 11.0, 2.0, 5, 1.0),
    ("search", "nominal", 0, 4, 5.0, 1.0, 10, 4.0),
    ("search", "nominal", 0, 3, 10.0, 0.0, 10, 3.0),
    ("search", "nominal", 0, 4, 1.0, 0.0, 11, 4.0),
    ("search", "nominal", 0, 7, 7.0, 1.0, 10, 7.0),
    ("search", "nominal", 0, 4, 0.5, 0.1, 15, 0.4),
    ("search", "nominal", 0, 2, 100.0, 3.0, 10, 1.0),
    ("search", "nominal", 0, 2, 100.0, 3.0, 10, 30.0),
    ("search", "nominal", 0, 6, 1.0, 1.0, 6, 6.0),
    ("search", "stopped_early", 0, 4, 50.0, 1.0, 10, 2.0),
    ("search", "stopped_early", 0, 1, 50.0, 0.0, 10, 2.0),
    ("search", "stopped_early", 0, 2, 3.0, 0.5, 8, 2.0),
    ("search", "stopped_early", 0, 5, 3.0, 0.5, 20, 2.0),
    ("jump", "stopped_early", 6, 1, 0.0, 1.0, 10, 1.0),
    ("jump", "stopped_early", 4, 3, 2.0, 1.0, 10, 3.0),
    ("jump", "nominal", 4, 3, 2.0, 1.0, 10, 6.0),
    ("jump", "nominal", 2, 2, 1e9, 0.0, 10, 0.0),
]


def build():
    cases = []
    for phase, status, t_start, b_steps, b, t_est, n, time in CALC_CASES:
        data = {t_start + b_steps: {"time": time, "steps": b_steps}}
        steps, phase2, t_est2 = calc_steps(t_start, b_steps, b, data, t_est, n, phase, status)
        cases.append(
            {
                "input": {
                    "phase": phase,
                    "status": status,
                    "t_start": t_start,
                    "b_steps": b_steps,
                    "b": b,
                    "t_est": t_est,
                    "n": n,
                    "time": time,
                },
                "expect": {"b_steps": steps, "phase": phase2, "t_est": t_est2},
            }
        )
    files = {OUT / "calc_steps_cases.json": cases}
    for name, n, budget, levels, model in SCHEDULES:
        files[OUT / "schedules" / f"{name}.json"] = {
            "name": name,
            "horizon": n,
            "budget": "inf" if budget == INF else budget,
            "refine_levels": levels,
            "cost_model": model.to_json(),
            "log": refined_reach(n, budget, model, levels),
        }
    return files


def main():
    check = "--check" in sys.argv[1:]
    stale = []
    for path, doc in build().items():
        text = json.dumps(doc, indent=2) + "\n"
        if check:
            if not path.exists() or path.read_text() != text:
                stale.append(path)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
    if stale:
        for p in stale:
            print(f"stale: {p.relative_to(ROOT)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
