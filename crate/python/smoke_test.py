#!/usr/bin/env python3
"""Smoke test for the tsqc Python extension module.

Builds the extension if needed, imports it from the cargo target directory,
and exercises the analytic rules, the Monte Carlo oracle, and the canned
scenarios. Exits nonzero on the first failure.
"""

import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_or_build_extension() -> Path:
    candidates = [
        ROOT / "target" / "release" / "libtsqc.so",
        ROOT / "target" / "debug" / "libtsqc.so",
    ]
    existing = [p for p in candidates if p.exists()]
    if not existing:
        print("building tsqc-py (release)...")
        subprocess.run(
            ["cargo", "build", "--release", "-p", "tsqc-py"],
            cwd=ROOT,
            check=True,
        )
        existing = [p for p in candidates if p.exists()]
    # Prefer the most recently built artifact.
    return max(existing, key=lambda p: p.stat().st_mtime)


def import_tsqc():
    lib = locate_or_build_extension()
    stage = Path(tempfile.mkdtemp(prefix="tsqc_py_"))
    shutil.copy2(lib, stage / "tsqc.so")
    sys.path.insert(0, str(stage))
    import tsqc  # noqa: E402

    return tsqc


def approx(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol


def main() -> int:
    t = import_tsqc()
    print(f"imported tsqc {t.__version__} (generator: {t.generator_id()})")

    checks = 0

    def ok(name: str, condition: bool) -> None:
        nonlocal checks
        if not condition:
            print(f"FAIL: {name}")
            raise SystemExit(1)
        checks += 1
        print(f"ok: {name}")

    # Basic linear algebra.
    inv3 = 1.0 / math.sqrt(3.0)
    a = t.Ket([inv3, inv3, inv3])
    b = t.Ket([inv3, inv3, -inv3])
    ok("inner product (1,1,1)/sqrt3 . (1,1,-1)/sqrt3 = 1/3",
       approx(a.inner(b).real, 1.0 / 3.0) and approx(a.inner(b).imag, 0.0))

    # Three holes: both coarse counterfactuals are certain.
    s = t.three_holes()
    ts = s.two_state
    m1, m2, m_full = s.candidates()
    abl1 = dict(t.abl(ts, m1))
    abl2 = dict(t.abl(ts, m2))
    ok("three holes: p(hole1|M1) = 1", approx(abl1["hole1"], 1.0))
    ok("three holes: p(hole2|M2) = 1", approx(abl2["hole2"], 1.0))

    abl_full = dict(t.abl(ts, m_full))
    ok("three holes: fine-grained rule is uniform",
       all(approx(p, 1.0 / 3.0) for p in abl_full.values()))

    # Rival rule fails to normalize on the fine-grained measurement.
    weights, normalized = t.kastner_rule(ts, m_full)
    ok("kastner weights are (1,1,1), sum 3, not normalized",
       all(approx(w, 1.0) for _, w in weights)
       and approx(sum(w for _, w in weights), 3.0)
       and not normalized)

    # Born rules on the fine-grained measurement.
    bp = dict(t.born_predictive(ts.pre, m_full))
    br = dict(t.born_retrodictive(ts.post, m_full))
    ok("born rules are uniform over the holes",
       all(approx(p, 1.0 / 3.0) for p in bp.values())
       and all(approx(p, 1.0 / 3.0) for p in br.values()))

    # Ignorance mixture of the plus state dephases to diag(1/2, 1/2).
    plus = t.Ket([1.0, 1.0])
    z = t.Measurement.from_partition("Z", 2, [("0", [0]), ("1", [1])])
    rho = t.mixture_at_t(plus, z)
    ok("mixture_at_t dephases the plus state",
       approx(rho[0][0].real, 0.5) and approx(rho[1][1].real, 0.5)
       and abs(rho[0][1]) < 1e-12)

    # Oracle agrees with the analytic rule.
    report = t.run_pre_post_selected(ts.pre, m_full, s.final_measurement, s.b_label,
                                     trials=50_000, seed=7)
    verdict = t.compare(report, t.abl(ts, m_full), k_sigma=5.0)
    ok("oracle run matches the analytic rule at 5 sigma", verdict.passed)
    ok("oracle kept fraction near 1/3",
       abs(report.trials_kept / report.trials_total - 1.0 / 3.0) < 0.02)

    # Determinism: same seed, same counts.
    again = t.run_pre_post_selected(ts.pre, m_full, s.final_measurement, s.b_label,
                                    trials=50_000, seed=7)
    ok("oracle runs are deterministic in the seed",
       report.outcomes() == again.outcomes())

    # Full JSON report round-trips through json and passes everywhere.
    doc = json.loads(t.counterfactual_report_json(s, trials=20_000, seed=42))
    ok("report JSON carries reproduction metadata",
       doc["seed"] == 42 and doc["generator"] == t.generator_id())
    ok("report JSON verdicts all pass",
       all(c["verdict"]["pass"] for c in doc["candidates"]))

    # Quantum raffle contradiction.
    raffle = json.loads(t.quantum_raffle(10, held=False, seed=3))
    ok("raffle not held: every reading is null",
       raffle["nulls"] == 10 and raffle["tails"] == 0 and raffle["heads"] == 0)
    ok("raffle stipulation flagged as contradiction",
       raffle["contradiction"]["contradiction"]
       and raffle["contradiction"]["analytic_probability"] == 0.0)

    # Scenario file loading matches the in-memory construction.
    loaded = t.load_scenario(str(ROOT / "scenarios" / "three_holes.json"))
    ok("scenario file loads and agrees with the built-in scenario",
       loaded.name == "three_holes"
       and approx(dict(t.abl(loaded.two_state, loaded.candidates()[0]))["hole1"], 1.0))

    # Random scenarios are deterministic and feasible.
    r1 = t.random_scenario(4, 99)
    r2 = t.random_scenario(4, 99)
    ok("random scenarios are deterministic",
       r1.candidates()[0].labels() == r2.candidates()[0].labels())
    ok("random scenario postselection probability >= 1e-3",
       all(r1.postselection_probability(m) >= 1e-3 for m in r1.candidates()))

    # Error paths surface as ValueError.
    try:
        t.abl(t.TwoState(t.Ket.basis_state(2, 0), t.Ket.basis_state(2, 1)), z)
    except ValueError as e:
        ok("impossible postselection raises ValueError", "impossible" in str(e))
    else:
        ok("impossible postselection raises ValueError", False)

    print(f"\nsmoke test passed ({checks} checks)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
