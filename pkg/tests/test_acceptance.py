"""Exit criteria.  Each test prints one PASS/FAIL line per criterion."""

import json
import math
import random
import time
from fractions import Fraction

import pytest

from equidist import seqcore
from equidist.buck import SetWindow, measurability_gap, mu_upper_bound
from equidist.cli import main
from equidist.independence import crt_product_mean_exact, independence_gap, independence_suite
from equidist.meanstats import IDENTITY, Monomial, dyadic_grid, periodic_mean_exact, star_discrepancy, ud_test
from equidist.partition import (DecompositionRule, check_conditions_lim, check_conditions_un,
                                clustered, equipartition, ragged, system_ud_test, vdc_prefix)
from equidist.polyadic import example1_build, mean_drift, oscillation, uniform_limit_check
from equidist.seqcore import MultiplicativeAlpha, PeriodicList, VanDerCorput

GRID64 = dyadic_grid(6)


def random_periodic(rng, period):
    vals = []
    for _ in range(period):
        q = rng.randint(1, 20)
        vals.append(Fraction(rng.randint(0, q), q))
    return PeriodicList(tuple(vals))


def test_c1_crt_identity(acceptance):
    rng = random.Random(20261014)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(100):
        while True:
            M1, M2 = rng.randint(1, 50), rng.randint(1, 50)
            if math.gcd(M1, M2) == 1:
                break
        joint, e1, e2 = crt_product_mean_exact(random_periodic(rng, M1), random_periodic(rng, M2))
        failures += joint != e1 * e2
    dt = time.perf_counter() - t0
    acceptance("C1 exact CRT product identity", failures == 0 and dt < 5,
               f"{100 - failures}/100 exact, {dt:.2f}s")


def test_c2_vdc_uniform_distribution(acceptance):
    t0 = time.perf_counter()
    N = 2 ** 16
    dev = ud_test(VanDerCorput(2), [N], GRID64)[N]
    disc = star_discrepancy(seqcore.sample(VanDerCorput(2), N))
    dt = time.perf_counter() - t0
    acceptance("C2 van der Corput UD at 2^16", dev <= 5e-4 and disc <= 5e-4 and dt < 2,
               f"grid deviation {dev:.3g}, star discrepancy {disc:.3g}, {dt:.2f}s")


def test_c3_buck_optima(acceptance):
    t0 = time.perf_counter()
    bad = []
    for m in range(1, 7):
        for r in range(m):
            cost, _ = mu_upper_bound(SetWindow.from_expression(f"{r}+({m})", 10 ** 4), 12, "exact")
            if cost != Fraction(1, m):
                bad.append(f"{r}+({m})->{cost}")
    cost, _ = mu_upper_bound(SetWindow.from_expression("(2) | 1+(4)", 10 ** 4), 12, "exact")
    if cost != Fraction(3, 4):
        bad.append(f"(2)|1+(4)->{cost}")
    gap = measurability_gap(SetWindow.from_expression("0+(2)", 10 ** 4), 4)
    if gap != 0:
        bad.append(f"gap->{gap}")
    dt = time.perf_counter() - t0
    acceptance("C3 Buck density optima", not bad and dt < 30,
               f"{'all exact' if not bad else bad}, {dt:.2f}s")


def test_c4_independence_positive(acceptance):
    t0 = time.perf_counter()
    pair = [VanDerCorput(2), VanDerCorput(3)]
    g_hi = independence_gap(pair, [IDENTITY, IDENTITY], 10 ** 5)
    g_lo = independence_gap(pair, [IDENTITY, IDENTITY], 10 ** 3)
    alpha = independence_suite([MultiplicativeAlpha((2,), 2), MultiplicativeAlpha((3,), 2)],
                               [Monomial(1), Monomial(2)], [10 ** 5])
    dt = time.perf_counter() - t0
    ok = g_hi <= 1e-2 and g_hi < g_lo and alpha.gaps[-1] <= 2e-2 and dt < 10
    acceptance("C4 independence (coprime bases, disjoint primes)", ok,
               f"vdc gap 1e3={g_lo:.3g} 1e5={g_hi:.3g}; alpha max gap={alpha.gaps[-1]:.3g}; {dt:.2f}s")


def test_c5_independence_negative(acceptance):
    gap = independence_gap([VanDerCorput(2), VanDerCorput(2)], [IDENTITY, IDENTITY], 10 ** 5)
    acceptance("C5 duplicate sequences dependent", abs(gap - 1 / 12) <= 1e-3,
               f"gap {gap:.6f} vs 1/12 = {1 / 12:.6f}")


EQUI_LEVELS = [2, 4, 16, 64, 256, 1000]
VDC_LEVELS = [2, 4, 8, 12, 16]
SINGLETON = DecompositionRule("singleton")
NATURAL = DecompositionRule("natural")


def test_c6_partition_theorems(acceptance):
    notes = []
    for name, system, levels in (("equipartition", equipartition(), EQUI_LEVELS),
                                 ("vdc_prefix", vdc_prefix(), VDC_LEVELS)):
        un = check_conditions_un(system, SINGLETON, levels)
        for N, s1, s2 in zip(levels, un.first.statistics, un.second.statistics):
            if not (s1 <= 2 / system.size(N) and s2 <= 2 / system.size(N)):
                notes.append(f"{name} UN level {N}: {s1}, {s2}")
    ud = system_ud_test(equipartition(), EQUI_LEVELS, GRID64)
    notes += [f"equipartition UD level {N}: {s}" for N, s in ud.rows if s > 2 / N]
    ud_vdc = system_ud_test(vdc_prefix(), [16], GRID64)[16]
    if ud_vdc > 5e-4:
        notes.append(f"vdc_prefix UD level 16: {ud_vdc}")
    cl = system_ud_test(clustered(), [1, 2, 8, 64, 1000], GRID64)
    notes += [f"clustered UD level {N}: {s}" for N, s in cl.rows if s < 0.25]
    lim = check_conditions_lim(ragged(seed=0), NATURAL, list(range(1, 11)))
    notes += [f"ragged LIM1 level {N}: {s}" for N, s in lim.second.rows if s < 1.5]
    acceptance("C6 partition sufficient conditions", not notes,
               "; ".join(notes) or f"vdc_prefix UD at 2^16 = {ud_vdc}, ragged LIM1 = "
               f"{min(lim.second.statistics)}")


def test_c7_polyadic_oscillation(acceptance):
    bad = [k for k in range(1, 9) if not oscillation(VanDerCorput(2), 2 ** k, 2 ** 15) <= 2.0 ** -k]
    alpha = oscillation(MultiplicativeAlpha((2,), 2), 2, 10 ** 4)
    rng = random.Random(99)
    specs = [VanDerCorput(2), VanDerCorput(3), VanDerCorput(5), MultiplicativeAlpha((2, 3), 2),
             MultiplicativeAlpha((5, 7), 2.5),
             PeriodicList(tuple(Fraction(rng.randint(0, 12), 12) for _ in range(30)))]
    violations = 0
    for _ in range(200):
        spec = rng.choice(specs)
        m = rng.randint(1, 30)
        m2 = m * rng.randint(1, 8)
        N = rng.randint(m2, 5000)
        violations += oscillation(spec, m2, N) > oscillation(spec, m, N)
    acceptance("C7 polyadic oscillation", not bad and alpha == 0 and violations == 0,
               f"vdc bound fails at k={bad}, alpha osc={alpha}, monotonicity violations={violations}/200")


def test_c8_example1(acceptance):
    chain = [2, 4, 8, 16, 32]
    system = example1_build(chain, 1)
    rows = uniform_limit_check(system, len(chain) - 1, 10 ** 3)
    rows_ok = all(r.passed and r.sup_difference <= 1 / B for r, B in zip(rows, chain))
    drift = mean_drift(system)
    drift_ok = all(d <= Fraction(1, B) for d, B in zip(drift, chain))
    acceptance("C8 Example 1 construction", rows_ok and drift_ok,
               f"sup diffs {[r.sup_difference for r in rows]}, mean drift {[str(d) for d in drift]}")


def _cli_runs(tmp_path):
    docs = {
        "c2_ud": ("udtest", {"spec": {"kind": "van_der_corput", "base": 2}},
                  ["--horizons", "1024,4096,16384,65536"]),
        "c2_disc": ("discrepancy", {"spec": {"kind": "van_der_corput", "base": 2}},
                    ["--horizons", "1024,65536"]),
        "c4_vdc": ("indep", {"specs": [{"kind": "van_der_corput", "base": 2},
                                       {"kind": "van_der_corput", "base": 3}],
                             "family": [{"kind": "monomial", "degree": 1}]},
                   ["--horizons", "1000,100000"]),
        "c4_alpha": ("indep", {"specs": [{"kind": "multiplicative_alpha", "primes": [2], "exponent": 2},
                                         {"kind": "multiplicative_alpha", "primes": [3], "exponent": 2}],
                               "family": [{"kind": "monomial", "degree": 1},
                                          {"kind": "monomial", "degree": 2}]},
                     ["--horizons", "1000,10000,100000"]),
        "c6_equi": ("partition-check", {"system": {"kind": "builtin", "name": "equipartition"}},
                    ["--horizons", ",".join(map(str, EQUI_LEVELS))]),
        "c6_vdc": ("partition-check", {"system": {"kind": "builtin", "name": "vdc_prefix"}},
                   ["--horizons", ",".join(map(str, VDC_LEVELS))]),
        "c6_clustered": ("partition-check", {"system": {"kind": "builtin", "name": "clustered"},
                                             "rule": "natural"}, ["--horizons", "1,8,64"]),
        "c6_ragged": ("partition-check", {"system": {"kind": "builtin", "name": "ragged"},
                                          "rule": "natural"}, ["--horizons", "1,4,8", "--seed", "3"]),
    }
    outputs = {}
    for key, (cmd, doc, extra) in docs.items():
        src = tmp_path / f"{key}.json"
        src.write_text(json.dumps(doc))
        for fmt in ("csv", "json"):
            for jobs in (1, 4, 8):
                out = tmp_path / f"{key}.{jobs}.{fmt}"
                code = main([cmd, "--input", str(src), "--output", str(out), "--format", fmt,
                             "--jobs", str(jobs), *extra])
                assert code == 0, (key, jobs)
                outputs.setdefault((key, fmt), []).append(out.read_bytes())
    return outputs


def test_c9_determinism(tmp_path, acceptance):
    outputs = _cli_runs(tmp_path)
    differing = [f"{k}.{fmt}" for (k, fmt), blobs in outputs.items() if len(set(blobs)) != 1]
    acceptance("C9 byte-identical outputs for --jobs 1, 4, 8", not differing,
               f"{len(outputs)} output pairs compared" if not differing else f"differ: {differing}")
