"""Acceptance criteria, one test each.

Every test prints a ``PASS``/``FAIL`` line that is also collected into the
terminal summary.  Expected values are recomputed here from closed forms or
brute force, not taken from the package.
"""

import csv
import itertools
import math
import os
import statistics
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from radcomplex.suites import (
    suite_contraction_exact,
    suite_counterexample,
    suite_coverage,
    suite_frobenius,
    suite_khintchine,
    suite_ltl,
    suite_product,
    suite_tails,
)

SEED = 7


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def verdicts(rows):
    return [r.verdict for r in rows]


@pytest.fixture(scope="session")
def suite_all_csv(tmp_path_factory):
    """``suite --all --seed 7`` three times: auto threads twice, then one thread."""
    out = tmp_path_factory.mktemp("suite_all")
    runs = []
    for label, threads in (("auto1", "0"), ("auto2", "0"), ("single", "1")):
        env = dict(os.environ, RADCOMPLEX_THREADS=threads)
        path = out / f"{label}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "radcomplex", "suite", "--all", "--seed", str(SEED), "--csv", str(path)],
            env=env, capture_output=True, text=True, check=False,
        )
        runs.append((label, proc, path.read_bytes() if path.exists() else b""))
    return runs


def test_criterion_01_counterexample():
    rows, secs = timed(suite_counterexample, SEED)
    by = {(r.instance_id, r.quantity): r for r in rows}
    ok = True
    for n in (1, 4, 16, 64, 256):
        iid = f"ce-n{n}"
        ok &= by[iid, "lhs"].mean == n / 2 and by[iid, "rhs"].mean == math.sqrt(n)
        if n <= 20:
            pats = list(itertools.product([0, 1], repeat=n))
            oracle = math.fsum(sum(p) for p in pats) / len(pats)
            ok &= abs(by[iid, "lhs_crosscheck"].mean - oracle) <= 1e-12
            ok &= abs(by[iid, "rhs_crosscheck"].mean - math.sqrt(n)) <= 1e-12
    ratio = by["ce-n256", "conjecture_ratio"].mean
    ok &= ratio == 8.0 and secs < 1.0
    ok &= "VIOLATED" not in verdicts(rows)
    report(1, ok, f"lhs=n/2, rhs=sqrt(n) exact for n in 1..256; ratio(256)={ratio:g}; {secs:.3f}s < 1s")


def test_criterion_02_vector_contraction_exact():
    rows, secs = timed(suite_contraction_exact, SEED, trials=200)
    violated = verdicts(rows).count("VIOLATED")
    median = statistics.median(r.margin for r in rows)
    ok = len(rows) == 200 and violated == 0 and secs < 60
    report(2, ok, f"200 instances, {violated} VIOLATED, median margin {median:.4g}; {secs:.2f}s < 60s")


def test_criterion_03_khintchine():
    rows = suite_khintchine(SEED)
    signs = [r for r in rows if r.quantity == "khintchine_sign"]
    extremal = next(r for r in rows if r.instance_id == "kh-extremal")
    gauss = [r for r in rows if r.quantity == "gaussian_mean_abs"]
    target = math.sqrt(2 / math.pi)
    ok = len(signs) == 100 and all(r.margin >= -1e-9 for r in signs)
    ok &= abs(extremal.margin) <= 1e-12 and abs(extremal.mean - 1 / math.sqrt(2)) <= 1e-12
    ok &= len(gauss) == 10 and all(abs(r.mean - target) <= 3 * r.std_error for r in gauss)
    worst = max(abs(r.mean - target) / r.std_error for r in gauss)
    report(3, ok, f"100 sign vectors hold; extremal gap {abs(extremal.margin):.1e}; "
                  f"gaussian worst |gap|/se = {worst:.2f} <= 3")


def test_criterion_04_product_identity():
    rows = suite_product(SEED, trials=50)
    worst = max(abs(r.bound - r.mean) for r in rows)
    ok = len(rows) == 50 and worst <= 1e-9
    report(4, ok, f"50 triples, max |product - sum| = {worst:.1e} <= 1e-9")


def test_criterion_05_tails():
    rows = suite_tails(SEED, vectors=5, draws=1_000_000)
    ok = len(rows) == 45
    for r in rows:
        t = float(r.instance_id.rsplit("-t", 1)[1])
        bound = 2 * math.exp(-t * t / 2)  # b = 1 for all three laws
        ok &= r.bound == pytest.approx(bound, rel=1e-15)
        ok &= r.mean <= bound + 3 * math.sqrt(r.mean * (1 - r.mean) / 1_000_000)
    worst = min(r.margin for r in rows)
    report(5, ok, f"45 (law, vector, t) cells at 1e6 draws; smallest slack {worst:.4g}")


def test_criterion_06_kmeans_chain(suite_all_csv):
    _, _, data = suite_all_csv[0]
    rows = [r for r in csv.DictReader(data.decode().splitlines()) if r["instance_id"].startswith("km-")]
    R = [r for r in rows if r["quantity"] == "kmeans_R"]
    chain = [r for r in rows if r["quantity"].startswith("chain:")]
    ok = len(R) == 20 and len(chain) == 80
    for r in R:
        K = 2 if int(r["instance_id"][3:]) % 2 == 0 else 3
        bound = 3 * math.sqrt(2) * K * math.sqrt(50)
        ok &= float(r["bound"]) == pytest.approx(bound, rel=1e-15)
        ok &= float(r["mean"]) - 3 * float(r["std_error"]) <= bound
    ok &= all(r["verdict"] == "HOLDS" for r in R + chain)
    tight = min(float(r["margin"]) for r in chain)
    report(6, ok, f"20 samples: R-3se <= 3*sqrt(2)*K*sqrt(n); all 80 chain links hold "
                  f"(smallest link gap {tight:.4g})")


def test_criterion_07_frobenius():
    rows = suite_frobenius(SEED, trials=20)
    ortho = rows[0]
    ok = ortho.instance_id == "fro-ortho" and abs(ortho.mean - 2.0) <= 1e-12 and ortho.bound == 2.0
    rand = rows[1:]
    ok &= len(rand) == 20 and all(r.bound >= r.mean - 3 * r.std_error for r in rand)
    report(7, ok, f"orthonormal n=4: exact {ortho.mean:.15g} = bound 2; 20 random samples dominated")


def test_criterion_08_theorem1_coverage():
    (row,), secs = timed(suite_coverage, SEED, delta=0.1, functions=20, space=8, n=16, repetitions=500)
    limit = 0.1 + 3 * math.sqrt(0.1 * 0.9 / 500)
    ok = row.bound == pytest.approx(limit, rel=1e-15) and row.mean <= limit and secs < 300
    report(8, ok, f"violation rate {row.mean:.4f} <= {limit:.4f}; {secs:.1f}s < 300s")


def test_criterion_09_determinism(suite_all_csv):
    (_, p1, a), (_, p2, b), (_, p3, c) = suite_all_csv
    codes = (p1.returncode, p2.returncode, p3.returncode)
    ok = codes == (0, 0, 0) and len(a) > 0 and a == b == c
    report(9, ok, f"suite --all --seed 7: exit codes {codes}; auto/auto/single-thread CSVs "
                  f"{'byte-identical' if a == b == c else 'differ'} ({len(a)} bytes)")


def test_criterion_10_ltl_exhaustive():
    rows = suite_ltl(SEED)
    configs = {r.instance_id.split("-", 2)[2] for r in rows}
    ok = len(configs) == 2 * 2 * 2 * 3 * 3
    ok &= all(r.mean <= r.bound + 1e-9 for r in rows) and "VIOLATED" not in verdicts(rows)
    report(10, ok, f"{len(rows)} instances over {len(configs)} (T, n, K, maps, losses) configs, 0 violations")


def test_criterion_10_oracle_spot_check():
    # brute-force both sides of one instance independently of the suite code
    rng = np.random.default_rng(11)
    T, n, K = 2, 2, 2
    maps = rng.uniform(-1, 1, size=(3, T, n, K))
    centers = rng.uniform(-1, 1, size=(2, K))

    def loss(c, u):
        return min(1.0, float(np.linalg.norm(np.asarray(u) - c)))

    psi = np.array([[min(np.mean([loss(c, h[t, i]) for i in range(n)]) for c in centers) for t in range(T)]
                    for h in maps])
    lhs = np.mean([max(np.dot(s, row) for row in psi) for s in itertools.product([-1, 1], repeat=T)])
    meta = np.mean([max(float(np.sum(np.reshape(s, (T, n, K)) * h)) for h in maps)
                    for s in itertools.product([-1, 1], repeat=T * n * K)])
    assert lhs <= math.sqrt(2) / math.sqrt(n) * meta + 1e-9
