"""Acceptance gates, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly as a script.
Failing gates are left failing: the thresholds are the published ones.
"""
import itertools
import sys

import numpy as np

from nrini.analytic import (
    InterferencePair,
    mse_single_tone_exact,
    mse_single_tone_literal,
    scale_invariance_residual,
)
from nrini.cli import main
from nrini.guardband import HorizonExceededError, min_guard_band
from nrini.numerology import MU_MAX, MU_MIN, N_BASE, NumerologyError
from nrini.scenario import ServiceSpec, plan_scenario
from nrini.waveform import place_tones, simulate_mse, simulate_sweep, z_score

SEED = 20240601
GB_POINTS = [0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 18, 24, 30, 36, 48, 60, 90, 120]
N_INT_SET = [12, 24, 60, 120, 300, 600]

TABLE = {  # (target dB, RBs per service) -> (total MHz, efficiency %)
    (25, 5): (7.56, 83.3), (25, 10): (13.95, 90.3), (25, 25): (33.08, 92.2),
    (30, 5): (9.36, 67.3), (30, 10): (16.29, 77.35), (30, 25): (35.78, 88.05),
    (40, 5): (19.85, 31.7), (40, 10): (30.65, 41.1), (40, 25): (58.23, 54.1),
}


REPORT = []  # echoed in the pytest terminal summary by conftest


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    REPORT.append(line)
    print(line, flush=True)
    return ok


def check_oracle_match():
    z = []
    for mu_i, mu_u in itertools.product(range(3), repeat=2):
        pair = InterferencePair(mu_i, mu_u)
        gbs = [g << min(mu_i, mu_u) for g in GB_POINTS]
        sim = simulate_sweep(pair, 1, gbs, n_symbols=10_000, seed=SEED)
        exact = mse_single_tone_exact(pair, np.array(gbs, dtype=float))
        z += [abs(z_score(a, p.mse, p.stderr)) for a, p in zip(exact, sim)]
    frac = float(np.mean(np.array(z) <= 3))
    return report(1, frac >= 0.99,
                  f"MC within 3 SE at {100 * frac:.1f}% of {len(z)} points (need >= 99%), max |z| {max(z):.2f}")


def check_orthogonality():
    worst_a = worst_s = 0.0
    for mu in range(MU_MIN, MU_MAX + 1):
        pair = InterferencePair(mu, mu)
        k = np.arange(1, min(200, (N_BASE >> mu) - 1))
        worst_a = max(worst_a, float(np.max(mse_single_tone_exact(pair, k * 2.0 ** mu))))
        for kk in (1, 2, 7):
            alloc, victim = place_tones(pair, kk << mu)
            worst_s = max(worst_s, float(simulate_mse(pair, alloc, victim, 200, SEED).mse))
    ok = worst_a <= 1e-20 and worst_s <= 1e-10
    return report(2, ok, f"max analytic {worst_a:.1e} (<= 1e-20), max simulated {worst_s:.1e} (<= 1e-10)")


def check_literal_equals_exact():
    rng = np.random.default_rng(SEED)
    # pairs with a positive first segment; Q >= 16 has none (see notes)
    pairs = [p for a in range(MU_MIN, MU_MAX + 1) for b in range(MU_MIN, a + 1)
             if (p := InterferencePair(a, b)).first_segment > 0]
    worst = 0.0
    for _ in range(500):
        pair = pairs[rng.integers(len(pairs))]
        gb = rng.uniform(0, N_BASE)
        a = mse_single_tone_literal(pair, gb)
        b = mse_single_tone_exact(pair, gb)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return report(3, worst <= 1e-12, f"max relative gap {worst:.2e} over 500 samples from {len(pairs)} pairs")


def check_conservation():
    worst = 0.0
    for mu_i, mu_u in [(0, 2), (2, 0), (1, 0), (0, 1), (3, 1), (2, 2)]:
        pair = InterferencePair(mu_i, mu_u)
        step = 1 << mu_u
        offset = (3 << mu_i) % step
        total = float(np.sum(mse_single_tone_exact(pair, offset + step * np.arange(N_BASE >> mu_u))))
        worst = max(worst, abs(total - pair.q_ratio) / pair.q_ratio)
    return report(4, worst <= 1e-9, f"max relative deviation from Q {worst:.1e} over 6 pairs")


def scale_invariance_table(points=200, n_int=12):
    rows = []
    for a, b in itertools.product(range(MU_MIN, MU_MAX + 1), repeat=2):
        for alpha in range(1, MU_MAX + 1 - max(a, b)):
            pair = InterferencePair(a, b)
            try:
                r = scale_invariance_residual(pair, n_int, alpha, (1 << b) * np.arange(1, points + 1))
            except NumerologyError:
                r = None  # grid plus block does not fit the shifted band
            rows.append((a, b, alpha, r))
    return rows


def check_scale_invariance():
    rows = scale_invariance_table()
    done = [r for r in rows if r[3] is not None]
    worst = max(done, key=lambda r: r[3])
    over = sum(r[3] > 0.5 for r in done)
    return report(5, over == 0 and len(done) == len(rows),
                  f"max residual {worst[3]:.3f} dB at (mu_i, mu_u, alpha)={worst[:3]}; {over}/{len(done)} "
                  f"evaluable combinations over 0.5 dB; {len(rows) - len(done)} not evaluable on the band")


def _gb(pair, n_int, target):
    try:
        return min_guard_band(pair, n_int, target).min_gb.bins
    except HorizonExceededError as exc:
        return -exc.horizon_bins  # negative marks "beyond the horizon"


def check_guard_band_headlines():
    q2, q4 = InterferencePair(1, 0), InterferencePair(2, 0)
    plateau = {n: _gb(q2, n, 25) for n in N_INT_SET}
    a = all(0 < g <= 36 for g in plateau.values())
    rb9 = _gb(q2, 24, 35) / 12
    b = abs(rb9 - 9) <= 1
    c, worst = True, None
    for target, n in itertools.product((25, 30, 35), N_INT_SET):
        g2, g4 = _gb(q2, n, target), _gb(q4, n, target)
        # beyond the horizon counts as larger than any in-horizon requirement
        ok = (g4 >= g2 > 0) or (g4 < 0 and (g2 > 0 and g2 <= -g4 or g2 < 0))
        if not ok:
            c, worst = False, (target, n, g2, g4)
    report("6a", a, f"Q=2 25 dB min_gb (victim sc) by N_int {plateau} (need <= 36)")
    report("6b", b, f"Q=2 35 dB 24-tone interferer needs {rb9:.2f} RB (need 9 +- 1)")
    report("6c", c, "Q=4 >= Q=2 at all 18 (target, N_int) cells" + ("" if c else f", violated at {worst}"))
    return a and b and c


def check_table():
    lines, ok = [], True
    plans = {}
    for (target, n_rb), (mhz, eff) in TABLE.items():
        plan = plan_scenario([ServiceSpec(mu, n_rb) for mu in (0, 1, 2)], target)
        plans[target, n_rb] = plan
        got_mhz, got_eff = plan.total_bandwidth_khz / 1e3, 100 * plan.efficiency
        cell = abs(got_mhz - mhz) <= 0.10 * mhz and abs(got_eff - eff) <= 5
        ok &= cell
        lines.append(f"{target}dB/{n_rb}RB {got_mhz:.3f} MHz {got_eff:.1f}%{'' if cell else ' (off)'}")
    eff = {k: p.efficiency for k, p in plans.items()}
    up = all(eff[t, 5] < eff[t, 10] < eff[t, 25] for t in (25, 30, 40))
    down = all(eff[25, n] > eff[30, n] > eff[40, n] for n in (5, 10, 25))
    ok = ok and up and down
    return report(7, ok, "; ".join(lines) + f"; rises with RBs {up}, falls with target {down}")


CLI_RUNS = [
    ["mse-sweep", "--mu-i", "2", "--mu-u", "0", "--gb-stop", "60sc"],
    ["verify", "--mu-i", "1", "--mu-u", "0", "--n-int", "12", "--gb-stop", "20sc", "--n-symbols", "500", "--seed", "7"],
    ["gb-curve", "--mu-i", "1", "--mu-u", "0", "--target-db", "30", "--n-int", "12,24,60"],
    ["scenario"],
    ["approx-check", "--mu-i", "1", "--mu-u", "0", "--points", "50", "--format", "json"],
]


def check_determinism(tmp):
    same = True
    for i, argv in enumerate(CLI_RUNS):
        outs = []
        for rep in range(2):
            path = tmp / f"run{i}_{rep}.out"
            main(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        same &= outs[0] == outs[1] and len(outs[0]) > 0
    return report(8, same, f"{len(CLI_RUNS)} subcommand runs repeated byte-identically: {same}")


def test_analytic_matches_monte_carlo():
    assert check_oracle_match()


def test_orthogonality_nulls():
    assert check_orthogonality()


def test_literal_equals_exact():
    assert check_literal_equals_exact()


def test_power_conservation():
    assert check_conservation()


def test_scale_invariance():
    assert check_scale_invariance()


def test_guard_band_headlines():
    assert check_guard_band_headlines()


def test_table_reproduction():
    assert check_table()


def test_cli_determinism(tmp_path):
    assert check_determinism(tmp_path)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        results = [check_oracle_match(), check_orthogonality(), check_literal_equals_exact(),
                   check_conservation(), check_scale_invariance(), check_guard_band_headlines(),
                   check_table(), check_determinism(Path(d))]
    sys.exit(0 if all(results) else 1)
