"""Experiment harness: interleaved gate/SM runs, estimators, sweeps, output.

Two estimators share one circuit implementation:

* Monte Carlo ("mc"): independent noisy trajectories, one RNG stream per
  trajectory, binomial standard errors sqrt(F(1-F)/n).
* Enumeration ("enum"): a stratified mixture over fault-count classes.
  Weight classes k = 1..max_weight are sampled conditionally on k and
  combined with the exact class probabilities C(N,k) s^k (1-s)^(N-k);
  the remaining tail (more than max_weight faults) is either sampled as
  its own stratum or reported as a rigorous remainder bound.  Weight-2
  location pairs are importance-sampled toward same-epoch pairs (an
  epoch is the span between consecutive SM completions): pairs separated
  by a clean SM round are almost always independently corrected, so the
  interesting variance lives in same-epoch pairs.  The reweighting keeps
  every stratum mean unbiased.

Per-configuration fidelities do not depend on the error strength p, only
the mixture weights do, so one set of stratum samples serves a whole
p-grid when the environment's X:Y:Z ratio is p-independent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import code as sc
from . import logical
from . import noise
from .extraction import SmProtocol, run_sm
from .rng import stream

MODES = ("mc", "enum")

# fidelity vector layout
_PHYS, _LOG, _PHYS_PSM, _LOG_PSM = range(4)

CSV_COLUMNS = ("protocol", "q", "env", "p", "mode", "trials_or_weight", "seed",
               "f_phys", "f_log", "f_phys_psm", "f_log_psm", "se_or_bound",
               "anc_qubits", "time_steps", "sm_rounds", "D_log", "D_log_psm")

# stream() purpose tags (first spawn index) so no two uses collide
_S_MC, _S_CENSUS, _S_CLASS, _S_TAIL = 0, 1, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str = "shor"
    q: int = 50
    env: str = "depolarizing"
    p: float = 1e-4
    mode: str = "mc"
    trials: int = 1000
    max_weight: int = 2
    class_samples: int = 600    # per sampled weight class (enum)
    tail_samples: int = 400     # 0: report the tail as a bound instead
    tail_cut: float = 1e-4      # tail mass below this is bounded, not sampled
    seed: int = 0
    sequence: str = logical.EQ1_SEQUENCE
    alpha: float = 0.0
    beta: float = 0.0
    theta: str = "noisy"        # |Theta> source: "noisy" or "ideal"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        SmProtocol.from_name(self.protocol)          # validate early
        logical.schedule_sm(self.sequence, self.q)   # validate early

    @property
    def environment(self) -> noise.ErrorEnvironment:
        return noise.ErrorEnvironment.from_name(self.env, self.p)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    f: np.ndarray            # [f_phys, f_log, f_phys_psm, f_log_psm]
    se: np.ndarray           # per-quantity standard error (same layout)
    remainder: float = 0.0   # unsampled enumeration tail mass (0 for mc)
    anc_qubits: float = 0.0  # mean per run
    time_steps: float = 0.0
    sm_rounds: float = 0.0
    n_locations: int = 0     # enum only: fault opportunities per clean run

    @property
    def f_phys(self):
        return float(self.f[_PHYS])

    @property
    def f_log(self):
        return float(self.f[_LOG])

    @property
    def f_phys_psm(self):
        return float(self.f[_PHYS_PSM])

    @property
    def f_log_psm(self):
        return float(self.f[_LOG_PSM])

    @property
    def se_or_bound(self) -> float:
        """Uncertainty on f_log: standard error plus any unsampled tail."""
        return float(self.se[_LOG]) + self.remainder

    def infidelity(self, psm: bool = False) -> float:
        return 1.0 - (self.f_log_psm if psm else self.f_log)


# ---------------------------------------------------------------------------
# One interleaved gate/SM run
# ---------------------------------------------------------------------------

def ideal_targets(config: ExperimentConfig):
    """(1-qubit, 7-qubit) ideal final states for the configured run."""
    gates = logical.compile_sequence(config.sequence)
    v0 = np.array([np.cos(config.alpha),
                   np.exp(1j * config.beta) * np.sin(config.alpha)])
    target1 = logical.ideal_unitary(gates) @ v0
    return target1, sc.encode_state(target1)


def simulate_trajectory(config: ExperimentConfig, ctx: noise.NoiseContext,
                        epoch_marks: list | None = None):
    """Run the gate sequence with interleaved SM.  Returns (state, tally).

    When `epoch_marks` is given, the fault-location counter value after
    each completed SM gadget is appended to it (used to delimit epochs
    for the enumeration estimator's pair sampling).
    """
    gates = logical.compile_sequence(config.sequence)
    positions = set(logical.schedule_sm(config.sequence, config.q))
    protocol = SmProtocol.from_name(config.protocol)
    state = sc.encode_ideal(config.alpha, config.beta)
    tally = {"anc": 0, "rounds": 0}
    for i, g in enumerate(gates, start=1):
        state = logical.apply_logical_gate(state, ctx, g, config.theta)
        if i in positions:
            out, state = run_sm(state, ctx, protocol)
            tally["anc"] += out.ancilla_qubits_consumed
            tally["rounds"] += out.rounds_used
            if epoch_marks is not None:
                epoch_marks.append(ctx.counter)
    return state, tally


def _fidelity_quad(state, target1, target7, draw_fn) -> np.ndarray:
    f_phys = abs(np.vdot(target7.amps, state.amps)) ** 2
    f_log = sc.logical_fidelity(state, target1)
    corrected = sc.perfect_final_sm(state, draw_fn=draw_fn)
    f_phys_psm = abs(np.vdot(target7.amps, corrected.amps)) ** 2
    f_log_psm = sc.logical_fidelity(corrected, target1)
    return np.array([f_phys, f_log, f_phys_psm, f_log_psm])


# ---------------------------------------------------------------------------
# Monte Carlo estimator
# ---------------------------------------------------------------------------

def run_mc(config: ExperimentConfig) -> ExperimentResult:
    env = config.environment
    target1, target7 = ideal_targets(config)
    n = config.trials
    if n < 1:
        raise ValueError("trials must be >= 1")
    fsum = np.zeros(4)
    rsum = np.zeros(3)  # anc, time, rounds
    for t in range(n):
        ctx = noise.NoiseContext(env, stream(config.seed, _S_MC, t))
        state, tally = simulate_trajectory(config, ctx)
        fsum += _fidelity_quad(state, target1, target7, ctx.draw)
        rsum += (tally["anc"], ctx.time_steps, tally["rounds"])
    f = fsum / n
    se = np.sqrt(np.clip(f * (1.0 - f), 0.0, None) / n)
    return ExperimentResult(config, f, se, remainder=0.0,
                            anc_qubits=rsum[0] / n, time_steps=rsum[1] / n,
                            sm_rounds=rsum[2] / n)


# ---------------------------------------------------------------------------
# Enumeration estimator
# ---------------------------------------------------------------------------

def _log_binom_pmf(n: int, k: np.ndarray, s: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return (math.lgamma(n + 1)
            - np.vectorize(math.lgamma)(k + 1)
            - np.vectorize(math.lgamma)(n - k + 1)
            + k * math.log(s) + (n - k) * math.log1p(-s))


def _tail_pmf(n_locations: int, max_weight: int, s: float, cut: float = 1e-12):
    """(ks, conditional probs, tail mass) for the > max_weight classes."""
    mean = n_locations * s
    k_hi = min(n_locations, int(mean + 12.0 * math.sqrt(mean + 1.0) + 12))
    ks = np.arange(max_weight + 1, k_hi + 1)
    if ks.size == 0:
        return ks, np.array([]), 0.0
    pmf = np.exp(_log_binom_pmf(n_locations, ks, s))
    tail = float(pmf.sum())
    keep = pmf / tail > cut
    ks, pmf = ks[keep], pmf[keep]
    return ks, pmf / pmf.sum(), tail


def _census(config: ExperimentConfig):
    """Fault-free run: location count, epoch boundaries, baseline numbers."""
    ctx = noise.NoiseContext(config.environment,
                             stream(config.seed, _S_CENSUS), faults={})
    marks = []
    target1, target7 = ideal_targets(config)
    state, tally = simulate_trajectory(config, ctx, epoch_marks=marks)
    quad = _fidelity_quad(state, target1, target7, ctx.draw)
    bounds = [0] + marks
    if not marks or marks[-1] != ctx.counter:
        bounds.append(ctx.counter)
    epochs = [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
    resources = (tally["anc"], ctx.time_steps, tally["rounds"])
    return ctx.counter, epochs, quad, resources


def _sample_ops(rng, locs, env: noise.ErrorEnvironment) -> dict:
    s = env.total
    probs = np.array([env.px, env.py, env.pz]) / s
    ops = rng.choice(3, size=len(locs), p=probs)
    axes = ("X", "Y", "Z")
    return {int(l): axes[int(o)] for l, o in zip(locs, ops)}


class _PrunePlan:
    """Locality pruning for weight-1/2 classes under fault-tolerant SM.

    When every SM gadget is fault tolerant and the T ancillas are ideal,
    a single fault followed by one complete clean SM round is corrected
    exactly: the residual is weight <= 1 modulo the stabilizer and a
    clean round removes it.  Hence a lone fault only matters inside the
    final epochs, and a fault pair beyond its single-fault parts only
    when both land in the final epochs.  All other configurations
    reproduce the clean-run fidelities exactly (verified empirically for
    far-separated faults), or reduce to an already-counted lower-weight
    configuration.  One extra epoch of margin is kept on every bound.

    The pair rule deliberately treats mid-circuit coincident pairs as
    corrected by the following SM rounds.  That neglects the rare
    same-window miscorrection channel (two same-type data errors decoded
    as a logical operator), which Monte Carlo mode retains in full; the
    pruned estimator is a leading-order tool for the small-p regime.
    """

    def __init__(self, n_locations: int, epochs):
        self.n = n_locations
        self.sizes = [(e, a, b - a) for e, (a, b) in enumerate(epochs)]
        n_ep = len(epochs)
        # weight 1: active iff in one of the last two epochs
        # (exact requirement: the last epoch only)
        w_start = epochs[max(0, n_ep - 2)][0]
        self.window = (w_start, n_locations)
        self.mass1 = (n_locations - w_start) / n_locations
        # weight 2: active iff both faults land in the last three epochs
        # (exact requirement: the last two); earlier pairs are followed by
        # a complete clean SM round and treated as corrected
        combos = []
        counts = []
        tail_sizes = self.sizes[max(0, n_ep - 3):]
        for i, (e1, a1, n1) in enumerate(tail_sizes):
            for e2, a2, n2 in tail_sizes[i:]:
                c = n1 * (n1 - 1) // 2 if e1 == e2 else n1 * n2
                if c:
                    combos.append((e1, e2))
                    counts.append(c)
        self.pair_combos = combos
        self.pair_counts = np.array(counts, dtype=float)
        total_pairs = n_locations * (n_locations - 1) / 2
        self.mass2 = float(self.pair_counts.sum()) / total_pairs

    def active_mass(self, k: int) -> float:
        return self.mass1 if k == 1 else self.mass2

    def sample_active(self, rng, k: int, env) -> dict:
        if k == 1:
            loc = rng.integers(self.window[0], self.window[1])
            return _sample_ops(rng, [loc], env)
        idx = rng.choice(len(self.pair_combos),
                         p=self.pair_counts / self.pair_counts.sum())
        e1, e2 = self.pair_combos[idx]
        if e1 == e2:
            _, a, n = self.sizes[e1]
            locs = a + rng.choice(n, size=2, replace=False)
        else:
            locs = [self.sizes[e1][1] + rng.integers(self.sizes[e1][2]),
                    self.sizes[e2][1] + rng.integers(self.sizes[e2][2])]
        return _sample_ops(rng, locs, env)


def _prunable(config: ExperimentConfig) -> bool:
    """Locality pruning is sound only with FT gadgets and ideal ancillas."""
    protocol = SmProtocol.from_name(config.protocol)
    ft = protocol.method in ("ShorState", "SteaneState")
    has_t = "T" in logical.compile_sequence(config.sequence)
    return ft and (config.theta == "ideal" or not has_t)


def _run_assigned(config, assignment, rng, target1, target7):
    ctx = noise.NoiseContext(config.environment, rng, faults=assignment)
    state, _ = simulate_trajectory(config, ctx)
    return _fidelity_quad(state, target1, target7, ctx.draw)


def _ratio_invariant(env_name: str) -> bool:
    """X:Y:Z fault ratio independent of p (allows sharing strata over p)."""
    a = noise.ErrorEnvironment.from_name(env_name, 1e-3)
    b = noise.ErrorEnvironment.from_name(env_name, 1e-5)
    va = np.array([a.px, a.py, a.pz]) / a.total
    vb = np.array([b.px, b.py, b.pz]) / b.total
    return bool(np.allclose(va, vb, rtol=1e-12, atol=1e-15))


def run_enum_multi(config: ExperimentConfig, p_values) -> dict:
    """Enumeration-mode results for several error strengths at once.

    The per-configuration fidelities are sampled once (they do not
    depend on p) and mixed with each p's exact weight-class
    probabilities.  Requires an environment whose X:Y:Z ratio does not
    change with p (true for all built-in environments).
    """
    p_values = list(p_values)
    if len(p_values) > 1 and not _ratio_invariant(config.env):
        raise ValueError("environment fault ratios vary with p; "
                         "run each p separately")
    target1, target7 = ideal_targets(config)
    n_loc, epochs, base_quad, resources = _census(config)
    env_ref = config.environment
    pruned = _prunable(config) and config.max_weight <= 2
    plan = _PrunePlan(n_loc, epochs) if pruned else None

    # per-class stratum estimates, shared across the p grid:
    # class_stats[k] = (mean quad (4,), variance-of-mean quad (4,))
    class_stats = {}
    for k in range(1, config.max_weight + 1):
        m = config.class_samples
        quads = np.empty((m, 4))
        for j in range(m):
            rng = stream(config.seed, _S_CLASS, k, j)
            if pruned:
                assignment = plan.sample_active(rng, k, env_ref)
            else:
                assignment = noise.sample_weight_k_config(rng, n_loc, k, env_ref)
            quads[j] = _run_assigned(config, assignment, rng, target1, target7)
        class_stats[k] = (quads.mean(axis=0), quads.var(axis=0) / m)

    results = {}
    for pi, p in enumerate(p_values):
        cfg_p = replace(config, p=p)
        env = cfg_p.environment
        s = env.total
        if s <= 0.0:
            results[p] = ExperimentResult(
                cfg_p, base_quad.copy(), np.zeros(4), remainder=0.0,
                anc_qubits=resources[0], time_steps=resources[1],
                sm_rounds=resources[2], n_locations=n_loc)
            continue
        var = np.zeros(4)
        if pruned:
            # Leading-order perturbative series.  The undamped prefactor
            # u_k = C(N, k) s^k is the expected number of weight-k fault
            # patterns; pruning replaces the inactive remainder of each
            # class by the clean-run quad exactly, so only the active mass
            # a_k contributes a deviation:
            #   f = base - sum_k u_k a_k (base - mean_active_k)
            f = base_quad.copy()
            for k, (mean_k, var_k) in class_stats.items():
                u_k = math.exp(float(_log_binom_pmf(n_loc, k, s))
                               - (n_loc - k) * math.log1p(-s))
                w_k = u_k * plan.active_mass(k)
                f = f - w_k * (base_quad - mean_k)
                var = var + (w_k ** 2) * var_k
            f = np.clip(f, 0.0, 1.0)
            # the truncation error is bounded by the exact probability of
            # more than max_weight simultaneous faults
            remainder = _tail_pmf(n_loc, config.max_weight, s)[2]
        else:
            f = noise.weight_class_probability(n_loc, 0, env) * base_quad
            for k, (mean_k, var_k) in class_stats.items():
                w_k = noise.weight_class_probability(n_loc, k, env)
                f = f + w_k * mean_k
                var = var + (w_k ** 2) * var_k
            ks, pmf, tail = _tail_pmf(n_loc, config.max_weight, s)
            remainder = 0.0
            if tail > config.tail_cut and config.tail_samples > 0:
                m = config.tail_samples
                quads = np.empty((m, 4))
                for j in range(m):
                    rng = stream(config.seed, _S_TAIL, pi, j)
                    k = int(rng.choice(ks, p=pmf))
                    assignment = noise.sample_weight_k_config(rng, n_loc, k,
                                                              env)
                    quads[j] = _run_assigned(config, assignment, rng,
                                             target1, target7)
                f = f + tail * quads.mean(axis=0)
                var = var + (tail ** 2) * quads.var(axis=0) / m
            else:
                remainder = tail
        results[p] = ExperimentResult(
            cfg_p, f, np.sqrt(var), remainder=remainder,
            anc_qubits=resources[0], time_steps=resources[1],
            sm_rounds=resources[2], n_locations=n_loc)
    return results


def run_enum(config: ExperimentConfig) -> ExperimentResult:
    return run_enum_multi(config, [config.p])[config.p]


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return run_mc(config) if config.mode == "mc" else run_enum(config)


# ---------------------------------------------------------------------------
# Derived quantities and resource table
# ---------------------------------------------------------------------------

def fractional_change(i_50: float, i_q: float):
    """D = (I_50 - I_q) / I_50; None when the q=50 baseline vanishes."""
    if i_50 <= 0.0:
        return None
    return (i_50 - i_q) / i_50


# ancilla qubits consumed per syndrome set (all six generators, no retries)
QUBITS_PER_SET = {"single": 6, "shor": 30, "steane": 28}

# minimum sets per SM round for each protocol variant
MIN_SETS = {"single": 1, "single-repeated": 2, "shor": 2,
            "steane": 1, "steane-repeated": 2}

# qubits consumed per SM round at the minimum set count
RESOURCE_TABLE = {
    "single": 6,
    "single-repeated": 12,
    "shor-set": 30,
    "shor": 60,            # repeated minimum: two agreeing sets
    "steane": 28,
    "steane-repeated": 56,
}


def resource_count(protocol: str, rounds_per_sm: int | None = None,
                   q: int = 1) -> int:
    """Closed-form ancilla cost: per-set qubits x sets per SM x SM count.

    `rounds_per_sm` defaults to the protocol's minimum (repetition rules,
    no verification retries); pass the observed count to audit real runs.
    """
    base = SmProtocol.from_name(protocol).name.split("-")[0]
    sets = MIN_SETS[protocol] if rounds_per_sm is None else rounds_per_sm
    return QUBITS_PER_SET[base] * sets * q


# ---------------------------------------------------------------------------
# Sweeps and serialization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    base: ExperimentConfig
    protocols: tuple = ("shor",)
    p_values: tuple = (1e-4,)
    q_values: tuple = (50,)
    workers: int = 1


def _cells(spec: SweepSpec):
    out = []
    for protocol in spec.protocols:
        for p in spec.p_values:
            for q in spec.q_values:
                out.append(replace(spec.base, protocol=protocol, p=p, q=q))
    return out


def _safe_run(config: ExperimentConfig):
    try:
        return run_experiment(config)
    except Exception as exc:  # a failing cell must not sink the sweep
        return (config, f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec) -> list:
    """All cells, in deterministic order, optionally across processes.

    Returns one entry per cell: an ExperimentResult, or a
    (config, error message) pair for cells that failed.
    """
    cells = _cells(spec)
    if spec.workers <= 1:
        return [_safe_run(c) for c in cells]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        return list(pool.map(_safe_run, cells))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def result_rows(results) -> list:
    """CSV/JSON rows (dicts in CSV_COLUMNS order) with D vs the q=50 row."""
    results = [r for r in results if isinstance(r, ExperimentResult)]
    baselines = {}
    for r in results:
        c = r.config
        if c.q == 50:
            baselines[(c.protocol, c.env, c.p, c.mode)] = r
    rows = []
    for r in results:
        c = r.config
        base = baselines.get((c.protocol, c.env, c.p, c.mode))
        d_log = d_log_psm = None
        if base is not None and base is not r:
            d_log = fractional_change(base.infidelity(), r.infidelity())
            d_log_psm = fractional_change(base.infidelity(psm=True),
                                          r.infidelity(psm=True))
        rows.append({
            "protocol": c.protocol, "q": c.q, "env": c.env, "p": c.p,
            "mode": c.mode,
            "trials_or_weight": c.trials if c.mode == "mc" else c.max_weight,
            "seed": c.seed,
            "f_phys": r.f_phys, "f_log": r.f_log,
            "f_phys_psm": r.f_phys_psm, "f_log_psm": r.f_log_psm,
            "se_or_bound": r.se_or_bound,
            "anc_qubits": r.anc_qubits, "time_steps": r.time_steps,
            "sm_rounds": r.sm_rounds,
            "D_log": d_log, "D_log_psm": d_log_psm,
        })
    return rows


def to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result_rows(results):
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_json_lines(results) -> str:
    lines = []
    for row in result_rows(results):
        clean = {k: (float(_fmt(v)) if isinstance(v, float) else v)
                 for k, v in row.items()}
        lines.append(json.dumps(clean))
    return "\n".join(lines) + "\n"
