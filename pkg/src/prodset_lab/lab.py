"""Experiment runners with seeded, reproducible result records.

Every trial draws its randomness from a substream keyed by (seed, trial
index), so records are byte-identical across reruns and across worker
counts; the thread pool only changes scheduling, never content. Each
asserted bound in a record names the operation that verified it.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .circle import (
    ArcUnion,
    arcs_from_lines,
    default_system,
    golden_rotation,
    refute_syndeticity,
    CircleSystem,
    F2,
    standard_arc_fixture,
)
from .cover import FiniteGroupSpace, exact_min_cover, theorem2_bound_check
from .covering import greedy_cover
from .errors import (
    CircleCoverageError,
    ConfigError,
    DegenerateInputError,
    WitnessSearchError,
)
from .groups import CyclicProduct, IntegerLattice
from .gspace import FiniteGSpace, return_time_density, stationary_measure
from .measures import (
    SparseMeasure,
    cesaro_walk_density,
    free_first_letter_cesaro,
    free_first_letter_mass,
    free_walk_distance_distribution,
)
from .setcalc import PeriodicIntSet, periodic_product, syndeticity_index

Z = IntegerLattice(1)


def frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator} ({float(f):.6g})"


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 12345
    jobs: int = 1
    out_dir: str | None = None
    params: dict = field(default_factory=dict)

    def get_int(self, key: str, default: int) -> int:
        return int(self.params.get(key, default))

    def get_float(self, key: str, default: float) -> float:
        return float(self.params.get(key, default))

    def get_str(self, key: str, default: str) -> str:
        return str(self.params.get(key, default))

    def get_int_list(self, key: str, default: str) -> list:
        raw = str(self.params.get(key, default))
        return [int(v) for v in raw.replace(" ", "").split(",") if v != ""]


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Key = value lines; '#' starts a comment. Reserved keys: experiment,
    seed, jobs, out. Everything else lands in params."""
    fields = {}
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    exp = fields.pop("experiment", experiment)
    if not exp:
        raise ConfigError("config does not name an experiment")
    seed = int(fields.pop("seed", 12345))
    jobs = int(fields.pop("jobs", 1))
    out = fields.pop("out", None)
    return ExperimentConfig(exp, seed=seed, jobs=jobs, out_dir=out, params=fields)


@dataclass
class ResultRecord:
    experiment: str
    seed: int
    jobs: int
    tool_version: str
    params: dict
    trials: list
    aggregate: dict
    passed: bool
    failed: int
    undetermined: int
    timestamp: str

    def exit_code(self) -> int:
        if self.failed:
            return 1
        if not self.passed and self.undetermined:
            return 2
        return 0

    def payload(self, with_timestamp: bool = True) -> dict:
        out = {
            "experiment": self.experiment,
            "seed": self.seed,
            "jobs_requested": self.jobs,
            "tool_version": self.tool_version,
            "params": self.params,
            "trials": self.trials,
            "aggregate": self.aggregate,
            "passed": self.passed,
            "failed": self.failed,
            "undetermined": self.undetermined,
        }
        if with_timestamp:
            out["timestamp"] = self.timestamp
        return out

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2)

    def canonical_bytes(self) -> bytes:
        """Deterministic serialization: timestamp and worker count excluded."""
        payload = self.payload(with_timestamp=False)
        payload.pop("jobs_requested")
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()

    def summary_csv(self) -> str:
        keys: list = []
        for trial in self.trials:
            for k, v in trial.items():
                if isinstance(v, (int, float, str, bool)) and k not in keys:
                    keys.append(k)
        lines = [",".join(keys)]
        for trial in self.trials:
            lines.append(",".join(str(trial.get(k, "")) for k in keys))
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str) -> tuple:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        stem = f"{self.experiment}-seed{self.seed}"
        json_path = directory / f"{stem}.json"
        csv_path = directory / f"{stem}.csv"
        json_path.write_text(self.to_json())
        csv_path.write_text(self.summary_csv())
        return json_path, csv_path


def _finalize(config: ExperimentConfig, trials: list, aggregate: dict) -> ResultRecord:
    failed = sum(1 for t in trials if t["outcome"] == "fail")
    undetermined = sum(1 for t in trials if t["outcome"] == "undetermined")
    return ResultRecord(
        experiment=config.experiment,
        seed=config.seed,
        jobs=config.jobs,
        tool_version=__version__,
        params={k: str(v) for k, v in sorted(config.params.items())},
        trials=trials,
        aggregate=aggregate,
        passed=failed == 0 and undetermined == 0,
        failed=failed,
        undetermined=undetermined,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )


def _run_trials(config: ExperimentConfig, count: int, trial_fn) -> list:
    """Trial i always uses rng default_rng([seed, i]); results are collected
    by index, so scheduling cannot reorder them."""

    def run_one(i: int) -> dict:
        rng = np.random.default_rng([config.seed, i])
        out = trial_fn(i, rng)
        out["trial"] = i
        return out

    if config.jobs <= 1:
        return [run_one(i) for i in range(count)]
    results: list = [None] * count
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        for i, res in zip(range(count), pool.map(run_one, range(count))):
            results[i] = res
    return results


# ---------------------------------------------------------------------------
# jin-verify: exact product-set cover bound on periodic integer sets


def _random_periodic(rng, max_modulus: int, min_density: float) -> PeriodicIntSet:
    while True:
        m = int(rng.integers(2, max_modulus + 1))
        keep = rng.random(m) < rng.uniform(max(min_density, 0.05), 0.95)
        residues = frozenset(int(r) for r in np.nonzero(keep)[0])
        if residues and len(residues) / m >= min_density:
            return PeriodicIntSet(m, residues)


def run_jin_verify(config: ExperimentConfig) -> ResultRecord:
    trials = config.get_int("trials", 200)
    min_density = config.get_float("min-density", 0.1)
    max_modulus = config.get_int("max-modulus", 16)
    lcm_cap = config.get_int("lcm-cap", 64)

    def one(i: int, rng) -> dict:
        while True:
            A = _random_periodic(rng, max_modulus, min_density)
            B = _random_periodic(rng, max_modulus, min_density)
            if math.lcm(A.modulus, B.modulus) <= lcm_cap:
                break
        dA, dB = A.density(), B.density()
        S = periodic_product(A, B)
        bound = math.floor(1 / (dA * dB))
        report = syndeticity_index(S)
        if report.status != "exact":
            return {
                "outcome": "undetermined",
                "A": A.to_spec(),
                "B": B.to_spec(),
                "reason": report.status,
                "verified_by": "syndeticity_index",
            }
        ok = report.index <= bound
        return {
            "outcome": "pass" if ok else "fail",
            "A": A.to_spec(),
            "B": B.to_spec(),
            "density_A": frac_str(dA),
            "density_B": frac_str(dB),
            "product_modulus": S.modulus,
            "min_cover": report.index,
            "bound": bound,
            "verified_by": "periodic_product+syndeticity_index",
        }

    rows = _run_trials(config, trials, one)
    worst = max((t.get("min_cover", 0) for t in rows), default=0)
    return _finalize(config, rows, {"trials": trials, "max_min_cover": worst})


# ---------------------------------------------------------------------------
# thm2-bound: the floor(1/(m(A)m(B))) cover pipeline on finite groups


def run_thm2_bound(config: ExperimentConfig) -> ResultRecord:
    trials = config.get_int("trials", 1000)
    orders = config.get_int_list("orders", "64,128,256,512")
    min_measure = config.get_float("min-measure", 0.05)
    spaces = {n: FiniteGroupSpace.from_cyclic(CyclicProduct((n,))) for n in orders}

    def one(i: int, rng) -> dict:
        order = orders[i % len(orders)]
        space = spaces[order]
        while True:
            A = rng.random(order) < rng.uniform(min_measure, 0.9)
            B = rng.random(order) < rng.uniform(min_measure, 0.9)
            if (
                A.sum() >= min_measure * order
                and B.sum() >= min_measure * order
            ):
                break
        report = theorem2_bound_check(space, A, B)
        return {
            "outcome": "pass" if report.passed else "fail",
            "order": order,
            "m_A": frac_str(space.measure(A)),
            "m_B": frac_str(space.measure(B)),
            "m_E": frac_str(report.m_E),
            "F_size": report.F_size,
            "bound": report.bound,
            "verified_by": "theorem2_bound_check",
        }

    rows = _run_trials(config, trials, one)
    return _finalize(
        config,
        rows,
        {
            "trials": trials,
            "orders": orders,
            "max_F_size": max(t.get("F_size", 0) for t in rows),
        },
    )


# ---------------------------------------------------------------------------
# counterexample: verified non-syndeticity certificates on the circle


def _config_system(config: ExperimentConfig) -> CircleSystem:
    denom = config.get_int("alpha-denominator", 10**6)
    lam = config.get_float("contraction", 0.5)
    return CircleSystem(alpha=golden_rotation(denom), contraction=lam)


def _config_arcs(config: ExperimentConfig) -> ArcUnion:
    inline = config.params.get("arcs")
    if inline:
        return arcs_from_lines(str(inline).replace(";", "\n"))
    path = config.params.get("arcs-file")
    if path:
        return arcs_from_lines(Path(path).read_text())
    return standard_arc_fixture()


def run_counterexample(config: ExperimentConfig) -> ResultRecord:
    radii = config.get_int_list("radii", "0,1,2")
    budget = config.get_int("budget", 40)
    margin = config.get_float("margin", 1e-9)
    system = _config_system(config)
    arcs = _config_arcs(config)

    def one(i: int, rng) -> dict:
        rho = radii[i]
        words = F2.ball(rho).elements
        try:
            cert = refute_syndeticity(system, words, arcs, budget=budget, margin=margin)
        except (CircleCoverageError, DegenerateInputError) as err:
            return {
                "outcome": "undetermined",
                "radius": rho,
                "reason": str(err),
                "verified_by": "refute_syndeticity",
            }
        except WitnessSearchError as err:
            return {
                "outcome": "undetermined",
                "radius": rho,
                "reason": str(err),
                "verified_by": "refute_syndeticity",
            }
        return {
            "outcome": "pass",
            "radius": rho,
            "F_size": len(words),
            "witness": F2.word_to_str(cert.witness) or "e",
            "witness_length": len(cert.witness),
            "margin": margin,
            "certificate": json.loads(cert.to_json()),
            "verified_by": "refute_syndeticity+verify_images_disjoint",
        }

    rows = _run_trials(config, len(radii), one)
    return _finalize(
        config,
        rows,
        {
            "alpha": frac_str(system.alpha),
            "contraction": system.contraction,
            "total_arc_length": frac_str(Fraction(arcs.total_length())),
        },
    )


# ---------------------------------------------------------------------------
# walk-density: Cesaro walk densities against their oracles


def run_walk_density(config: ExperimentConfig) -> ResultRecord:
    n_parity = config.get_int("parity-n", 50)
    n_markov = config.get_int("markov-n", 10_000)
    n_free = config.get_int("free-n", 20)
    n_free_exact = config.get_int("free-exact-n", 10)
    mc_walks = config.get_int("mc-walks", 100_000)

    def parity_trial(i: int, rng) -> dict:
        mu = SparseMeasure.uniform(Z, [(1,), (-1,)])
        rep = cesaro_walk_density(mu, lambda g: g[0] % 2 == 0, n_parity)
        expected = math.floor(n_parity / 2) / n_parity
        return {
            "outcome": "pass" if rep.value == expected else "fail",
            "fixture": "z-parity",
            "n": n_parity,
            "value": rep.value,
            "expected": expected,
            "verified_by": "cesaro_walk_density",
        }

    def rotation_trial(i: int, rng) -> dict:
        space = FiniteGSpace(Z, (0, 1, 2), {(1,): [1, 2, 0]})
        mu = SparseMeasure.uniform(Z, [(1,), (-1,)])
        nu = stationary_measure(space, mu).nu
        rep = return_time_density(space, mu, [0], 0, n_markov, nu=nu)
        ok = abs(rep.value - 1 / 3) <= 1e-3 and rep.value >= rep.stationary_mass - 1e-3
        return {
            "outcome": "pass" if ok else "fail",
            "fixture": "z3-rotation",
            "n": n_markov,
            "value": rep.value,
            "stationary_mass": rep.stationary_mass,
            "verified_by": "return_time_density+stationary_measure",
        }

    def free_trial(i: int, rng) -> dict:
        # exact radial values, convolution cross-check at feasible depth,
        # Monte Carlo at the requested depth
        f2 = F2
        mu = SparseMeasure.uniform(f2, [(1,), (-1,), (2,), (-2,)])
        conv = cesaro_walk_density(mu, lambda w: bool(w) and w[0] == 1, n_free_exact)
        exact_small = float(free_first_letter_cesaro(2, n_free_exact))
        exact_large = float(free_first_letter_cesaro(2, n_free))

        dist = free_walk_distance_distribution(2, n_free)
        per_k = [float(free_first_letter_mass(2, k, dist)) for k in range(1, n_free + 1)]

        hits = np.zeros(n_free)
        letters = np.array([1, -1, 2, -2])
        words = [[] for _ in range(mc_walks)]
        draws = rng.integers(0, 4, size=(mc_walks, n_free))
        for t in range(mc_walks):
            w = words[t]
            row = draws[t]
            for k in range(n_free):
                s = int(letters[row[k]])
                if w and w[-1] == -s:
                    w.pop()
                else:
                    w.append(s)
                if w and w[0] == 1:
                    hits[k] += 1
        mc_per_k = hits / mc_walks
        mc_value = float(np.mean(mc_per_k))
        sigma = float(
            np.sqrt(np.mean([p * (1 - p) for p in per_k]) / mc_walks)
        )
        ok = (
            abs(conv.value - exact_small) <= 1e-12
            and abs(mc_value - exact_large) <= 3 * sigma + 1e-6
        )
        return {
            "outcome": "pass" if ok else "fail",
            "fixture": "f2-first-letter",
            "n": n_free,
            "convolution_value_at_small_n": conv.value,
            "exact_value_at_small_n": exact_small,
            "exact_value": exact_large,
            "monte_carlo_value": mc_value,
            "mc_sigma": sigma,
            "verified_by": "cesaro_walk_density+free_first_letter_cesaro+monte_carlo",
        }

    fixtures = [parity_trial, rotation_trial, free_trial]

    def one(i: int, rng) -> dict:
        return fixtures[i](i, rng)

    rows = _run_trials(config, len(fixtures), one)
    return _finalize(config, rows, {"fixtures": [t["fixture"] for t in rows]})


# ---------------------------------------------------------------------------
# cover-greedy: greedy-vs-exact gap statistics


def run_cover_greedy(config: ExperimentConfig) -> ResultRecord:
    trials = config.get_int("trials", 500)
    order = config.get_int("order", 64)
    node_cap = config.get_int("node-cap", 500_000)
    min_measure = config.get_float("min-measure", 0.2)
    space = FiniteGroupSpace.from_cyclic(CyclicProduct((order,)))

    def one(i: int, rng) -> dict:
        while True:
            U = rng.random(order) < rng.uniform(min_measure, 0.9)
            if U.sum() >= min_measure * order:
                break
        translates = space.translate_all(U)
        masks = []
        for k in range(order):
            mask = 0
            for idx in np.nonzero(translates[k])[0]:
                mask |= 1 << int(idx)
            masks.append(mask)
        universe = (1 << order) - 1
        greedy = greedy_cover(universe, masks)
        exact = exact_min_cover(space, U, node_cap=node_cap)
        if exact.status != "exact":
            return {
                "outcome": "undetermined",
                "order": order,
                "greedy": len(greedy),
                "reason": exact.status,
                "verified_by": "exact_min_cover",
            }
        ok = exact.size <= len(greedy)
        return {
            "outcome": "pass" if ok else "fail",
            "order": order,
            "m_U": frac_str(space.measure(U)),
            "greedy": len(greedy),
            "exact": exact.size,
            "gap": len(greedy) - exact.size,
            "verified_by": "greedy_cover+exact_min_cover",
        }

    rows = _run_trials(config, trials, one)
    histogram: dict = {}
    for t in rows:
        if "gap" in t:
            histogram[str(t["gap"])] = histogram.get(str(t["gap"]), 0) + 1
    return _finalize(config, rows, {"trials": trials, "gap_histogram": histogram})


# ---------------------------------------------------------------------------


RUNNERS = {
    "jin-verify": run_jin_verify,
    "thm2-bound": run_thm2_bound,
    "counterexample": run_counterexample,
    "walk-density": run_walk_density,
    "cover-greedy": run_cover_greedy,
}


def run_experiment(config: ExperimentConfig) -> ResultRecord:
    runner = RUNNERS.get(config.experiment)
    if runner is None:
        raise ConfigError(
            f"unknown experiment {config.experiment!r}; choose from {sorted(RUNNERS)}"
        )
    return runner(config)


def selftest(seed: int = 12345, jobs: int = 1) -> list:
    """Scaled-down run of every experiment; returns the records."""
    configs = [
        ExperimentConfig("jin-verify", seed=seed, jobs=jobs, params={"trials": 25}),
        ExperimentConfig(
            "thm2-bound", seed=seed, jobs=jobs, params={"trials": 40, "orders": "16,32"}
        ),
        ExperimentConfig("counterexample", seed=seed, jobs=jobs, params={"radii": "0,1"}),
        ExperimentConfig(
            "walk-density",
            seed=seed,
            jobs=jobs,
            params={"free-n": 12, "free-exact-n": 8, "mc-walks": 20000, "markov-n": 4000},
        ),
        ExperimentConfig(
            "cover-greedy", seed=seed, jobs=jobs, params={"trials": 30, "order": 32}
        ),
    ]
    return [run_experiment(c) for c in configs]
