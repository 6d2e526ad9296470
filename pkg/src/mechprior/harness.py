"""Experiment harness: training-data collection, evaluation, aggregation.

Runs the full protocol: a model is trained on interactions with L training
mechanisms (M interactions each, collected randomly or with GP-UCB), and at
scheduled checkpoints its exploration performance is measured on a fixed
set of N novel evaluation mechanisms. Performance is the number of
interactions until the agent's best-estimate action reaches a normalized
regret below the threshold.

Every stochastic choice derives from the experiment seed plan: training
mechanism seeds are odd, evaluation mechanism seeds are even, so the two
sets are disjoint by construction. Two runs with equal configs produce
identical results byte for byte.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionConfig, best_estimate, maximize, select_ucb_action, zero_prior
from .gp import GpState, KernelParams, add_observation, empty_state
from .mechanisms import (
    Mechanism,
    MechanismKind,
    action_bounds,
    execute_action,
    generate_mechanism,
    oracle_optimal,
    render,
)
from .prior_net import (
    Dataset,
    NetworkWeights,
    TrainSchedule,
    fit,
    init_weights,
    make_prior,
    save_weights,
)

RESULTS_HEADER = "# mechprior-results v1"
AGGREGATE_HEADER = "# mechprior-aggregate v1"

_MASK64 = (1 << 64) - 1
_TRAIN_STREAM = 0x74726169
_EVAL_STREAM = 0x6576616C
_COLLECT_STREAM = 0x636F6C6C
_RANDOM_EVAL_STREAM = 0x72616E64
_INIT_STREAM = 0x696E6974
_FIT_STREAM = 0x66697473


class Strategy(Enum):
    CPP_GP_UCB = "cpp-gp-ucb"
    CPP_RANDOM = "cpp-random"
    GP_UCB_BASELINE = "gp-ucb"
    RANDOM_BASELINE = "random"

    @property
    def uses_network(self) -> bool:
        return self in (Strategy.CPP_GP_UCB, Strategy.CPP_RANDOM)

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Strategy.CPP_GP_UCB: "CPP-GP-UCB",
    Strategy.CPP_RANDOM: "CPP-Random",
    Strategy.GP_UCB_BASELINE: "GP-UCB",
    Strategy.RANDOM_BASELINE: "Random",
}


class ResultsFormatError(ValueError):
    """Results file is missing or carries an unknown version tag."""


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _mix(*parts: int) -> int:
    h = 0
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK64))
    return h


def train_mechanism_seed(model_seed: int, index: int) -> int:
    """Seed of the index-th training mechanism for a model seed (always odd)."""
    return _mix(_TRAIN_STREAM, model_seed, index) | 1


def eval_mechanism_seed(index: int) -> int:
    """Seed of the index-th shared evaluation mechanism (always even)."""
    return _mix(_EVAL_STREAM, index) & ~1 & _MASK64


def default_workers() -> int:
    env = os.environ.get("MECHPRIOR_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def default_kernel(kind: MechanismKind) -> KernelParams:
    if kind is MechanismKind.SLIDER:
        return KernelParams(lengthscales=(0.55, 0.12), signal_variance=0.04, noise_variance=1e-6)
    return KernelParams(
        lengthscales=(0.05, 0.55, 0.25), signal_variance=0.01, noise_variance=1e-6
    )


def default_acquisition(kind: MechanismKind) -> AcquisitionConfig:
    grid = 25 if kind is MechanismKind.SLIDER else 12
    return AcquisitionConfig(grid_points=grid, top_k=5, max_iterations=100, tolerance=1e-6)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: MechanismKind
    train_mechanisms: int = 100
    interactions_per_mechanism: int = 100
    eval_mechanisms: int = 50
    max_attempts: int = 100
    regret_threshold: float = 0.05
    model_seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    checkpoints: tuple[int, ...] = (1, 2, 5, 10, 20, 40, 70, 100)
    beta: float = 4.0
    kernel: KernelParams = None  # type: ignore[assignment]
    acquisition: AcquisitionConfig = None  # type: ignore[assignment]
    training: TrainSchedule = field(default_factory=TrainSchedule)
    strategies: tuple[Strategy, ...] = (
        Strategy.CPP_GP_UCB,
        Strategy.CPP_RANDOM,
        Strategy.GP_UCB_BASELINE,
        Strategy.RANDOM_BASELINE,
    )
    count_probe_as_attempt: bool = False
    collection_uses_network: bool = True
    fit_every_mechanism: bool = False

    def __post_init__(self) -> None:
        if self.kernel is None:
            object.__setattr__(self, "kernel", default_kernel(self.kind))
        if self.acquisition is None:
            object.__setattr__(self, "acquisition", default_acquisition(self.kind))
        if self.interactions_per_mechanism < 1:
            raise ValueError("interactions_per_mechanism must be at least 1")
        if not 0.0 < self.regret_threshold < 1.0:
            raise ValueError("regret_threshold must lie in (0, 1)")
        if not self.model_seeds:
            raise ValueError("at least one model seed is required")
        if any(c < 0 or c > self.train_mechanisms for c in self.checkpoints):
            raise ValueError("checkpoints must lie within [0, train_mechanisms]")
        expected_dim = action_bounds(self.kind).dim
        if self.kernel.dim != expected_dim:
            raise ValueError(
                f"kernel has {self.kernel.dim} lengthscales, need {expected_dim} for {self.kind.value}"
            )


def default_config(kind: MechanismKind) -> ExperimentConfig:
    return ExperimentConfig(kind=kind)


@dataclass(frozen=True)
class Attempt:
    action: tuple[float, ...]
    reward: float
    regret: float


@dataclass(frozen=True)
class EvalRecord:
    mech_seed: int
    attempts: tuple[Attempt, ...]
    attempts_to_success: int | None  # None marks failure within the budget
    final_regret: float
    gp_observations: int


@dataclass(frozen=True)
class CellResult:
    strategy: Strategy
    checkpoint: int
    model_seed: int
    mech_seed: int
    attempts: int  # failures recorded as max_attempts
    final_regret: float


@dataclass(frozen=True)
class CurvePoint:
    checkpoint: int
    q25: float
    median: float
    q75: float


@dataclass(frozen=True)
class ExperimentResults:
    rows: tuple[CellResult, ...]
    curves: dict[Strategy, tuple[CurvePoint, ...]]


def normalized_regret(r_star: float, r: float) -> float:
    """Fractional shortfall of reward r against the oracle optimum r_star."""
    return (r_star - r) / r_star


def evaluate_one(
    strategy: Strategy,
    weights: NetworkWeights | None,
    mechanism: Mechanism,
    config: ExperimentConfig,
) -> EvalRecord:
    """Interact with one novel mechanism until the best estimate succeeds.

    Best-estimate probes measure current regret with the beta=0 criterion;
    by default they are free (not charged against the attempt budget and
    not added to the GP).
    """
    if strategy.uses_network and weights is None:
        raise ValueError(f"{strategy.value} requires trained network weights")
    bounds = action_bounds(mechanism.kind)
    _, r_star = oracle_optimal(mechanism)
    threshold = config.regret_threshold

    if strategy is Strategy.RANDOM_BASELINE:
        return _evaluate_random(mechanism, bounds, r_star, config)

    prior = make_prior(weights, render(mechanism)) if strategy.uses_network else zero_prior
    state = empty_state(config.kernel)
    attempts: list[Attempt] = []

    def measure() -> tuple[np.ndarray, float, float]:
        a = best_estimate(prior, state, bounds, config.acquisition)
        r = execute_action(mechanism, a)
        return a, r, normalized_regret(r_star, r)

    def observe(a: np.ndarray, r: float) -> None:
        nonlocal state
        state = add_observation(state, a, r - float(prior(a[None, :])[0]))

    probe_action, probe_reward, regret = measure()
    if config.count_probe_as_attempt:
        observe(probe_action, probe_reward)
        attempts.append(Attempt(tuple(probe_action), probe_reward, regret))
    success = regret < threshold
    while not success and len(attempts) < config.max_attempts:
        a = select_ucb_action(prior, state, bounds, config.beta, config.acquisition)
        r = execute_action(mechanism, a)
        observe(a, r)
        if config.count_probe_as_attempt:
            attempts.append(Attempt(tuple(a), r, regret))
            if len(attempts) >= config.max_attempts:
                break
        probe_action, probe_reward, regret = measure()
        if config.count_probe_as_attempt:
            observe(probe_action, probe_reward)
            attempts.append(Attempt(tuple(probe_action), probe_reward, regret))
        else:
            attempts.append(Attempt(tuple(a), r, regret))
        success = regret < threshold
    return EvalRecord(
        mech_seed=mechanism.seed,
        attempts=tuple(attempts),
        attempts_to_success=len(attempts) if success else None,
        final_regret=regret,
        gp_observations=len(state),
    )


def _evaluate_random(
    mechanism: Mechanism, bounds, r_star: float, config: ExperimentConfig
) -> EvalRecord:
    """Random baseline: uniform draws, best estimate is the best reward so far."""
    rng = np.random.default_rng(
        np.random.SeedSequence([_RANDOM_EVAL_STREAM, mechanism.seed])
    )
    low, high = bounds.as_arrays()
    best_reward = 0.0
    attempts: list[Attempt] = []
    regret = normalized_regret(r_star, best_reward)
    success = regret < config.regret_threshold
    while not success and len(attempts) < config.max_attempts:
        a = rng.uniform(low, high)
        r = execute_action(mechanism, a)
        best_reward = max(best_reward, r)
        regret = normalized_regret(r_star, best_reward)
        attempts.append(Attempt(tuple(a), r, regret))
        success = regret < config.regret_threshold
    return EvalRecord(
        mech_seed=mechanism.seed,
        attempts=tuple(attempts),
        attempts_to_success=len(attempts) if success else None,
        final_regret=regret,
        gp_observations=0,
    )


def collect_training(
    config: ExperimentConfig,
    strategy: Strategy,
    model_seed: int,
    initial_weights: NetworkWeights | None = None,
) -> tuple[Dataset, dict[int, NetworkWeights]]:
    """Collect L x M training interactions and fit the network along the way.

    Returns the accumulated dataset and the weight snapshots taken at each
    checkpoint. By default the network is refit (over the full accumulated
    dataset) whenever a checkpoint is reached; fit_every_mechanism refits
    after every training mechanism instead. GP-UCB collection uses the
    current network as prior once a first fit exists, unless disabled.
    """
    if not strategy.uses_network:
        raise ValueError("collection strategies are cpp-random and cpp-gp-ucb")
    kind = config.kind
    bounds = action_bounds(kind)
    low, high = bounds.as_arrays()
    dataset = Dataset(kind)
    weights = initial_weights if initial_weights is not None else init_weights(_mix(_INIT_STREAM, model_seed))
    snapshots: dict[int, NetworkWeights] = {}
    checkpoint_set = set(config.checkpoints)
    fitted = False

    for index in range(1, config.train_mechanisms + 1):
        seed = train_mechanism_seed(model_seed, index)
        mechanism = generate_mechanism(kind, seed)
        image = render(mechanism)
        if strategy is Strategy.CPP_RANDOM:
            rng = np.random.default_rng(
                np.random.SeedSequence([_COLLECT_STREAM, model_seed, index])
            )
            for _ in range(config.interactions_per_mechanism):
                a = rng.uniform(low, high)
                dataset.append(seed, image, a, execute_action(mechanism, a))
        else:
            use_net = fitted and config.collection_uses_network
            prior = make_prior(weights, image) if use_net else zero_prior
            state = empty_state(config.kernel)
            for _ in range(config.interactions_per_mechanism):
                a = select_ucb_action(prior, state, bounds, config.beta, config.acquisition)
                r = execute_action(mechanism, a)
                state = add_observation(state, a, r - float(prior(a[None, :])[0]))
                dataset.append(seed, image, a, r)
        if config.fit_every_mechanism or index in checkpoint_set:
            weights = fit(weights, dataset, config.training, seed=_mix(_FIT_STREAM, model_seed, index))
            fitted = True
        if index in checkpoint_set:
            snapshots[index] = weights
    return dataset, snapshots


def _eval_cell(task) -> EvalRecord:
    strategy, weights, mechanism, config = task
    return evaluate_one(strategy, weights, mechanism, config)


def evaluate_many(
    strategy: Strategy,
    weights: NetworkWeights | None,
    mechanisms: list[Mechanism],
    config: ExperimentConfig,
    workers: int,
) -> list[EvalRecord]:
    tasks = [(strategy, weights, m, config) for m in mechanisms]
    if workers <= 1 or len(tasks) <= 1:
        return [_eval_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_eval_cell, tasks))


def evaluation_mechanisms(config: ExperimentConfig) -> list[Mechanism]:
    return [
        generate_mechanism(config.kind, eval_mechanism_seed(j))
        for j in range(config.eval_mechanisms)
    ]


def cells_from_records(
    strategy: Strategy,
    checkpoint: int,
    model_seed: int,
    records: list[EvalRecord],
    max_attempts: int,
) -> list[CellResult]:
    return [
        CellResult(
            strategy=strategy,
            checkpoint=checkpoint,
            model_seed=model_seed,
            mech_seed=rec.mech_seed,
            attempts=rec.attempts_to_success if rec.attempts_to_success is not None else max_attempts,
            final_regret=rec.final_regret,
        )
        for rec in records
    ]


def aggregate(rows: list[CellResult]) -> dict[Strategy, tuple[CurvePoint, ...]]:
    """Quantiles of attempts-to-success per strategy and checkpoint."""
    curves: dict[Strategy, tuple[CurvePoint, ...]] = {}
    strategies = sorted({row.strategy for row in rows}, key=lambda s: s.value)
    for strategy in strategies:
        checkpoints = sorted({row.checkpoint for row in rows if row.strategy is strategy})
        points = []
        for cp in checkpoints:
            attempts = np.array(
                [r.attempts for r in rows if r.strategy is strategy and r.checkpoint == cp],
                dtype=float,
            )
            q25, med, q75 = np.percentile(attempts, [25.0, 50.0, 75.0])
            points.append(CurvePoint(checkpoint=cp, q25=float(q25), median=float(med), q75=float(q75)))
        curves[strategy] = tuple(points)
    return curves


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    workers: int | None = None,
) -> ExperimentResults:
    """Run collection, checkpointed evaluation, and aggregation.

    Baselines have no training phase; they are evaluated once and their
    results replicated across checkpoints. When out_dir is given, writes
    per-cell and aggregated result CSVs, weight snapshots, and per-seed
    collection datasets.
    """
    workers = default_workers() if workers is None else workers
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    mechanisms = evaluation_mechanisms(config)
    checkpoints = sorted(config.checkpoints)
    rows: list[CellResult] = []

    for strategy in config.strategies:
        if strategy.uses_network:
            continue
        records = evaluate_many(strategy, None, mechanisms, config, workers)
        for cp in checkpoints:
            rows.extend(cells_from_records(strategy, cp, 0, records, config.max_attempts))

    for strategy in config.strategies:
        if not strategy.uses_network:
            continue
        for model_seed in config.model_seeds:
            dataset, snapshots = collect_training(config, strategy, model_seed)
            if out is not None:
                save_dataset(dataset, out / f"dataset_{strategy.value}_seed{model_seed}.jsonl")
            for cp in checkpoints:
                snapshot = snapshots[cp]
                if out is not None:
                    save_weights(snapshot, out / f"weights_{strategy.value}_seed{model_seed}_L{cp}.json")
                records = evaluate_many(strategy, snapshot, mechanisms, config, workers)
                rows.extend(cells_from_records(strategy, cp, model_seed, records, config.max_attempts))

    curves = aggregate(rows)
    results = ExperimentResults(rows=tuple(rows), curves=curves)
    if out is not None:
        save_results(list(results.rows), out / "results.csv")
        save_aggregate(curves, out / "aggregate.csv")
    return results


@dataclass(frozen=True)
class NnVsCpp:
    mech_seed: int
    nn_regret: float
    cpp_regret: float


def nn_only_eval(
    weights: NetworkWeights,
    mechanisms: list[Mechanism],
    config: ExperimentConfig,
    cpp_attempts: int = 10,
) -> list[NnVsCpp]:
    """Regret of trusting the network's argmax action outright, per mechanism,
    paired with a GP-UCB run on top of the same network capped at a few
    interactions."""
    capped = replace(config, max_attempts=cpp_attempts)
    out = []
    for mechanism in mechanisms:
        bounds = action_bounds(mechanism.kind)
        prior = make_prior(weights, render(mechanism))
        action, _ = maximize(prior, bounds, config.acquisition)
        _, r_star = oracle_optimal(mechanism)
        nn_regret = normalized_regret(r_star, execute_action(mechanism, action))
        record = evaluate_one(Strategy.CPP_GP_UCB, weights, mechanism, capped)
        out.append(NnVsCpp(mechanism.seed, nn_regret, record.final_regret))
    return out


@dataclass(frozen=True)
class MotionHistogram:
    zero_count: int
    bin_edges: np.ndarray  # (bins + 1,) over [0, max reward]
    counts: np.ndarray  # (bins,) counts of strictly positive rewards

    @property
    def total(self) -> int:
        return int(self.zero_count + self.counts.sum())

    @property
    def zero_fraction(self) -> float:
        return self.zero_count / self.total if self.total else 0.0


def motion_histogram(data, bins: int) -> MotionHistogram:
    """Histogram of observed motion with a dedicated zero bin."""
    if bins < 1:
        raise ValueError("bins must be at least 1")
    rewards = data.targets() if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    zero_count = int(np.sum(rewards == 0.0))
    positive = rewards[rewards > 0.0]
    top = float(positive.max()) if positive.size else 1.0
    counts, edges = np.histogram(positive, bins=bins, range=(0.0, top))
    return MotionHistogram(zero_count=zero_count, bin_edges=edges, counts=counts)


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """JSON-lines dump; images are regenerable from mech_seed and not stored."""
    lines = []
    for i in range(len(dataset)):
        mech_id, _, action, reward = dataset.record(i)
        lines.append(
            json.dumps(
                {
                    "mech_seed": mech_id,
                    "kind": dataset.kind.value,
                    "action": [float(v) for v in action],
                    "reward": reward,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_dataset(path: str | Path) -> Dataset:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    dataset: Dataset | None = None
    images: dict[int, np.ndarray] = {}
    for line in lines:
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = MechanismKind(rec["kind"])
        if dataset is None:
            dataset = Dataset(kind)
        seed = int(rec["mech_seed"])
        if seed not in images:
            images[seed] = render(generate_mechanism(kind, seed))
        dataset.append(seed, images[seed], np.asarray(rec["action"], dtype=float), float(rec["reward"]))
    return dataset if dataset is not None else Dataset(MechanismKind.SLIDER)


def save_results(rows: list[CellResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(RESULTS_HEADER + "\n")
        writer = csv.writer(fh)
        writer.writerow(["strategy", "L", "seed", "mech_seed", "attempts", "final_regret"])
        for row in rows:
            writer.writerow(
                [
                    row.strategy.value,
                    row.checkpoint,
                    row.model_seed,
                    row.mech_seed,
                    row.attempts,
                    repr(row.final_regret),
                ]
            )


def load_results(path: str | Path) -> list[CellResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != RESULTS_HEADER:
            raise ResultsFormatError(f"unknown results version tag: {first!r}")
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["strategy", "L", "seed", "mech_seed", "attempts", "final_regret"]:
            raise ResultsFormatError(f"unexpected results columns: {header}")
        rows = []
        for rec in reader:
            rows.append(
                CellResult(
                    strategy=Strategy(rec[0]),
                    checkpoint=int(rec[1]),
                    model_seed=int(rec[2]),
                    mech_seed=int(rec[3]),
                    attempts=int(rec[4]),
                    final_regret=float(rec[5]),
                )
            )
    return rows


def save_aggregate(curves: dict[Strategy, tuple[CurvePoint, ...]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        writer = csv.writer(fh)
        writer.writerow(["strategy", "L", "q25", "median", "q75"])
        for strategy in sorted(curves, key=lambda s: s.value):
            for point in curves[strategy]:
                writer.writerow(
                    [
                        strategy.value,
                        point.checkpoint,
                        repr(point.q25),
                        repr(point.median),
                        repr(point.q75),
                    ]
                )


def load_aggregate(path: str | Path) -> dict[Strategy, tuple[CurvePoint, ...]]:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != AGGREGATE_HEADER:
            raise ResultsFormatError(f"unknown aggregate version tag: {first!r}")
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["strategy", "L", "q25", "median", "q75"]:
            raise ResultsFormatError(f"unexpected aggregate columns: {header}")
        curves: dict[Strategy, list[CurvePoint]] = {}
        for rec in reader:
            curves.setdefault(Strategy(rec[0]), []).append(
                CurvePoint(
                    checkpoint=int(rec[1]),
                    q25=float(rec[2]),
                    median=float(rec[3]),
                    q75=float(rec[4]),
                )
            )
    return {s: tuple(points) for s, points in curves.items()}


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "kind": config.kind.value,
        "train_mechanisms": config.train_mechanisms,
        "interactions_per_mechanism": config.interactions_per_mechanism,
        "eval_mechanisms": config.eval_mechanisms,
        "max_attempts": config.max_attempts,
        "regret_threshold": config.regret_threshold,
        "model_seeds": list(config.model_seeds),
        "checkpoints": list(config.checkpoints),
        "beta": config.beta,
        "kernel": {
            "lengthscales": list(config.kernel.lengthscales),
            "signal_variance": config.kernel.signal_variance,
            "noise_variance": config.kernel.noise_variance,
        },
        "acquisition": {
            "grid_points": config.acquisition.grid_points,
            "top_k": config.acquisition.top_k,
            "max_iterations": config.acquisition.max_iterations,
            "tolerance": config.acquisition.tolerance,
        },
        "training": {
            "epochs": config.training.epochs,
            "minibatch": config.training.minibatch,
            "step_size": config.training.step_size,
            "decay": list(config.training.decay),
        },
        "strategies": [s.value for s in config.strategies],
        "count_probe_as_attempt": config.count_probe_as_attempt,
        "collection_uses_network": config.collection_uses_network,
        "fit_every_mechanism": config.fit_every_mechanism,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    kind = MechanismKind(data["kind"])
    base = default_config(kind)
    kernel = base.kernel
    if "kernel" in data:
        kernel = KernelParams(
            lengthscales=tuple(data["kernel"]["lengthscales"]),
            signal_variance=float(data["kernel"]["signal_variance"]),
            noise_variance=float(data["kernel"]["noise_variance"]),
        )
    acquisition = base.acquisition
    if "acquisition" in data:
        acquisition = AcquisitionConfig(
            grid_points=int(data["acquisition"]["grid_points"]),
            top_k=int(data["acquisition"]["top_k"]),
            max_iterations=int(data["acquisition"]["max_iterations"]),
            tolerance=float(data["acquisition"]["tolerance"]),
        )
    training = base.training
    if "training" in data:
        training = TrainSchedule(
            epochs=int(data["training"]["epochs"]),
            minibatch=int(data["training"]["minibatch"]),
            step_size=float(data["training"]["step_size"]),
            decay=tuple(data["training"]["decay"]),
        )
    return ExperimentConfig(
        kind=kind,
        train_mechanisms=int(data.get("train_mechanisms", base.train_mechanisms)),
        interactions_per_mechanism=int(
            data.get("interactions_per_mechanism", base.interactions_per_mechanism)
        ),
        eval_mechanisms=int(data.get("eval_mechanisms", base.eval_mechanisms)),
        max_attempts=int(data.get("max_attempts", base.max_attempts)),
        regret_threshold=float(data.get("regret_threshold", base.regret_threshold)),
        model_seeds=tuple(data.get("model_seeds", base.model_seeds)),
        checkpoints=tuple(data.get("checkpoints", base.checkpoints)),
        beta=float(data.get("beta", base.beta)),
        kernel=kernel,
        acquisition=acquisition,
        training=training,
        strategies=tuple(Strategy(s) for s in data.get("strategies", [s.value for s in base.strategies])),
        count_probe_as_attempt=bool(data.get("count_probe_as_attempt", False)),
        collection_uses_network=bool(data.get("collection_uses_network", True)),
        fit_every_mechanism=bool(data.get("fit_every_mechanism", False)),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n", encoding="utf-8")
