"""
Experiment commands: dataset generation, representation pretraining, Sarsa
control, representation analysis and hyperparameter sweeps.

Every command reads an ExperimentConfig and writes below `config.out`:

    data/                 {domain}_seed{seed}.srcdata, {domain}_seed{seed}_summary.csv
    representation/       checkpoint.srcckpt, train_history.csv
    control/              run_{i}.csv, probes_run_{i}.csv, true_values.csv, aggregate.csv
    analysis/             sparsity.csv, sparsity_histogram.csv, overlap.csv,
                          summary.csv, bootstrap_error.csv, heatmaps/
    sweep/                runs.csv, sweep_results.csv, runs/{config}_seed{seed}/
"""
import itertools
import logging
import os
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from typing import Optional

import numpy as np

from sparse_representation_control import settings
from sparse_representation_control.analysis import (
    BootstrapTracker,
    ProbeSet,
    RepresentationEvaluator,
    default_probes,
    ema_smooth,
    heatmap,
    instance_sparsity,
    mean_and_stderr,
    monte_carlo_values,
    oracle_size,
    sample_test_states,
    select_units,
    sparsity_histogram,
    tracking_errors,
    value_oracle,
    write_heatmaps,
)
from sparse_representation_control.config import (
    ExperimentConfig,
    default_sweep_grids,
    save_config,
)
from sparse_representation_control.control import (
    ControlConfig,
    EpsilonGreedyPolicy,
    FrozenNetworkRepresentation,
    LinearQ,
    RepresentationProvider,
    TileCodingRepresentation,
    run_control,
    write_curve_csv,
)
from sparse_representation_control.environments import make_environment
from sparse_representation_control.network import load_checkpoint
from sparse_representation_control.regularizers import RegularizerSpec
from sparse_representation_control.tilecoding import TileCoder
from sparse_representation_control.training import (
    RepresentationTrainer,
    generate_dataset,
    load_dataset,
    save_dataset,
    write_history_csv,
)
from sparse_representation_control.utils import (
    derive_seed,
    file_fingerprint,
    make_rng,
    read_csv,
    write_csv,
)

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.srcckpt"


def dataset_path(config: ExperimentConfig) -> str:
    if config.dataset.file is not None:
        return config.dataset.file
    return os.path.join(config.out, "data", f"{config.domain.value}_seed{config.seed}.srcdata")


def checkpoint_path(config: ExperimentConfig) -> str:
    return os.path.join(config.out, "representation", CHECKPOINT_NAME)


def probe_batch(config: ExperimentConfig) -> np.ndarray:
    """Held-out observations visited by the data policy (not the training data)."""
    return sample_test_states(
        config.domain,
        config.analysis.n_probe_states,
        derive_seed(config.seed, "probe"),
        config.environment,
    )


def probe_set(config: ExperimentConfig) -> ProbeSet:
    analysis = config.analysis
    if analysis.probe_observations is None:
        return default_probes(config.domain)
    return ProbeSet(
        domain=config.domain,
        observations=analysis.probe_observations,
        actions=list(analysis.probe_actions or []),
        label="config",
    )


def cmd_gen_data(config: ExperimentConfig) -> str:
    """Dataset of the data policy, written with a summary CSV next to it."""
    config.validate()
    batch = generate_dataset(
        config.domain, config.dataset.n_transitions, config.seed, config.environment
    )
    file_name = save_dataset(dataset_path(config), batch)

    summary = batch.summary()
    rows = [(key, value) for key, value in summary.items() if not isinstance(value, list)]
    for key in ("obs_min", "obs_max"):
        rows += [(f"{key}_{ii}", value) for ii, value in enumerate(summary[key])]
    write_csv(
        os.path.splitext(file_name)[0] + "_summary.csv",
        ("key", "value"),
        rows,
        config.hash,
    )
    logger.info(
        "%d transitions, %d episodes (%d terminal, %d cut off)",
        summary["n_transitions"],
        summary["n_episodes"],
        summary["n_terminal"],
        summary["n_truncated"],
    )
    return file_name


def cmd_train_rep(
    config: ExperimentConfig, dataset_file: Optional[str] = None, resume: bool = False
) -> str:
    """Pretrains the representation network; returns the checkpoint file.

    Without dataset file (and none at the default location), the dataset is
    generated first. `resume` continues from an existing checkpoint up to
    `config.train.epochs`."""
    config.validate()
    if config.representation != "network":
        raise ValueError(f"Representation <<{config.representation}>> needs no training.")

    dataset_file = dataset_file or dataset_path(config)
    if not os.path.isfile(dataset_file):
        logger.info("No dataset at %s, generating it.", dataset_file)
        dataset_file = cmd_gen_data(config)
    data = load_dataset(dataset_file)
    if data.domain is not config.domain:
        raise ValueError(
            f"Dataset <<{dataset_file}>> is for {data.domain.value}, "
            + f"not {config.domain.value}."
        )
    logger.info("Dataset %s (sha256 %s)", dataset_file, file_fingerprint(dataset_file))

    oracle = None
    n_states, n_rollouts = oracle_size(
        config.domain,
        config.analysis.full_scale_oracle,
        config.analysis.n_test_states,
        config.analysis.n_rollouts,
    )
    if n_states:
        oracle = value_oracle(
            config.domain,
            n_states,
            n_rollouts,
            config.seed,
            config.environment,
        )

    checkpoint_file = checkpoint_path(config)
    if resume and os.path.isfile(checkpoint_file):
        trainer = RepresentationTrainer.resume(
            checkpoint_file,
            data,
            oracle=oracle,
            probe_observations=probe_batch(config),
            epochs=config.train.epochs,
        )
    else:
        if resume:
            logger.warning("No checkpoint at %s, training from scratch.", checkpoint_file)
        trainer = RepresentationTrainer(
            config.train, data, oracle=oracle, probe_observations=probe_batch(config)
        )
    result = trainer.run(checkpoint_file)

    write_history_csv(
        os.path.join(os.path.dirname(checkpoint_file), "train_history.csv"),
        result.history,
        config.hash,
    )
    return checkpoint_file


def load_provider(
    config: ExperimentConfig, checkpoint_file: Optional[str] = None
) -> RepresentationProvider:
    """Frozen representation of the experiment (network checkpoint or tile
    coder)."""
    environment = make_environment(config.domain, **config.environment)
    if config.representation == "tile_coding":
        tile_coder = TileCoder(config.tile_coder, environment.dimension)
        return TileCodingRepresentation(tile_coder)

    checkpoint_file = checkpoint_file or checkpoint_path(config)
    checkpoint = load_checkpoint(checkpoint_file)
    if checkpoint.params.input_dim != environment.dimension:
        raise ValueError(
            f"Checkpoint <<{checkpoint_file}>> takes inputs of dimension "
            + f"{checkpoint.params.input_dim}, {config.domain.value} has "
            + f"dimension {environment.dimension}."
        )
    train_config = checkpoint.metadata.get("train_config", {})
    regularizer = RegularizerSpec.from_dict(train_config.get("regularizer", {}))
    return FrozenNetworkRepresentation(checkpoint.params, regularizer=regularizer)


def probe_rollouts(config: ExperimentConfig) -> int:
    if config.analysis.full_scale_oracle:
        return settings.N_PROBE_ROLLOUTS_FULL
    return config.analysis.n_probe_rollouts


def probe_true_values(
    domain,
    provider: RepresentationProvider,
    q: LinearQ,
    probes: ProbeSet,
    n_rollouts: int,
    control_config: ControlConfig,
    env_params: Optional[dict] = None,
) -> np.ndarray:
    """Monte Carlo returns at the probes under the final epsilon-greedy policy
    of a run, the reference of its tracked action values."""
    env_params = dict(env_params or {}, max_steps=control_config.cut_off)
    environment = make_environment(domain, **env_params)
    policy = EpsilonGreedyPolicy(environment, provider, q, epsilon=control_config.epsilon)
    return monte_carlo_values(
        domain,
        policy,
        probes,
        n_rollouts=n_rollouts,
        rng=make_rng(control_config.seed, "oracle", 2),
        env_params=env_params,
    )


def _control_worker(task: tuple) -> tuple:
    domain, provider, control_config, env_params, probes, n_rollouts = task
    tracker = BootstrapTracker(probes)
    result = run_control(domain, provider, control_config, env_params, tracker=tracker)
    true_values = None
    if n_rollouts:
        true_values = probe_true_values(
            domain, provider, result.q, probes, n_rollouts, control_config, env_params
        )
    return result.curve, tracker, true_values


@dataclass
class ControlReport:
    curves: list
    trackers: list
    # (runs x probes) Monte Carlo values of the final policies, None if disabled
    true_values: Optional[np.ndarray] = None
    files: list = field(default_factory=list)

    def final_mean(self, metric: str = "returns", n_last: int = 25) -> float:
        return float(np.mean([cc.final_mean(metric, n_last) for cc in self.curves]))


def aggregate_curves(curves: list) -> list:
    """Rows of episode, mean and standard error of steps and return across
    runs, EMA-smoothed means and the fraction of runs reaching the goal."""
    n_episodes = min(len(cc) for cc in curves)
    steps = np.array([cc.steps[:n_episodes] for cc in curves], dtype=float)
    returns = np.array([cc.returns[:n_episodes] for cc in curves], dtype=float)
    truncated = np.array([cc.truncated[:n_episodes] for cc in curves], dtype=bool)

    mean_steps, stderr_steps = mean_and_stderr(steps)
    mean_returns, stderr_returns = mean_and_stderr(returns)
    ema_steps = ema_smooth(mean_steps)
    ema_returns = ema_smooth(mean_returns)
    goal_rate = 1.0 - np.mean(truncated, axis=0)
    return [
        (
            ee,
            mean_steps[ee],
            stderr_steps[ee],
            mean_returns[ee],
            stderr_returns[ee],
            ema_steps[ee],
            ema_returns[ee],
            goal_rate[ee],
        )
        for ee in range(n_episodes)
    ]


AGGREGATE_HEADER = (
    "episode",
    "mean_steps",
    "stderr_steps",
    "mean_return",
    "stderr_return",
    "ema_mean_steps",
    "ema_mean_return",
    "goal_rate",
)


def cmd_control(config: ExperimentConfig, checkpoint_file: Optional[str] = None) -> ControlReport:
    """`config.runs` independent Sarsa runs on the frozen representation.

    Run i uses the seed master + i; runs are distributed over
    `config.parallel` processes."""
    config.validate()
    provider = load_provider(config, checkpoint_file)
    probes = probe_set(config)
    n_rollouts = probe_rollouts(config)

    tasks = [
        (
            config.domain,
            provider,
            replace(config.control, seed=config.seed + ii),
            config.environment,
            probes,
            n_rollouts,
        )
        for ii in range(config.runs)
    ]
    if config.parallel > 1 and config.runs > 1:
        with Pool(min(config.parallel, config.runs)) as pool:
            outputs = pool.map(_control_worker, tasks)
    else:
        outputs = [_control_worker(task) for task in tasks]

    directory = os.path.join(config.out, "control")
    report = ControlReport(
        curves=[curve for curve, _, _ in outputs],
        trackers=[tracker for _, tracker, _ in outputs],
    )
    for ii, (curve, tracker, _) in enumerate(outputs):
        report.files.append(
            write_curve_csv(os.path.join(directory, f"run_{ii}.csv"), curve, ii, config.hash)
        )
        report.files.append(
            tracker.write_csv(os.path.join(directory, f"probes_run_{ii}.csv"), ii, config.hash)
        )
        logger.info(
            "Run %d (seed %d): %d/%d episodes reached the goal, final return %.1f",
            ii,
            curve.seed,
            curve.n_goals,
            len(curve),
            curve.final_mean(),
        )

    if n_rollouts:
        report.true_values = np.array([values for _, _, values in outputs])
        report.files.append(
            write_csv(
                os.path.join(directory, "true_values.csv"),
                ["run_id", "n_rollouts"] + probes.names,
                [[ii, n_rollouts] + list(values) for ii, values in enumerate(report.true_values)],
                config.hash,
            )
        )

    report.files.append(
        write_csv(
            os.path.join(directory, "aggregate.csv"),
            AGGREGATE_HEADER,
            aggregate_curves(report.curves),
            config.hash,
        )
    )
    return report


def bootstrap_error_rows(control_directory: str, probes: ProbeSet) -> list:
    """Per run and episode, tracked probe values minus the Monte Carlo values
    of the run's final policy. Empty without control outputs."""
    true_file = os.path.join(control_directory, "true_values.csv")
    if not os.path.isfile(true_file):
        return []

    rows = []
    final_errors = []
    for true_row in read_csv(true_file):
        if any(name not in true_row for name in probes.names):
            raise ValueError(f"Reference values in <<{true_file}>> are for other probes.")
        run_id = int(true_row["run_id"])
        true_values = [float(true_row[name]) for name in probes.names]
        track = read_csv(os.path.join(control_directory, f"probes_run_{run_id}.csv"))
        tracked = np.array([[float(row[name]) for name in probes.names] for row in track])
        errors = tracking_errors(tracked.reshape(-1, len(probes)), true_values)
        for row, error in zip(track, errors):
            rows.append([run_id, int(row["episode"])] + list(error) + [np.mean(np.abs(error))])
        if len(errors):
            final_errors.append(np.mean(np.abs(errors[-1])))

    if final_errors:
        logger.info("Mean absolute probe error after the last episode: %.3f", np.mean(final_errors))
    return rows


def cmd_analyze(
    config: ExperimentConfig,
    checkpoint_file: Optional[str] = None,
    heatmaps: Optional[bool] = None,
) -> list:
    """Sparsity, dead units, probe overlap and unit heatmaps of a trained
    representation, plus the error of the probe tracks of a previous control
    command. `heatmaps` None draws them on 2-d domains only."""
    config.validate()
    if config.representation != "network":
        raise ValueError("Only network representations can be analyzed.")
    dimension = make_environment(config.domain, **config.environment).dimension
    if heatmaps and dimension != 2:
        raise ValueError(
            f"Heatmaps need a 2-d domain, {config.domain.value} has dimension {dimension}."
        )
    provider = load_provider(config, checkpoint_file)
    directory = os.path.join(config.out, "analysis")
    files = []

    evaluator = RepresentationEvaluator(
        provider.dense_features(probe_batch(config)), activation=provider.activation
    )
    metrics = evaluator.evaluate_metrics()
    sparsities = instance_sparsity(evaluator.representations, evaluator.threshold)
    files.append(
        write_csv(
            os.path.join(directory, "sparsity.csv"),
            ("instance", "sparsity"),
            enumerate(sparsities),
            config.hash,
        )
    )
    counts = sparsity_histogram(sparsities)
    edges = np.linspace(0.0, 100.0, len(counts) + 1)
    files.append(
        write_csv(
            os.path.join(directory, "sparsity_histogram.csv"),
            ("bucket_low", "bucket_high", "count"),
            zip(edges[:-1], edges[1:], counts),
            config.hash,
        )
    )

    probes = probe_set(config)
    probe_evaluator = RepresentationEvaluator(
        provider.dense_features(probes.observations),
        activation=provider.activation,
        labels=probes.names,
    )
    overlap_rows = probe_evaluator.overlap_table()
    files.append(
        write_csv(
            os.path.join(directory, "overlap.csv"),
            ("probe_i", "probe_j", "overlap"),
            overlap_rows,
            config.hash,
        )
    )
    mean_overlap = float(np.mean([oo for _, _, oo in overlap_rows])) if overlap_rows else 0.0

    summary = [
        ("width", provider.width),
        ("threshold", metrics["threshold"]),
        ("mean_instance_sparsity", metrics["mean_instance_sparsity"]),
        ("n_dead_units", metrics["n_dead_units"]),
        ("mean_probe_overlap", mean_overlap),
    ]
    files.append(
        write_csv(os.path.join(directory, "summary.csv"), ("metric", "value"), summary, config.hash)
    )
    logger.info(
        "Mean instance sparsity %.2f%%, %d dead units, mean probe overlap %.2f",
        metrics["mean_instance_sparsity"],
        metrics["n_dead_units"],
        mean_overlap,
    )

    error_rows = bootstrap_error_rows(os.path.join(config.out, "control"), probes)
    if error_rows:
        files.append(
            write_csv(
                os.path.join(directory, "bootstrap_error.csv"),
                ["run_id", "episode"] + probes.names + ["mean_abs_error"],
                error_rows,
                config.hash,
            )
        )

    if heatmaps is None:
        heatmaps = dimension == 2 and config.analysis.heatmap_units > 0
    if heatmaps:
        units = select_units(
            provider.width, config.analysis.heatmap_units, make_rng(config.seed, "heatmap")
        )
        grids = heatmap(
            provider.params,
            config.domain,
            units,
            resolution=config.analysis.heatmap_resolution,
            sparsifier=provider.sparsifier,
        )
        files.append(write_heatmaps(os.path.join(directory, "heatmaps"), grids, config.hash))
    return files


def sweep_points(config: ExperimentConfig) -> list:
    """Cartesian product of the sweep grids as a list of override dicts, in
    the key order of the grids."""
    grids = config.sweep.grids or default_sweep_grids(config)
    keys = list(grids)
    return [dict(zip(keys, values)) for values in itertools.product(*grids.values())]


def _sweep_worker(task: tuple) -> tuple:
    config_dict, point_index, seed, overrides, data_file = task
    base = ExperimentConfig.from_dict(config_dict)
    run_dir = os.path.join(base.out, "sweep", "runs", f"{point_index:03d}_seed{seed}")
    config = base.with_overrides(
        dict(
            overrides,
            **{
                "experiment.seed": seed,
                "experiment.out": run_dir,
                "experiment.runs": 1,
                "experiment.parallel": 1,
                # Sweeps rank learning curves only
                "analysis.n_probe_rollouts": 0,
            },
        )
    )
    config.validate()
    save_config(os.path.join(run_dir, "config.yaml"), config)

    checkpoint_file = None
    if config.representation == "network":
        checkpoint_file = cmd_train_rep(config, dataset_file=data_file)
    report = cmd_control(config, checkpoint_file)
    n_last = config.sweep.rank_last
    return (
        point_index,
        seed,
        report.final_mean("returns", n_last),
        report.final_mean("steps", n_last),
    )


def rank_sweep(points: list, run_rows: list) -> list:
    """(rank, point index, mean final return, stderr, n seeds) sorted by the
    mean final return; ties keep the order of the points."""
    ranked = []
    for index in range(len(points)):
        finals = [row[2] for row in run_rows if row[0] == index]
        mean, stderr = mean_and_stderr(np.array(finals))
        ranked.append((index, float(mean), float(stderr), len(finals)))
    ranked.sort(key=lambda row: (-row[1], row[0]))
    return [(rank,) + row for rank, row in enumerate(ranked)]


def cmd_sweep(config: ExperimentConfig) -> str:
    """Every grid point x sweep seed as an independent run in its own output
    directory, then the ranking by mean final return."""
    config.validate()
    points = sweep_points(config)
    seeds = list(config.sweep.seeds)
    directory = os.path.join(config.out, "sweep")

    data_files = {}
    if config.representation == "network":
        # One dataset per seed, shared read-only by the runs
        for seed in seeds:
            seed_config = config.with_overrides(
                {"experiment.seed": seed, "experiment.out": directory, "dataset.file": None}
            )
            data_files[seed] = (
                config.dataset.file
                if config.dataset.file is not None
                else cmd_gen_data(seed_config)
            )

    config_dict = config.to_dict()
    tasks = [
        (config_dict, ii, seed, point, data_files.get(seed))
        for ii, point in enumerate(points)
        for seed in seeds
    ]
    logger.info("Sweep of %d points x %d seeds", len(points), len(seeds))
    if config.parallel > 1:
        with Pool(config.parallel) as pool:
            run_rows = list(pool.imap(_sweep_worker, tasks))
    else:
        run_rows = [_sweep_worker(task) for task in tasks]

    keys = list(points[0]) if points else []
    write_csv(
        os.path.join(directory, "runs.csv"),
        ["point", "seed"] + keys + ["final_return", "final_steps"],
        [
            [index, seed] + [points[index][kk] for kk in keys] + [final_return, final_steps]
            for index, seed, final_return, final_steps in run_rows
        ],
        config.hash,
    )

    ranked = rank_sweep(points, run_rows)
    file_name = write_csv(
        os.path.join(directory, "sweep_results.csv"),
        ["rank", "point"] + keys + ["mean_final_return", "stderr_final_return", "n_seeds"],
        [
            [rank, index] + [points[index][kk] for kk in keys] + [mean, stderr, n_seeds]
            for rank, index, mean, stderr, n_seeds in ranked
        ],
        config.hash,
    )
    best = ranked[0]
    logger.info("Best point %d %s: final return %.2f", best[1], points[best[1]], best[2])
    return file_name


__all__ = [
    "ControlReport",
    "dataset_path",
    "checkpoint_path",
    "probe_batch",
    "probe_set",
    "load_provider",
    "aggregate_curves",
    "probe_rollouts",
    "probe_true_values",
    "bootstrap_error_rows",
    "sweep_points",
    "rank_sweep",
    "cmd_gen_data",
    "cmd_train_rep",
    "cmd_control",
    "cmd_analyze",
    "cmd_sweep",
]
