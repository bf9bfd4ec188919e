"""
Experiment configuration: typed sections loaded from a YAML file.
"""
import copy
import os
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import yaml

from sparse_representation_control import settings
from sparse_representation_control.control import ControlConfig
from sparse_representation_control.environments import DomainType, make_environment
from sparse_representation_control.regularizers import RegularizerKind, RegularizerSpec
from sparse_representation_control.tilecoding import TileCoderConfig
from sparse_representation_control.training import TrainConfig, default_epochs
from sparse_representation_control.utils import config_hash

SECTIONS = (
    "experiment",
    "environment",
    "dataset",
    "representation",
    "train",
    "control",
    "analysis",
    "sweep",
)

REPRESENTATION_KINDS = ("network", "tile_coding")


def _from_dict(cls, value: Optional[dict], section: str):
    value = dict(value or {})
    known = {ff.name for ff in fields(cls)}
    unknown = set(value) - known
    if unknown:
        raise ValueError(f"Unknown keys {sorted(unknown)} in section <<{section}>>.")
    return cls(**value)


@dataclass
class DatasetConfig:
    n_transitions: int = settings.DEFAULT_DATASET_SIZE
    file: Optional[str] = None

    def validate(self) -> None:
        if self.n_transitions <= 0:
            raise ValueError("Dataset size needs to be positive.")


@dataclass
class AnalysisConfig:
    """n_test_states = 0 disables the Monte Carlo value oracle and
    n_probe_rollouts = 0 the reference values of the probe tracks;
    full_scale_oracle replaces all these sizes by the full-scale ones."""

    n_probe_states: int = 1000
    heatmap_units: int = 20
    heatmap_resolution: int = 50
    n_test_states: int = 0
    n_rollouts: int = settings.N_ROLLOUTS_DESK
    n_probe_rollouts: int = settings.N_PROBE_ROLLOUTS_DESK
    full_scale_oracle: bool = False
    probe_observations: Optional[list] = None
    probe_actions: Optional[list] = None

    def validate(self) -> None:
        if self.n_probe_states <= 0:
            raise ValueError("Number of probe states needs to be positive.")
        if self.heatmap_units < 0 or self.heatmap_resolution < 2:
            raise ValueError("Invalid heatmap settings.")
        if self.n_test_states < 0 or self.n_rollouts <= 0 or self.n_probe_rollouts < 0:
            raise ValueError("Invalid value-oracle settings.")
        if self.probe_actions is not None and self.probe_observations is None:
            raise ValueError("Probe actions given without probe observations.")


@dataclass
class SweepConfig:
    """`grids` maps a dotted config key (e.g. 'control.step_size') to the list
    of its values; empty grids take the default sets of the representation."""

    grids: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0])
    rank_last: int = 25

    def validate(self) -> None:
        if not self.seeds:
            raise ValueError("Sweep needs at least one seed.")
        for key, values in self.grids.items():
            if len(key.split(".")) < 2 or key.split(".")[0] not in SECTIONS:
                raise ValueError(f"Invalid sweep key <<{key}>>.")
            if not values:
                raise ValueError(f"Empty sweep grid for <<{key}>>.")
        if self.rank_last <= 0:
            raise ValueError("rank_last needs to be positive.")


@dataclass
class ExperimentConfig:
    """All sections of an experiment. (config, master seed) determine every
    output."""

    domain: DomainType = DomainType.MOUNTAIN_CAR
    seed: int = 0
    out: str = "results"
    runs: int = 5
    parallel: int = 1
    environment: dict = field(default_factory=dict)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    representation: str = "network"
    regularizer: RegularizerSpec = field(default_factory=RegularizerSpec)
    tile_coder: TileCoderConfig = field(default_factory=TileCoderConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def __post_init__(self):
        self.domain = DomainType.from_name(self.domain)
        # The regularizer lives in the representation section
        self.train.regularizer = self.regularizer
        self.train.seed = self.seed

    def validate(self) -> None:
        if self.representation not in REPRESENTATION_KINDS:
            raise ValueError(
                f"Unknown representation <<{self.representation}>>, "
                + f"expected one of {REPRESENTATION_KINDS}."
            )
        if self.runs <= 0 or self.parallel <= 0:
            raise ValueError("Runs and parallel workers need to be positive.")
        # Environment parameters are checked by constructing the domain
        make_environment(self.domain, **self.environment)
        self.dataset.validate()
        self.analysis.validate()
        self.sweep.validate()
        with warnings.catch_warnings():
            # Off-grid values of the unused representation are irrelevant
            if self.representation != "network":
                warnings.simplefilter("ignore")
            self.train.validate()
        if self.representation == "tile_coding":
            self.tile_coder.validate()
        self.control.validate()

    @classmethod
    def from_dict(cls, value: dict) -> "ExperimentConfig":
        value = dict(value or {})
        unknown = set(value) - set(SECTIONS)
        if unknown:
            raise ValueError(f"Unknown config sections {sorted(unknown)}.")

        experiment = dict(value.get("experiment") or {})
        representation = dict(value.get("representation") or {})
        known = {"kind", "regularizer", "tile_coder"}
        if set(representation) - known:
            raise ValueError(
                f"Unknown keys {sorted(set(representation) - known)} in section "
                + "<<representation>>."
            )
        domain = DomainType.from_name(experiment.pop("domain", DomainType.MOUNTAIN_CAR))

        train = dict(value.get("train") or {})
        train.setdefault("epochs", default_epochs(domain))
        for key in ("regularizer", "seed"):
            if key in train:
                raise ValueError(f"<<train.{key}>> is set in another section.")

        config = cls(
            domain=domain,
            environment=dict(value.get("environment") or {}),
            dataset=_from_dict(DatasetConfig, value.get("dataset"), "dataset"),
            representation=representation.get("kind", "network"),
            regularizer=RegularizerSpec.from_dict(representation.get("regularizer") or {}),
            tile_coder=TileCoderConfig.from_dict(representation.get("tile_coder") or {}),
            train=TrainConfig.from_dict(train),
            control=ControlConfig.from_dict(dict(value.get("control") or {})),
            analysis=_from_dict(AnalysisConfig, value.get("analysis"), "analysis"),
            sweep=_from_dict(SweepConfig, value.get("sweep"), "sweep"),
            **experiment,
        )
        return config

    def to_dict(self) -> dict:
        train = self.train.to_dict()
        train.pop("regularizer")
        train.pop("seed")
        return {
            "experiment": {
                "domain": self.domain.value,
                "seed": self.seed,
                "out": self.out,
                "runs": self.runs,
                "parallel": self.parallel,
            },
            "environment": dict(self.environment),
            "dataset": asdict(self.dataset),
            "representation": {
                "kind": self.representation,
                "regularizer": self.regularizer.to_dict(),
                "tile_coder": self.tile_coder.to_dict(),
            },
            "train": train,
            "control": self.control.to_dict(),
            "analysis": asdict(self.analysis),
            "sweep": asdict(self.sweep),
        }

    @property
    def hash(self) -> str:
        """Hash of everything that determines the outputs (not where they go)."""
        value = self.to_dict()
        value["experiment"].pop("out")
        value["experiment"].pop("parallel")
        return config_hash(value)

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        """Copy with dotted keys replaced, e.g. {'control.step_size': 0.01}.

        A new domain brings its default epochs along unless the epochs are
        overridden too or were set away from the old domain's default."""
        value = copy.deepcopy(self.to_dict())
        if (
            "experiment.domain" in overrides
            and "train.epochs" not in overrides
            and self.train.epochs == default_epochs(self.domain)
        ):
            value["train"]["epochs"] = default_epochs(overrides["experiment.domain"])
        for key, entry in overrides.items():
            *path, leaf = key.split(".")
            node = value
            for name in path:
                node = node.setdefault(name, {})
            node[leaf] = entry
        return ExperimentConfig.from_dict(value)


def load_config(file_name: Optional[str] = None) -> ExperimentConfig:
    """Experiment config from a YAML file (defaults without file)."""
    if file_name is None:
        return ExperimentConfig()
    with open(file_name, "r") as ff:
        value = yaml.safe_load(ff)
    if value is not None and not isinstance(value, dict):
        raise ValueError(f"Config <<{file_name}>> needs to be a mapping of sections.")
    return ExperimentConfig.from_dict(value or {})


def save_config(file_name: str, config: ExperimentConfig) -> str:
    directory = os.path.dirname(file_name)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_name, "w") as ff:
        yaml.safe_dump(config.to_dict(), ff, sort_keys=True)
    return file_name


def default_sweep_grids(config: ExperimentConfig) -> dict:
    """Sweep sets of the hyperparameters of the chosen representation,
    together with the initial Sarsa step size."""
    grids = {}
    if config.representation == "tile_coding":
        grids["representation.tile_coder.n_tiles"] = list(settings.GRID_TILE_SIZES)
        grids["representation.tile_coder.n_tilings"] = list(settings.GRID_TILINGS)
    else:
        kind = config.regularizer.kind
        prefix = "representation.regularizer."
        if kind.is_distributional:
            grids[prefix + "strength"] = list(settings.GRID_KL_STRENGTH)
            grids[prefix + "beta"] = list(settings.GRID_BETA)
        elif kind in (
            RegularizerKind.L1_WEIGHTS,
            RegularizerKind.L2_WEIGHTS,
            RegularizerKind.L1_ACTS,
            RegularizerKind.L2_ACTS,
        ):
            grids[prefix + "strength"] = list(settings.GRID_NN_STRENGTH)
        elif kind is RegularizerKind.DROPOUT:
            grids[prefix + "dropout"] = list(settings.GRID_DROPOUT)
        elif kind is RegularizerKind.KSPARSE:
            grids[prefix + "k"] = list(settings.GRID_KSPARSE_K)
        elif kind is RegularizerKind.WTA:
            grids[prefix + "k_percent"] = list(settings.GRID_WTA_PERCENT)
    grids["control.step_size"] = list(settings.GRID_STEP_SIZE)
    return grids
