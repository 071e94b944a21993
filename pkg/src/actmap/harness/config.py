"""Run configuration: flat key-value files with one section per module.

A run is described by three sections. [run] holds orchestration fields
(environment, algorithm, seeds, step budget), [agent] mirrors AgentConfig and
[pretrain] mirrors FeasTrainConfig. Defaults follow the published
hyperparameter tables; the handful of values that differ between the SAC and
PPO families (entropy coefficient, proposal bandwidth factor) are resolved
from the algorithm id before file values are applied, so an empty file is
already a faithful preset.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field

from ..agents.config import AgentConfig
from ..envs import ENVIRONMENTS
from ..pretrain.loop import FeasTrainConfig

BASE_ALGORITHMS = ("sac", "ppo", "am-sac", "am-ppo", "lag-sac", "lag-ppo")
FILTER_NAMES = ("replacement", "resampling", "projection")


class ConfigError(ValueError):
    """Validation failure carrying one diagnostic line per bad field."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


@dataclass
class RunConfig:
    environment: str = "toy"
    algorithm: str = "am-sac"
    seeds: tuple = (0, 1, 2)
    total_steps: int = 100_000
    s_points: int = 64  # path feasibility evaluation points
    out_dir: str = "runs"
    run_name: str = ""  # derived from algorithm and environment when empty
    eval_episodes: int = 100
    feasibility_checkpoint: str = ""  # reuse a pretrained map instead of pretraining
    agent: AgentConfig = field(default_factory=AgentConfig)
    pretrain: FeasTrainConfig = field(default_factory=FeasTrainConfig)

    @property
    def name(self) -> str:
        return self.run_name or f"{self.algorithm}-{self.environment}"


def parse_algorithm(algorithm: str) -> tuple[str, str | None]:
    """Split 'sac+projection' style ids into (base, filter-or-None)."""
    parts = algorithm.split("+")
    if len(parts) > 2 or parts[0] not in BASE_ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if len(parts) == 1:
        return parts[0], None
    if parts[1] not in FILTER_NAMES:
        raise ValueError(f"unknown safety filter {parts[1]!r}")
    return parts[0], parts[1]


def default_run_config(algorithm: str = "am-sac", environment: str = "toy") -> RunConfig:
    """Published defaults, with the PPO-family deviations already applied."""
    agent = AgentConfig()
    pretrain = FeasTrainConfig()
    base, _ = parse_algorithm(algorithm)
    if base.endswith("ppo"):
        agent.entropy_coef = 5e-3
        pretrain.sigma_prime_factor = 1.0
    return RunConfig(environment=environment, algorithm=algorithm,
                     agent=agent, pretrain=pretrain)


def _parse_value(text: str, like):
    """Coerce a config string to the type of an existing default value."""
    text = text.strip()
    if isinstance(like, bool):
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    if isinstance(like, tuple):
        if not text:
            return ()
        return tuple(int(part) for part in text.split(","))
    return text


def _apply_section(target, items, section: str, diagnostics: list) -> None:
    known = {f.name: f for f in dataclasses.fields(target)}
    for key, raw in items:
        name = key.replace("-", "_")
        if name not in known or name in ("agent", "pretrain"):
            diagnostics.append(f"[{section}] unknown field {key!r}")
            continue
        try:
            setattr(target, name, _parse_value(raw, getattr(target, name)))
        except ValueError as exc:
            diagnostics.append(f"[{section}] {key}: {exc}")


def load_config(path: str, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a config file; raises ConfigError with diagnostics.

    ``overrides`` maps dotted keys ('run.total_steps', 'agent.gamma') to raw
    string values and wins over the file; an absent or empty file is legal.
    """
    parser = configparser.ConfigParser()
    if path:
        with open(path) as fh:
            parser.read_file(fh)
    merged: dict[str, list] = {"run": [], "agent": [], "pretrain": []}
    diagnostics: list[str] = []
    for section in parser.sections():
        if section not in merged:
            diagnostics.append(f"unknown section [{section}]")
            continue
        merged[section].extend(parser.items(section))
    for dotted, raw in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in merged or not key:
            diagnostics.append(f"unknown override {dotted!r}")
            continue
        merged[section].append((key, raw))

    # the algorithm decides family defaults, so resolve it before the rest
    algorithm = "am-sac"
    environment = "toy"
    for key, raw in merged["run"]:
        if key.replace("-", "_") == "algorithm":
            algorithm = raw.strip()
        if key.replace("-", "_") == "environment":
            environment = raw.strip()
    try:
        config = default_run_config(algorithm, environment)
    except ValueError as exc:
        diagnostics.append(f"[run] algorithm: {exc}")
        config = RunConfig()

    _apply_section(config, merged["run"], "run", diagnostics)
    try:
        _apply_section(config.agent, merged["agent"], "agent", diagnostics)
        config.agent.__post_init__()
    except ValueError as exc:
        diagnostics.append(f"[agent] {exc}")
    try:
        _apply_section(config.pretrain, merged["pretrain"], "pretrain", diagnostics)
        config.pretrain.__post_init__()
    except ValueError as exc:
        diagnostics.append(f"[pretrain] {exc}")

    diagnostics.extend(validate(config))
    if diagnostics:
        raise ConfigError(diagnostics)
    return config


def validate(config: RunConfig) -> list[str]:
    """Field-level diagnostics; empty when the configuration is runnable."""
    diags = []
    if config.environment not in ENVIRONMENTS:
        diags.append(
            f"[run] environment: unknown {config.environment!r}, "
            f"choose from {sorted(ENVIRONMENTS)}"
        )
    try:
        base, filt = parse_algorithm(config.algorithm)
    except ValueError as exc:
        diags.append(f"[run] algorithm: {exc}")
        return diags
    if filt is not None and base not in ("sac", "ppo"):
        diags.append(
            f"[run] algorithm: safety filters only combine with the plain "
            f"learners, not {base!r}"
        )
    if filt == "replacement" and config.environment not in ("robot", "toy"):
        diags.append(
            "[run] algorithm: replacement needs an environment with a known "
            f"safe action; {config.environment!r} has none"
        )
    if not config.seeds:
        diags.append("[run] seeds: at least one seed required")
    elif len(set(config.seeds)) != len(config.seeds):
        diags.append("[run] seeds: duplicates make runs indistinguishable")
    elif any(s < 0 for s in config.seeds):
        diags.append("[run] seeds: must be non-negative")
    if config.total_steps < 1:
        diags.append("[run] total_steps: must be positive")
    if config.eval_episodes < 0:
        diags.append("[run] eval_episodes: must be non-negative")
    if config.s_points < 2:
        diags.append("[run] s_points: need at least 2 evaluation points")
    return diags


def dump_config(config: RunConfig) -> str:
    """Effective-configuration text: every resolved field, ready to re-load."""
    parser = configparser.ConfigParser()
    parser["run"] = {}
    for f in dataclasses.fields(RunConfig):
        if f.name in ("agent", "pretrain"):
            continue
        parser["run"][f.name] = _format_value(getattr(config, f.name))
    parser["agent"] = {
        f.name: _format_value(getattr(config.agent, f.name))
        for f in dataclasses.fields(AgentConfig)
    }
    parser["pretrain"] = {
        f.name: _format_value(getattr(config.pretrain, f.name))
        for f in dataclasses.fields(FeasTrainConfig)
    }
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)
