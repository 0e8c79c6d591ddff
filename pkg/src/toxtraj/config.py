"""Pipeline configuration from a flat ``key = value`` file.

Relative paths resolve against the config file's directory, except the
fixture paths (``llm_fixtures``, ``terms``, ``kg``, ``search``,
``templates``), which resolve against ``--fixture-dir`` when one is given.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .corpus import ChunkConfig
from .errors import ConfigError
from .ranker import RankerConfig
from .resolution import EvaluatorConfig
from .schema import layer_from_name

_FIXTURE_KEYS = ("llm_fixtures", "terms", "kg", "search", "templates")
_PATH_KEYS = ("corpus", "work_dir", "graph") + _FIXTURE_KEYS


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Path
    work_dir: Path
    graph: Path | None = None
    llm_backend: str = "mock"
    llm_fixtures: Path | None = None
    llm_base_url: str = ""
    llm_model: str = "meta-llama/Llama-3.1-8B-Instruct"
    embed_backend: str = "mock"
    embed_dim: int = 64
    embed_base_url: str = ""
    embed_model: str = "sentence-transformers/all-MiniLM-L6-v2"
    api_key_env: str = "TOXTRAJ_API_KEY"
    terms: Path | None = None
    kg: Path | None = None
    search: Path | None = None
    templates: Path | None = None
    seed: int = 0
    jobs: int = 1
    top_k: int = 8
    max_refine_rounds: int = 1
    policy_lr: float = 0.5
    emerging_year: int = 2020
    cooccurrence: tuple = (("Pollutant", "Source"), ("Pollutant", "Disease"), ("Pollutant", "Organ"))
    chunking: ChunkConfig = field(default_factory=ChunkConfig)
    ranker: RankerConfig = field(default_factory=RankerConfig)
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)

    @property
    def graph_path(self) -> Path:
        return self.graph or self.work_dir / "graph.jsonl"

    def validate(self) -> None:
        if not self.corpus.is_file():
            raise ConfigError(f"corpus file not found: {self.corpus}")
        if self.llm_backend not in ("mock", "remote"):
            raise ConfigError(f"llm_backend must be mock or remote, got {self.llm_backend!r}")
        if self.embed_backend not in ("mock", "remote"):
            raise ConfigError(f"embed_backend must be mock or remote, got {self.embed_backend!r}")
        if self.llm_backend == "mock" and self.llm_fixtures is None:
            raise ConfigError("llm_backend = mock needs llm_fixtures")
        if self.llm_backend == "remote" and not self.llm_base_url:
            raise ConfigError("llm_backend = remote needs llm_base_url")
        if self.embed_backend == "remote" and not self.embed_base_url:
            raise ConfigError("embed_backend = remote needs embed_base_url")
        for key in _FIXTURE_KEYS:
            p = getattr(self, key)
            if p is not None and not p.is_file():
                raise ConfigError(f"{key} file not found: {p}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.max_refine_rounds < 0:
            raise ConfigError("max_refine_rounds must be >= 0")


# config key -> (section, field name, parser)
def _floats(s):
    return tuple(float(x) for x in s.split(","))


def _pairs(s):
    out = []
    for item in s.split(","):
        a, sep, b = item.strip().partition(":")
        if not sep:
            raise ValueError(f"expected Layer:Layer, got {item!r}")
        out.append((layer_from_name(a).value, layer_from_name(b).value))
    return tuple(out)


def _year_month(s):
    y, _, m = s.partition("-")
    return (int(y), int(m or 1))


def _words(s):
    return tuple(w.strip() for w in s.split(",") if w.strip())


_NESTED = {
    "chunk_max_tokens": ("chunking", "max_tokens", int),
    "chunk_overlap": ("chunking", "overlap_sentences", int),
    "ranker_temperature": ("ranker", "temperature", float),
    "ranker_threshold": ("ranker", "relevance_threshold", float),
    "ranker_top_n": ("ranker", "top_n", int),
    "ranker_edge_threshold": ("ranker", "edge_threshold", float),
    "ranker_lr": ("ranker", "learning_rate", float),
    "ranker_epochs": ("ranker", "epochs", int),
    "ranker_hidden1": ("ranker", "hidden1", int),
    "ranker_hidden2": ("ranker", "hidden2", int),
    "eval_alpha": ("evaluator", "alpha", float),
    "eval_weights": ("evaluator", "weights", _floats),
    "eval_threshold": ("evaluator", "accept_threshold", float),
    "eval_half_life": ("evaluator", "half_life", float),
    "eval_now": ("evaluator", "now", _year_month),
    "eval_internal_k": ("evaluator", "internal_k", int),
    "eval_assertive_cues": ("evaluator", "assertive_cues", _words),
    "eval_hedge_cues": ("evaluator", "hedge_cues", _words),
    "eval_negation_cues": ("evaluator", "negation_cues", _words),
}
_TOP_PARSERS = {"seed": int, "jobs": int, "top_k": int, "max_refine_rounds": int, "embed_dim": int,
                "policy_lr": float, "emerging_year": int, "cooccurrence": _pairs}


def parse_config_text(text: str, base_dir: Path, fixture_dir=None, overrides=None) -> PipelineConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",),
                                   inline_comment_prefixes=None)
    cp.optionxform = str
    try:
        cp.read_string("[toxtraj]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw = dict(cp["toxtraj"])
    raw.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})

    top_names = {f.name for f in fields(PipelineConfig)} - {"chunking", "ranker", "evaluator"}
    top, nested = {}, {"chunking": {}, "ranker": {}, "evaluator": {}}
    for key, value in raw.items():
        value = value.strip()
        try:
            if key in _NESTED:
                section, name, conv = _NESTED[key]
                nested[section][name] = conv(value)
            elif key in _PATH_KEYS:
                base = Path(fixture_dir) if fixture_dir and key in _FIXTURE_KEYS else base_dir
                p = Path(value).expanduser()
                top[key] = p if p.is_absolute() else base / p
            elif key in top_names:
                top[key] = _TOP_PARSERS.get(key, str)(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    for required in ("corpus", "work_dir"):
        if required not in top:
            raise ConfigError(f"config is missing {required!r}")
    try:
        return PipelineConfig(
            **top,
            chunking=ChunkConfig(**nested["chunking"]),
            ranker=RankerConfig(**nested["ranker"]),
            evaluator=EvaluatorConfig(**nested["evaluator"]),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, fixture_dir=None, overrides=None) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, path.resolve().parent, fixture_dir, overrides)
