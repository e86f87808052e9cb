"""Configuration models, loaded from YAML"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ir.errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)

CONDITION_NAMES = ("Text", "TextSrl", "TextIo", "TextSrlIo")


class TestabilityCaps(BaseModel):
    __test__ = False

    max_boolean_inputs: int = Field(10, ge=0)
    max_combinations: int = Field(1024, ge=1)


class KeywordEntry(BaseModel):
    outcome_class: str
    keywords: List[str]


class OutcomeKeywords(BaseModel):
    """Ordered keyword lists; the first entry with a matching keyword wins"""
    entries: List[KeywordEntry] = Field(default_factory=lambda: [
        KeywordEntry(outcome_class="NotApplicable", keywords=["niet van toepassing"]),
        KeywordEntry(outcome_class="PermitRequired", keywords=["vergunningplicht", "vergunning"]),
        KeywordEntry(outcome_class="NotificationRequired", keywords=["informatieplicht", "meldingsplicht", "melding"]),
        KeywordEntry(outcome_class="GeneralRulesApply", keywords=["algemene regels"]),
        KeywordEntry(outcome_class="NotApplicable", keywords=["not applicable"]),
        KeywordEntry(outcome_class="PermitRequired", keywords=["permit"]),
        KeywordEntry(outcome_class="NotificationRequired", keywords=["notification", "information obligation"]),
        KeywordEntry(outcome_class="GeneralRulesApply", keywords=["general rules"]),
    ])


class ProviderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    endpoint: str = "https://openrouter.ai/api/v1/chat/completions"
    model: str = "stub"
    temperature: float = Field(0.1, ge=0.0, le=2.0)
    structured_output: bool = True
    disable_reasoning: bool = True
    max_attempts: int = Field(3, ge=1)
    backoff_seconds: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0])
    timeout_seconds: float = Field(120.0, gt=0)
    credential_env: str = "DMN_LAWBENCH_API_KEY"
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    concurrency: int = Field(4, ge=1)
    extra_options: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("backoff_seconds")
    @classmethod
    def _non_negative(cls, backoff: List[float]) -> List[float]:
        if any(delay < 0 for delay in backoff):
            raise ValueError("backoff delays cannot be negative")
        return backoff

    def backoff_for(self, attempt: int) -> float:
        """Delay before retry number `attempt` (1-based); the last delay repeats"""
        if not self.backoff_seconds:
            return 0.0
        return self.backoff_seconds[min(attempt, len(self.backoff_seconds)) - 1]


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    corpus_dir: Path = Path("data/mini_corpus")
    out_dir: Path = Path("out")
    seed: int = 0
    conditions: List[str] = Field(default_factory=lambda: list(CONDITION_NAMES))
    runs: int = Field(5, ge=1)
    caps: TestabilityCaps = Field(default_factory=TestabilityCaps)
    provider_config: Optional[Path] = None
    keywords_path: Optional[Path] = None
    strict: bool = False
    model_type_override: Optional[str] = None

    @field_validator("conditions")
    @classmethod
    def _known_conditions(cls, conditions: List[str]) -> List[str]:
        unknown = [name for name in conditions if name not in CONDITION_NAMES]
        if unknown:
            raise ValueError(f"unknown condition(s) {unknown}; expected {list(CONDITION_NAMES)}")
        return conditions

    @field_validator("model_type_override")
    @classmethod
    def _known_model_type(cls, model_type: Optional[str]) -> Optional[str]:
        if model_type is not None and model_type not in ("Outcome", "Requirements"):
            raise ValueError("model_type_override must be 'Outcome' or 'Requirements'")
        return model_type

    @property
    def models_dir(self) -> Path:
        return self.corpus_dir / "models"

    @property
    def articles_dir(self) -> Path:
        return self.corpus_dir / "articles"

    @property
    def srl_dir(self) -> Path:
        return self.corpus_dir / "srl"


def load_yaml_model(path, model_cls: Type[T]) -> T:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"{path}: cannot read configuration: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    try:
        return model_cls.model_validate(raw or {})
    except ValidationError as e:
        first = e.errors()[0]
        field_path = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{path}: {field_path}: {first['msg']}") from e
