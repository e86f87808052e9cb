from .settings import (
    CONDITION_NAMES,
    KeywordEntry,
    OutcomeKeywords,
    PipelineConfig,
    ProviderConfig,
    TestabilityCaps,
    load_yaml_model,
)


__all__ = [
    "CONDITION_NAMES",
    "KeywordEntry",
    "OutcomeKeywords",
    "PipelineConfig",
    "ProviderConfig",
    "TestabilityCaps",
    "load_yaml_model",
]
