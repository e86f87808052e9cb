from .example_effects import EXCON_GENVAR, EXSIM_GENSIM, ExampleEffectRow, ExampleEffects, example_effect_metrics
from .report import (
    CONDITION_PAIRS,
    REPORT_FILES,
    ComparisonRow,
    ConditionTest,
    EquivalenceRow,
    EquivalenceSummaryRow,
    ReportArtifacts,
    RunHealthRow,
    SimilarityRow,
    condition_tests,
    descriptive_comparison,
    emit_report,
    equivalence_tables,
    run_health,
    similarity_by_condition,
)
from .statistics import StatResult, spearman, wilcoxon_signed_rank
from .text_features import TERTILE_GROUPS, TertileRow, TextFeatures, split_sentences, tertile_table, text_features


__all__ = [
    "CONDITION_PAIRS",
    "EXCON_GENVAR",
    "EXSIM_GENSIM",
    "REPORT_FILES",
    "TERTILE_GROUPS",
    "ComparisonRow",
    "ConditionTest",
    "EquivalenceRow",
    "EquivalenceSummaryRow",
    "ExampleEffectRow",
    "ExampleEffects",
    "ReportArtifacts",
    "RunHealthRow",
    "SimilarityRow",
    "StatResult",
    "TertileRow",
    "TextFeatures",
    "condition_tests",
    "descriptive_comparison",
    "emit_report",
    "equivalence_tables",
    "example_effect_metrics",
    "run_health",
    "similarity_by_condition",
    "spearman",
    "split_sentences",
    "tertile_table",
    "text_features",
    "wilcoxon_signed_rank",
]
