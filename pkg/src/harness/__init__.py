from .conditions import OUTCOME_CLASSES, Condition, IoInput, IoSpecification, build_io_spec
from .examples import ExampleSelection, select_examples
from .generation import ParsedGeneration, Validity, clean_text, parse_generation, strip_code_fences
from .prompts import TEMPLATE_VERSION, BuiltPrompt, PromptFlag, build_prompt, extract_example_model, prompt_hash
from .provider import (
    ChatProvider,
    HttpChatProvider,
    ProviderResponse,
    RawReply,
    StubProvider,
    echo_example_responder,
    request_generation,
)
from .run_store import RunRecord, RunStore, load_records, record_key
from .runner import HARNESS_ERROR_FLAG, GenerationJob, plan_jobs, run_experiment, run_job


__all__ = [
    "HARNESS_ERROR_FLAG",
    "OUTCOME_CLASSES",
    "TEMPLATE_VERSION",
    "BuiltPrompt",
    "ChatProvider",
    "Condition",
    "ExampleSelection",
    "GenerationJob",
    "HttpChatProvider",
    "IoInput",
    "IoSpecification",
    "ParsedGeneration",
    "PromptFlag",
    "ProviderResponse",
    "RawReply",
    "RunRecord",
    "RunStore",
    "StubProvider",
    "Validity",
    "build_io_spec",
    "build_prompt",
    "clean_text",
    "echo_example_responder",
    "extract_example_model",
    "load_records",
    "parse_generation",
    "plan_jobs",
    "prompt_hash",
    "record_key",
    "request_generation",
    "run_experiment",
    "run_job",
    "select_examples",
    "strip_code_fences",
]
