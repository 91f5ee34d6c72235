"""Natural-language command parsing: grammar and LLM engines behind one schema."""
from pathlib import Path

from .grammar import DIRECTION_MAP, VERB_MAP, ParseResult, parse_with_grammar
from .harness import evaluate_corpus, load_corpus
from .llm import LlmClient, LlmConfigError, extract_json_object, parse_with_llm
from .prompt import TEMPLATE_VERSIONS, PromptError, build_cot_prompt
from .schema import (
    AXES,
    OPERATION_TYPES,
    SIGNS,
    Command,
    FeatureRef,
    Operation,
    StructuredCommand,
    validate_schema,
)


def default_corpus_path() -> Path:
    """The evaluation corpus shipped with the package."""
    return Path(__file__).parent / "data" / "corpus_v1.jsonl"


__all__ = [
    "AXES",
    "Command",
    "DIRECTION_MAP",
    "FeatureRef",
    "LlmClient",
    "LlmConfigError",
    "OPERATION_TYPES",
    "Operation",
    "ParseResult",
    "PromptError",
    "SIGNS",
    "StructuredCommand",
    "TEMPLATE_VERSIONS",
    "VERB_MAP",
    "build_cot_prompt",
    "default_corpus_path",
    "evaluate_corpus",
    "extract_json_object",
    "load_corpus",
    "parse_with_grammar",
    "parse_with_llm",
    "validate_schema",
]
