from .catalog import (
    BRANCH,
    CLARIFY,
    FOLLOW_UP,
    GROUP,
    LINK,
    REGENERATE,
    STRUCTURE,
    SUMMARIZE,
    PromptCatalog,
    complete_with_retry,
)
from .clarifying import (
    ClarifyConfig,
    FlaggedQuestionRegistry,
    check_question,
    clarify,
    is_duplicate_question,
)
from .grouping import (
    SegmentationResult,
    group_thoughts,
    lcs_length,
    merge_to_limit,
    preservation_ratio,
    split_paragraphs,
)
from .linking import LinkEdge, LinkMap, link, validate_edges
from .sentences import first_sentence, segment_answer, split_sentences
from .structuring import StructuredFragment, TaggedSegment, structure_segment, structure_tagged
from .summarizing import SummaryConfig, summarize_subtree, truncate_words, word_count

__all__ = [
    "BRANCH", "CLARIFY", "FOLLOW_UP", "GROUP", "LINK", "REGENERATE", "STRUCTURE",
    "SUMMARIZE", "PromptCatalog", "complete_with_retry",
    "ClarifyConfig", "FlaggedQuestionRegistry", "check_question", "clarify",
    "is_duplicate_question",
    "SegmentationResult", "group_thoughts", "lcs_length", "merge_to_limit",
    "preservation_ratio", "split_paragraphs",
    "LinkEdge", "LinkMap", "link", "validate_edges",
    "first_sentence", "segment_answer", "split_sentences",
    "StructuredFragment", "TaggedSegment", "structure_segment", "structure_tagged",
    "SummaryConfig", "summarize_subtree", "truncate_words", "word_count",
]
