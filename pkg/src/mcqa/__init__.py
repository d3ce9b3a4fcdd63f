"""Evidence-grounded multiple-choice question answering for CJK corpora.

The pipeline cascades four stages: evidence retrieval (BM25 over a CJK
unigram+bigram index), question preprocessing (negation detection and
catchall-option rewriting), candidate scoring (built-in lexical scorer or
a remote model service), and answer selection (argmax for regular
questions, argmin for negation questions). An evaluation harness compares
the four ablation modes of the two preprocessing fixes.
"""

from .analysis import (
    CatchallConfig,
    DEFAULT_CATCHALL,
    DEFAULT_LEXICON,
    NEGATION,
    NegationLexicon,
    QuestionAnalysis,
    REGULAR,
    analyze,
    classify_question,
    detect_catchall,
    load_catchall,
    load_lexicon,
    rewrite_options,
)
from .corpus import (
    Dataset,
    DatasetStats,
    Lesson,
    Paragraph,
    Question,
    dataset_stats,
    gen_synthetic,
    load_dataset,
    load_wiki_lessons,
    save_dataset,
)
from .errors import McqaError
from .pipeline import (
    ALL_MODES,
    AblationMode,
    EvalReport,
    Prediction,
    answer_question,
    compare_modes,
    evaluate,
    render_table,
    report_to_dict,
    report_to_json,
    select_answer,
)
from .retrieval import (
    InvertedIndex,
    RetrievalResult,
    bm25_score,
    build_index,
    fuse_evidence,
    load_index,
    retrieve_evidence,
    retrieve_top_k,
    save_index,
    tokenize,
)
from .scoring import (
    ProtocolError,
    ScoreVector,
    ScorerConfig,
    TransportError,
    lexical_score,
    remote_score,
    score,
)

__version__ = "0.1.0"
