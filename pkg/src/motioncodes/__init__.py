"""Nine-bit motion codes: codec, verb codebook, metrics, and a fused classifier."""

from .codebook import (
    Codebook,
    CodebookEntry,
    Verb,
    default_codebook,
    dump_codebook,
    load_codebook,
)
from .errors import (
    ClassOutOfRangeError,
    CodebookParseError,
    DatasetParseError,
    DimensionMismatchError,
    DimensionTooSmallError,
    DuplicateCodeError,
    EmptyBatchError,
    EmptyEntryError,
    EmptyInputError,
    InconsistentAnswersError,
    InvalidAnswerError,
    InvalidDoFError,
    InvalidInteractionError,
    MalformedSyntaxError,
    MotionCodeError,
    UnlabeledRecordError,
    VocabularyTooSmallError,
)
from .features import (
    EmbeddingTable,
    FeatureRecord,
    build_features,
    embed_nouns,
    load_dataset,
    load_embeddings,
    save_dataset,
    save_embeddings,
)
from .metrics import (
    EvalReport,
    component_distance,
    evaluate,
    format_accuracy_table,
    hamming,
    within_k_accuracy,
)
from .model import (
    MODALITIES,
    OPTIMIZERS,
    HeadParams,
    ModelConfig,
    Prediction,
    PredictorModel,
    TrainConfig,
    forward,
    fuse,
    gradient,
    learning_rate_at,
    load_model,
    loss,
    predict,
    save_model,
    train,
)
from .synth import inject_noun_noise, synth_dataset
from .taxonomy import (
    COMPONENT_NAMES,
    COMPONENT_SIZES,
    ComponentClasses,
    ContactDuration,
    Dof,
    Engagement,
    Interaction,
    MotionCode,
    PassiveMotion,
    Recurrence,
    TaxonomyAnswers,
    encode_from_answers,
    enumerate_all,
    format_code,
    from_bits,
    from_classes,
    parse_code,
    to_bits,
    to_classes,
)

__version__ = "0.1.0"
