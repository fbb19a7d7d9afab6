"""Event-driven sentiment analysis of timestamped short texts.

The pipeline: load a corpus of dated, group-tagged texts; score each
text with a rule-based valence model; aggregate into daily meanPol /
pnRatio series; compare the windows before and after dated events with
Welch's t-test; and, separately, train a bag-of-words logistic
regression to classify texts into reaction categories and evaluate it
with one-vs-rest metrics.
"""

from .corpus import (
    CorpusSummary,
    LoadResult,
    RowRejection,
    TweetRecord,
    filter_records,
    load_corpus,
    summarize,
    write_corpus,
)
from .errors import ComputationError, EventpolError, ValidationError
from .eventstat import (
    ErrorStats,
    Event,
    EventReport,
    WelchResult,
    WindowPair,
    error_stats,
    event_report,
    extract_windows,
    load_events,
    regularized_incomplete_beta,
    two_sided_p,
    welch_t,
)
from .metrics import (
    ClassCounts,
    ClassMetrics,
    ConfusionCounts,
    MetricsReport,
    class_metrics,
    confusion,
    macro_average,
    metrics_report,
    micro_average,
)
from .reactions import (
    ReactionClassifier,
    ReactionModel,
    TokenCountVectorizer,
    TrainConfig,
    Vocabulary,
    build_vocabulary,
    load_model,
    loss_and_grad,
    predict,
    predicted_event_counts,
    save_model,
    softmax,
    stratified_split,
    train,
    vectorize,
)
from .series import DailyPoint, PolaritySeries, daily_aggregate, pn_ratio, score_records, series_to_csv
from .textprep import (
    lemmatize,
    normalize,
    prep_for_features,
    remove_stopwords,
    tokenize,
)
from .valence import (
    Lexicon,
    SentimentScore,
    ValenceConfig,
    ValenceScorer,
    classify_polarity,
    compound,
    default_lexicon,
    load_lexicon,
)

__version__ = "0.1.0"
