"""Multi-view prediction aggregation, ensembling and macro-mAP evaluation."""

from viewagg._core import (  # noqa: F401
    AggregationConfig,
    AslParams,
    ClassEval,
    EvalReport,
    LabelTable,
    MissingViewPolicy,
    PredictionRecord,
    StudyGroup,
    StudyPrediction,
    SynthConfig,
    ViewKind,
    ViewaggError,
    aggregate_all,
    aggregate_all_unweighted,
    aggregate_study,
    asl_forward,
    asl_gradient,
    average_precision,
    ensemble,
    evaluate,
    generate,
    group_by_study,
    read_labels,
    read_predictions,
    read_study_predictions,
    validate_prediction_set,
    view_mean,
    write_predictions,
    write_study_predictions,
)

__all__ = [name for name in dir() if not name.startswith("_")]
