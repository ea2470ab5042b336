//! Retrieval metrics, coverage curves and text-similarity metrics.

mod curve;
mod plot;
mod retrieval;
mod text;

use thiserror::Error;

pub use curve::{
    coverage_curve, curve_sizes, curves_to_csv, subset_order, CoverageCurve, CurveOptions, CurvePoint, CurveRun,
    SubsetPolicy, MIN_RANDOM_SEEDS,
};
pub use plot::render_svg;
pub use retrieval::{
    hit_rate, is_hit, is_synonym_recoverable, recall_at_1, retrieval_report, RecallDefinition, RetrievalReport,
};
pub use text::{
    bleu_n, chrf, compare_translations, edit_distance, rouge_l, rouge_l_pair, text_report, wer, BleuSmoothing,
    ExternalScores, TextMetricReport, CHRF_BETA, CHRF_ORDER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("{metric} is undefined: {reason}")]
    UndefinedMetric { metric: &'static str, reason: String },
    #[error("corpora are not aligned: {hyp} hypotheses vs {refs} references")]
    Alignment { hyp: usize, refs: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("plot: {0}")]
    Plot(String),
}
