//! File formats around narrative graphs.
//!
//! * five-column prediction tables (`ID Category Offsets Word Head`) with a
//!   strict parser for canonical files and a tolerant reader for raw model
//!   output;
//! * three-column candidate lists (`ID Offsets Word`);
//! * inline tagged text with role markers;
//! * canonical graph JSON and dataset loading (`train/ val/ test/`).
//!
//! All offsets in every format count Unicode scalar values, not bytes.

mod graph_file;
mod inline;
mod table;

pub use graph_file::{
    graph_from_json, graph_to_json, load_dataset, load_graph, save_graph, verify_graph_spans,
    verify_row_spans, DatasetError, DatasetSplits, SpanMismatch,
};
pub use inline::{parse_inline, serialize_inline, IndexPolicy, InlineError, TagMap};
pub use table::{
    graph_from_rows, parse_candidate_list, parse_model_output_tolerant, parse_prediction_table,
    prediction_rows_from_graph, serialize_candidate_list, serialize_prediction_table, Candidate,
    CandidateList, ParseDiagnostics, PredictionRow, TableError, TABLE_HEADER,
};
