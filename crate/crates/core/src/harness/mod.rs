//! Experiment runner: TOML configuration, seeded replication loops, CSV
//! records and summary statistics.
//!
//! A minimal experiment document:
//!
//! ```toml
//! replications = 200
//!
//! [scenario]
//! n = 50
//! seed = 1
//! [scenario.cov]
//! kind = "tridiagonal"
//! p = 20
//! [scenario.noise]
//! kind = "gamma_elliptical"
//! theta = 1.0
//!
//! [[estimators]]
//! kind = "sps"
//! u = 3.0
//! tau = 0.25
//! lambda = 1e-4
//! ```

pub mod config;
mod io;
mod rates;
mod run;
mod summary;

pub use config::{
    apply_overrides, load_document, parse_document, CvRequest, CvSpec, EstimateRequest, EstimatorSpec,
    ExperimentSpec, GeneratorSpec, OutputSpec, RatesRequest, TheorySpec,
};
pub use io::{
    format_matrix, parse_data, read_data, summary_json, write_csv, write_csv_file, write_summary_file, CSV_HEADER,
};
pub use rates::{format_rates, rates_table, RateRow};
pub use run::{derive_seed, run_estimator, run_experiment, EstimationContext, ResultRecord};
pub use summary::{median_error, quantile, summarize, summarize_values, Stats, SummaryStats};
