//! Time-series econometrics toolkit: correlation significance, dynamic OLS,
//! Feldstein-Horioka capital-mobility regressions, ADF unit-root testing,
//! VAR estimation with lag selection and diagnostics, Granger causality,
//! vector moving-average expansion and Cholesky forecast-error variance
//! decomposition, plus financial-depth and capital-bonanza classifiers.

pub mod csv_io;
pub mod error;
pub mod exec;
pub mod hp;
pub mod macrofin;
pub mod regress;
pub mod series;
pub mod stats;
pub mod table;
pub mod unitroot;
pub mod varkit;

pub use error::{Error, ErrorClass, Result};
pub use series::{Dataset, Frequency, Period, TimeIndex, TimeSeries};
