//! File formats: PGM images, JSON configs and banks, CSV/JSON reports.

pub mod bank;
pub mod config;
pub mod pgm;
pub mod report;

pub use bank::{BankFile, GridFile};
pub use config::{DataConfig, NoiseConfig, RunConfig, SfConfig, TransformConfig};
pub use pgm::{decode_pgm, encode_pgm, encode_pgm_with_comment, read_pgm, write_pgm};
pub use report::{to_csv_string, write_csv, write_json};
