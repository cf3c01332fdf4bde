//! Transform-domain shrinkage denoising with cycle-spinning tight frames.
//!
//! The crate covers the whole loop: a redundant windowed DCT frame
//! ([`transform`]), piecewise-linear shrinkage functions ([`shrinkage`]),
//! least-squares training under three objectives ([`training`]), the
//! denoising pipeline and its error metrics ([`pipeline`]), and a harness
//! that checks the relations between unitary and redundant transforms
//! empirically ([`experiments`]). File formats and the command line live in
//! [`io`] and [`cli`].

pub mod cli;
pub mod error;
pub mod experiments;
pub mod image;
pub mod io;
pub mod pipeline;
pub mod rng;
pub mod shrinkage;
pub mod training;
pub mod transform;

pub use error::{Error, Result};
pub use image::Image;
pub use pipeline::{add_gaussian_noise, denoise, domain_errors, mse, psnr, rmse, DomainErrors, NoiseSpec};
pub use shrinkage::{KnotGrid, PiecewiseLinearSf, SfBank};
pub use training::{Method, Objectives, TrainOptions, TrainedBank, TrainingPair};
pub use transform::{make_dct_basis, verify_tight_frame, BandId, BandStack, DctBasis, RedundantTransform, ShiftSet};
