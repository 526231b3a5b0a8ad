//! Statistical kernels.

mod bootstrap;
mod describe;
mod entropy;
mod kde;
mod ks;
mod rank;
mod sector;

pub use bootstrap::{
    bootstrap_cap_std, bootstrap_curve, cap_std, BootstrapResult, BOOTSTRAP_RNG,
    DEFAULT_BOOTSTRAP_SAMPLES, DEFAULT_GROUP_SIZES,
};
pub use describe::{mean, median, population_std, unit_histogram};
pub use entropy::{normalized_class_entropy, ClassVector};
pub use kde::{kde2d, scott_bandwidth, KdeGrid, DEFAULT_GRID};
pub use ks::{kolmogorov_survival, ks_sorted, ks_two_sample, KsResult, SortedSample};
pub use rank::{kendall_tau, midranks, spearman_rho, RankCorrelation};
pub use sector::{sector_assign, Sector, SectorSplits};
