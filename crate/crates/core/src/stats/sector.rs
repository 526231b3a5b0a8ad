//! Quadrants of the social-vs-financial importance plane.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// High financial, high social importance.
    A,
    /// High financial, low social importance.
    B,
    /// Low financial, low social importance.
    C,
    /// Low financial, high social importance.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSplits {
    pub financial: f64,
    pub social: f64,
}

/// Points exactly on a split count as high.
pub fn sector_assign(financial: f64, social: f64, splits: SectorSplits) -> Sector {
    match (financial >= splits.financial, social >= splits.social) {
        (true, true) => Sector::A,
        (true, false) => Sector::B,
        (false, false) => Sector::C,
        (false, true) => Sector::D,
    }
}
