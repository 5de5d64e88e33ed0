use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit count of the X register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Width(u32);

impl Width {
    pub const MIN: u32 = 1;
    /// A dense table at 24 bits is 2 MiB; the matching statevector is 512 MiB.
    pub const MAX: u32 = 24;

    pub fn new(k: u32) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&k) {
            Ok(Width(k))
        } else {
            Err(Error::WidthOutOfRange(k))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of distinct inputs, `2^k`.
    pub fn inputs(self) -> u64 {
        1u64 << self.0
    }

    /// Mask selecting the low `k` bits.
    pub fn mask(self) -> u64 {
        self.inputs() - 1
    }
}

impl TryFrom<u32> for Width {
    type Error = Error;

    fn try_from(k: u32) -> Result<Self> {
        Width::new(k)
    }
}

impl From<Width> for u32 {
    fn from(w: Width) -> u32 {
        w.0
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
