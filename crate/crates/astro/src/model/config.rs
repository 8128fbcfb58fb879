//! Hardware configurations: which big and LITTLE cores are switched on.
//!
//! A configuration is summarized by its active core counts. The all-off
//! assignment is not a configuration, so a machine with `B` big and `L`
//! LITTLE cores has `(B+1)(L+1) - 1` of them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One on/off assignment of cores, summarized by active counts.
///
/// `id` is the dense index of the configuration in enumeration order:
/// LITTLE count outermost, big count innermost, the all-off pair skipped.
/// For counts `(n_big, n_little)` on a `(B, L)` machine this works out to
/// `id = n_little * (B + 1) + n_big - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HardwareConfig {
    pub id: usize,
    pub n_big: u32,
    pub n_little: u32,
}

impl HardwareConfig {
    /// Conventional `xLyB` label: `x` LITTLE cores, `y` big cores.
    pub fn label(&self) -> String {
        format!("{}L{}B", self.n_little, self.n_big)
    }
}

impl std::fmt::Display for HardwareConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Core counts available on the machine: up to `n_big` big and `n_little`
/// LITTLE cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub n_big: u32,
    pub n_little: u32,
}

impl Topology {
    pub fn new(n_big: u32, n_little: u32) -> Result<Self> {
        if n_big == 0 && n_little == 0 {
            return Err(Error::InvalidTopology);
        }
        Ok(Topology { n_big, n_little })
    }

    /// Total number of valid configurations: `(B+1)(L+1) - 1`.
    pub fn n_configs(&self) -> usize {
        (self.n_big as usize + 1) * (self.n_little as usize + 1) - 1
    }

    /// All configurations in id order.
    pub fn configs(&self) -> Vec<HardwareConfig> {
        let mut out = Vec::with_capacity(self.n_configs());
        for n_little in 0..=self.n_little {
            for n_big in 0..=self.n_big {
                if n_big == 0 && n_little == 0 {
                    continue;
                }
                out.push(HardwareConfig {
                    id: out.len(),
                    n_big,
                    n_little,
                });
            }
        }
        out
    }

    /// The configuration with the given dense id.
    pub fn config(&self, id: usize) -> Result<HardwareConfig> {
        let count = self.n_configs();
        if id >= count {
            return Err(Error::InvalidConfigId { id, count });
        }
        let raw = id + 1; // undo the all-off exclusion
        let width = self.n_big as usize + 1;
        Ok(HardwareConfig {
            id,
            n_big: (raw % width) as u32,
            n_little: (raw / width) as u32,
        })
    }
}

/// Enumerates every valid configuration of a `(n_big_max, n_little_max)`
/// machine, all-off excluded, ids dense and in documented order.
pub fn enumerate_configs(n_big_max: u32, n_little_max: u32) -> Result<Vec<HardwareConfig>> {
    Ok(Topology::new(n_big_max, n_little_max)?.configs())
}
