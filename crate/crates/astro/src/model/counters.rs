//! Performance counter readings and their discretization into hardware
//! phases.
//!
//! Each of the four counters is cut into three buckets; a hardware phase is
//! one cell of the resulting 3^4 = 81-cell grid. All ranges are inclusive on
//! the lower bound and exclusive on the upper one.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The four counter kinds we discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CounterKind {
    /// Instructions per cycle.
    Ipc,
    /// Cache misses per cache access.
    Cma,
    /// Cache misses per instruction.
    Cmi,
    /// CPU utilization.
    Cpu,
}

impl CounterKind {
    pub const ALL: [CounterKind; 4] = [
        CounterKind::Ipc,
        CounterKind::Cma,
        CounterKind::Cmi,
        CounterKind::Cpu,
    ];

    /// The two cut points separating the three buckets of this counter.
    pub fn cuts(&self) -> [f64; 2] {
        match self {
            CounterKind::Ipc => [0.5, 1.0],
            CounterKind::Cma => [0.01, 0.05],
            CounterKind::Cmi => [0.001, 0.005],
            CounterKind::Cpu => [0.20, 0.50],
        }
    }
}

impl std::fmt::Display for CounterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CounterKind::Ipc => "IPC",
            CounterKind::Cma => "CMA",
            CounterKind::Cmi => "CMI",
            CounterKind::Cpu => "CPU",
        };
        write!(f, "{name}")
    }
}

/// One sample of the four counters over a monitoring interval.
///
/// Rates and fractions, all non-negative; `cpu` additionally must not
/// exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterReading {
    pub ipc: f64,
    pub cma: f64,
    pub cmi: f64,
    pub cpu: f64,
}

impl CounterReading {
    pub fn new(ipc: f64, cma: f64, cmi: f64, cpu: f64) -> Result<Self> {
        let reading = CounterReading { ipc, cma, cmi, cpu };
        reading.validate()?;
        Ok(reading)
    }

    pub fn validate(&self) -> Result<()> {
        for (kind, value) in [
            (CounterKind::Ipc, self.ipc),
            (CounterKind::Cma, self.cma),
            (CounterKind::Cmi, self.cmi),
            (CounterKind::Cpu, self.cpu),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCounter { kind, value });
            }
        }
        if self.cpu > 1.0 {
            return Err(Error::InvalidCounter {
                kind: CounterKind::Cpu,
                value: self.cpu,
            });
        }
        Ok(())
    }

    pub fn get(&self, kind: CounterKind) -> f64 {
        match kind {
            CounterKind::Ipc => self.ipc,
            CounterKind::Cma => self.cma,
            CounterKind::Cmi => self.cmi,
            CounterKind::Cpu => self.cpu,
        }
    }
}

/// Maps a counter value to its bucket index 0..=2.
///
/// Lower bounds are inclusive, upper bounds exclusive, so a value sitting
/// exactly on a cut point lands in the upper bucket.
pub fn bucketize(kind: CounterKind, value: f64) -> Result<u8> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidCounter { kind, value });
    }
    let [lo, hi] = kind.cuts();
    Ok(if value < lo {
        0
    } else if value < hi {
        1
    } else {
        2
    })
}

/// One cell of the 81-cell counter grid.
///
/// The bucket tuple is ordered (IPC, CMA, CMI, CPU) and encoded as a
/// mixed-radix index `b_ipc*27 + b_cma*9 + b_cmi*3 + b_cpu` in 0..=80.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HardwarePhase {
    pub buckets: [u8; 4],
}

impl HardwarePhase {
    pub fn new(buckets: [u8; 4]) -> Result<Self> {
        if buckets.iter().any(|&b| b > 2) {
            return Err(Error::Invalid(format!(
                "hardware phase buckets {buckets:?} out of range 0..=2"
            )));
        }
        Ok(HardwarePhase { buckets })
    }

    pub fn index(&self) -> usize {
        self.buckets
            .iter()
            .fold(0usize, |acc, &b| acc * 3 + b as usize)
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if index >= super::N_HARDWARE_PHASES {
            return Err(Error::Invalid(format!(
                "hardware phase index {index} out of range 0..=80"
            )));
        }
        let mut rest = index;
        let mut buckets = [0u8; 4];
        for slot in buckets.iter_mut().rev() {
            *slot = (rest % 3) as u8;
            rest /= 3;
        }
        Ok(HardwarePhase { buckets })
    }
}

/// Discretizes a full counter reading into its hardware phase.
pub fn hardware_phase(reading: &CounterReading) -> Result<HardwarePhase> {
    let mut buckets = [0u8; 4];
    for (slot, kind) in buckets.iter_mut().zip(CounterKind::ALL) {
        *slot = bucketize(kind, reading.get(kind))?;
    }
    Ok(HardwarePhase { buckets })
}
