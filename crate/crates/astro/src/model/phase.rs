//! The four program phases a function can belong to.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Static program phase of a code region, derived from its feature vector.
///
/// Indices are fixed: Blocked = 0, IOBound = 1, CPUBound = 2, Other = 3.
/// Classification precedence follows the same order (see `mine`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProgramPhase {
    Blocked,
    IOBound,
    CPUBound,
    Other,
}

impl ProgramPhase {
    pub const ALL: [ProgramPhase; 4] = [
        ProgramPhase::Blocked,
        ProgramPhase::IOBound,
        ProgramPhase::CPUBound,
        ProgramPhase::Other,
    ];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn from_index(index: usize) -> Result<Self> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("program phase index {index} out of range 0..=3")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProgramPhase::Blocked => "Blocked",
            ProgramPhase::IOBound => "IOBound",
            ProgramPhase::CPUBound => "CPUBound",
            ProgramPhase::Other => "Other",
        }
    }
}

impl std::fmt::Display for ProgramPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_fixed() {
        for (i, phase) in ProgramPhase::ALL.iter().enumerate() {
            assert_eq!(phase.index(), i);
            assert_eq!(ProgramPhase::from_index(i).unwrap(), *phase);
        }
        assert!(ProgramPhase::from_index(4).is_err());
    }

    #[test]
    fn serializes_as_plain_names() {
        let json = serde_json::to_string(&ProgramPhase::IOBound).unwrap();
        assert_eq!(json, "\"IOBound\"");
    }
}
