use std::fmt;

use crate::error::{Error, Result};

/// One of the four optical modes: signal and idler of each downconverter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeId {
    S1,
    I1,
    S2,
    I2,
}

impl ModeId {
    pub const ALL: [ModeId; 4] = [ModeId::S1, ModeId::I1, ModeId::S2, ModeId::I2];

    pub fn label(self) -> &'static str {
        match self {
            ModeId::S1 => "s1",
            ModeId::I1 => "i1",
            ModeId::S2 => "s2",
            ModeId::I2 => "i2",
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A single ladder operator: `Lower(m)` is `a_m`, `Raise(m)` is `a_m^dagger`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ladder {
    Lower(ModeId),
    Raise(ModeId),
}

/// Fixed ordering of the modes, `[s1, i1, s2, i2]`.
///
/// Every matrix and tensor index in the crate is taken from this ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeLayout {
    order: [ModeId; 4],
}

impl Default for ModeLayout {
    fn default() -> Self {
        Self::standard()
    }
}

impl ModeLayout {
    pub fn standard() -> Self {
        ModeLayout { order: ModeId::ALL }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn modes(&self) -> &[ModeId; 4] {
        &self.order
    }

    pub fn index(&self, mode: ModeId) -> usize {
        self.order
            .iter()
            .position(|&m| m == mode)
            .expect("layout contains every mode")
    }

    pub fn labels(&self) -> [&'static str; 4] {
        self.order.map(ModeId::label)
    }

    pub fn by_label(&self, label: &str) -> Result<ModeId> {
        self.order
            .iter()
            .copied()
            .find(|m| m.label() == label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode label `{label}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_ordering_is_stable() {
        let layout = ModeLayout::standard();
        assert_eq!(layout.len(), 4);
        assert_eq!(layout.labels(), ["s1", "i1", "s2", "i2"]);
        for (k, &m) in ModeId::ALL.iter().enumerate() {
            assert_eq!(layout.index(m), k);
            assert_eq!(layout.by_label(m.label()).unwrap(), m);
        }
    }

    #[test]
    fn unknown_label_is_rejected() {
        let err = ModeLayout::standard().by_label("p").unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
