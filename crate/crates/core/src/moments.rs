use ndarray::Array2;

use crate::modes::{ModeId, ModeLayout};
use crate::C64;

/// Second-order moments of the two output signal fields.
///
/// `n_s1 = <a'_s1^dag a'_s1>`, `n_s2 = <a'_s2^dag a'_s2>` and
/// `cross = <a'_s1^dag a'_s2>`. Backends that have them also attach the full
/// normally ordered matrix `N_jk = <a'_j^dag a'_k>` and the anomalous matrix
/// `M_jk = <a'_j a'_k>` over all four modes.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub n_s1: f64,
    pub n_s2: f64,
    pub cross: C64,
    pub normal: Option<Array2<C64>>,
    pub anomalous: Option<Array2<C64>>,
}

impl MomentSet {
    pub fn new(n_s1: f64, n_s2: f64, cross: C64) -> Self {
        MomentSet {
            n_s1,
            n_s2,
            cross,
            normal: None,
            anomalous: None,
        }
    }

    /// Picks the signal entries out of full moment matrices.
    pub fn from_matrices(layout: &ModeLayout, normal: Array2<C64>, anomalous: Array2<C64>) -> Self {
        let s1 = layout.index(ModeId::S1);
        let s2 = layout.index(ModeId::S2);
        MomentSet {
            n_s1: normal[[s1, s1]].re,
            n_s2: normal[[s2, s2]].re,
            cross: normal[[s1, s2]],
            normal: Some(normal),
            anomalous: Some(anomalous),
        }
    }

    /// Largest absolute difference over the three signal moments.
    pub fn max_deviation(&self, other: &MomentSet) -> f64 {
        (self.n_s1 - other.n_s1)
            .abs()
            .max((self.n_s2 - other.n_s2).abs())
            .max((self.cross - other.cross).norm())
    }

    /// Largest absolute difference over every entry of the full matrices,
    /// or `None` if either side lacks them.
    pub fn max_matrix_deviation(&self, other: &MomentSet) -> Option<f64> {
        let pairs = [
            (self.normal.as_ref()?, other.normal.as_ref()?),
            (self.anomalous.as_ref()?, other.anomalous.as_ref()?),
        ];
        Some(
            pairs
                .iter()
                .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max),
        )
    }

    /// `|cross|^2 - n_s1 n_s2`, which is never positive for a physical state.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        self.cross.norm_sqr() - self.n_s1 * self.n_s2
    }

    pub fn is_zero(&self) -> bool {
        let scalars_zero = self.n_s1 == 0.0 && self.n_s2 == 0.0 && self.cross == C64::new(0.0, 0.0);
        let matrices_zero = [&self.normal, &self.anomalous]
            .into_iter()
            .flatten()
            .all(|m| m.iter().all(|z| *z == C64::new(0.0, 0.0)));
        scalars_zero && matrices_zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_entries_follow_layout() {
        let layout = ModeLayout::standard();
        let mut normal = Array2::zeros((4, 4));
        normal[[0, 0]] = C64::new(1.0, 0.0);
        normal[[2, 2]] = C64::new(2.0, 0.0);
        normal[[0, 2]] = C64::new(0.5, 0.25);
        let m = MomentSet::from_matrices(&layout, normal, Array2::zeros((4, 4)));
        assert_eq!(m.n_s1, 1.0);
        assert_eq!(m.n_s2, 2.0);
        assert_eq!(m.cross, C64::new(0.5, 0.25));
        assert!(m.cauchy_schwarz_excess() < 0.0);
        assert!(!m.is_zero());
    }

    #[test]
    fn deviation_covers_all_three_entries() {
        let a = MomentSet::new(1.0, 2.0, C64::new(0.0, 0.0));
        let b = MomentSet::new(1.0, 2.0, C64::new(0.0, 0.3));
        assert!((a.max_deviation(&b) - 0.3).abs() < 1e-15);
        assert_eq!(a.max_matrix_deviation(&b), None);
    }
}
