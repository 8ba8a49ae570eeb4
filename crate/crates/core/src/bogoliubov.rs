//! Heisenberg-picture Bogoliubov transforms on the four-mode layout.
//!
//! A transform maps every annihilation operator to
//! `a'_j = sum_k (A_jk a_k + B_jk a_k^dag)`. Optical elements are built in
//! closed form and chained with [`compose`]; vacuum expectation values follow
//! directly from the coefficient blocks.

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::modes::{Ladder, ModeId, ModeLayout};
use crate::moments::MomentSet;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovTransform {
    layout: ModeLayout,
    a: Array2<C64>,
    b: Array2<C64>,
}

impl BogoliubovTransform {
    /// Wraps raw coefficient blocks. Only shapes are checked; use
    /// [`commutator_defect`](Self::commutator_defect) and
    /// [`symmetry_defect`](Self::symmetry_defect) to test physicality.
    pub fn new(layout: ModeLayout, a: Array2<C64>, b: Array2<C64>) -> Result<Self> {
        let m = layout.len();
        for block in [&a, &b] {
            let (rows, cols) = block.dim();
            if rows != m {
                return Err(Error::DimensionMismatch { expected: m, found: rows });
            }
            if cols != m {
                return Err(Error::DimensionMismatch { expected: m, found: cols });
            }
        }
        Ok(BogoliubovTransform { layout, a, b })
    }

    pub fn identity(layout: &ModeLayout) -> Self {
        let m = layout.len();
        BogoliubovTransform {
            layout: layout.clone(),
            a: Array2::eye(m),
            b: Array2::zeros((m, m)),
        }
    }

    /// Two-mode squeezer `exp[-i chi (a b + a^dag b^dag)]`:
    /// `a' = a cosh chi - i b^dag sinh chi`, and symmetrically for `b`.
    pub fn two_mode_squeezer(layout: &ModeLayout, mode_a: ModeId, mode_b: ModeId, chi: f64) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::InvalidArgument(format!(
                "squeezer needs two distinct modes, got {mode_a} twice"
            )));
        }
        if !chi.is_finite() {
            return Err(Error::InvalidArgument(format!("squeezing strength must be finite, got {chi}")));
        }
        let (ia, ib) = (layout.index(mode_a), layout.index(mode_b));
        let mut out = Self::identity(layout);
        let (c, s) = (chi.cosh(), chi.sinh());
        out.a[[ia, ia]] = C64::from(c);
        out.a[[ib, ib]] = C64::from(c);
        out.b[[ia, ib]] = -I * s;
        out.b[[ib, ia]] = -I * s;
        Ok(out)
    }

    /// Beam splitter of transmission amplitude `t` coupling `mode_from` into
    /// `mode_to`, with `r = sqrt(1 - t^2)`:
    ///
    /// `a'_to = t a_from + r a_to`, `a'_from = r a_from - t a_to`.
    pub fn beam_splitter(layout: &ModeLayout, mode_from: ModeId, mode_to: ModeId, t: f64) -> Result<Self> {
        if mode_from == mode_to {
            return Err(Error::InvalidArgument(format!(
                "beam splitter needs two distinct modes, got {mode_from} twice"
            )));
        }
        let r = reflection_amplitude(t)?;
        let (from, to) = (layout.index(mode_from), layout.index(mode_to));
        let mut out = Self::identity(layout);
        out.a[[to, from]] = C64::from(t);
        out.a[[to, to]] = C64::from(r);
        out.a[[from, from]] = C64::from(r);
        out.a[[from, to]] = C64::from(-t);
        Ok(out)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    /// Coefficients of the annihilation operators (`A`).
    pub fn annihilation_block(&self) -> &Array2<C64> {
        &self.a
    }

    /// Coefficients of the creation operators (`B`).
    pub fn creation_block(&self) -> &Array2<C64> {
        &self.b
    }

    /// Coefficient of the initial operator `term` in the evolved `a'_output`.
    pub fn coefficient(&self, output: ModeId, term: Ladder) -> C64 {
        let j = self.layout.index(output);
        match term {
            Ladder::Lower(k) => self.a[[j, self.layout.index(k)]],
            Ladder::Raise(k) => self.b[[j, self.layout.index(k)]],
        }
    }

    /// Largest entry of `A A^H - B B^H - I`.
    pub fn commutator_defect(&self) -> f64 {
        let lhs = self.a.dot(&adjoint(&self.a)) - self.b.dot(&adjoint(&self.b));
        max_abs(&(lhs - Array2::<C64>::eye(self.layout.len())))
    }

    /// Largest entry of `A B^T - B A^T`.
    pub fn symmetry_defect(&self) -> f64 {
        max_abs(&(self.a.dot(&self.b.t()) - self.b.dot(&self.a.t())))
    }

    /// Moments of the evolved operators when every input mode is in vacuum:
    /// `N_jk = sum_m conj(B_jm) B_km`, `M_jk = sum_m A_jm B_km`.
    pub fn vacuum_moments(&self) -> MomentSet {
        let normal = self.b.mapv(|z| z.conj()).dot(&self.b.t());
        let anomalous = self.a.dot(&self.b.t());
        MomentSet::from_matrices(&self.layout, normal, anomalous)
    }
}

/// Heisenberg-picture composition: the optical state passes through `first`,
/// then `second`.
///
/// The outputs of `second` are rewritten in terms of the initial operators by
/// substituting `first`, so `compose(U2, U1)` represents `U1^dag U2^dag O U2 U1`:
///
/// `A = A2 A1 + B2 conj(B1)`, `B = A2 B1 + B2 conj(A1)`.
pub fn compose(second: &BogoliubovTransform, first: &BogoliubovTransform) -> Result<BogoliubovTransform> {
    if second.layout != first.layout {
        return Err(Error::InvalidArgument(
            "cannot compose transforms over different mode layouts".into(),
        ));
    }
    let conj_a1 = first.a.mapv(|z| z.conj());
    let conj_b1 = first.b.mapv(|z| z.conj());
    let a = second.a.dot(&first.a) + second.b.dot(&conj_b1);
    let b = second.a.dot(&first.b) + second.b.dot(&conj_a1);
    Ok(BogoliubovTransform {
        layout: first.layout.clone(),
        a,
        b,
    })
}

/// `sqrt(1 - t^2)` for `t` in `[0, 1]`, exact at both endpoints.
pub fn reflection_amplitude(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "transmission amplitude must lie in [0, 1], got {t}"
        )));
    }
    let radicand = 1.0 - t * t;
    if radicand < -1e-15 {
        return Err(Error::InvalidArgument(format!("negative radicand {radicand} for t = {t}")));
    }
    Ok(radicand.max(0.0).sqrt())
}

fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

fn max_abs(m: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    Zip::from(m).for_each(|z| worst = worst.max(z.norm()));
    worst
}
