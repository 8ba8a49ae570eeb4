//! Single-mode ladder matrices, their embedding into the four-mode space,
//! and matrix-free application of ladder operators to a flat amplitude tensor.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::modes::{Ladder, ModeId, ModeLayout};
use crate::C64;

/// Truncated annihilation operator: `(N+1) x (N+1)` with `sqrt(n)` on the
/// first superdiagonal.
pub fn ladder_matrix(cutoff: usize) -> Result<Array2<C64>> {
    if cutoff < 1 {
        return Err(Error::InvalidArgument(format!("Fock cutoff must be at least 1, got {cutoff}")));
    }
    let d = cutoff + 1;
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::from((n as f64).sqrt());
    }
    Ok(a)
}

/// Embeds a single-mode operator into the four-mode space as
/// `1 (x) .. (x) op (x) .. (x) 1`, with the tensor factors in layout order.
pub fn embed_operator(op: &Array2<C64>, mode: ModeId, layout: &ModeLayout) -> Result<Array2<C64>> {
    let (rows, cols) = op.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch { expected: rows, found: cols });
    }
    if rows < 2 {
        return Err(Error::InvalidArgument(format!(
            "single-mode operator must be at least 2x2, got {rows}x{cols}"
        )));
    }
    let target = layout.index(mode);
    let eye = Array2::<C64>::eye(rows);
    let mut out = Array2::<C64>::eye(1);
    for k in 0..layout.len() {
        out = kron(&out, if k == target { op } else { &eye });
    }
    Ok(out)
}

pub(crate) fn kron(x: &Array2<C64>, y: &Array2<C64>) -> Array2<C64> {
    let (xr, xc) = x.dim();
    let (yr, yc) = y.dim();
    let mut out = Array2::zeros((xr * yr, xc * yc));
    for ((i, j), &xv) in x.indexed_iter() {
        if xv == C64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &yv) in y.indexed_iter() {
            out[[i * yr + k, j * yc + l]] = xv * yv;
        }
    }
    out
}

/// Index arithmetic for a flat `(N+1)^4` tensor in layout order, last mode
/// fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TensorShape {
    pub levels: usize,
    pub strides: [usize; 4],
}

impl TensorShape {
    pub fn new(cutoff: usize) -> Self {
        let d = cutoff + 1;
        TensorShape {
            levels: d,
            strides: [d * d * d, d * d, d, 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.levels.pow(4)
    }

    pub fn occupation(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.levels
    }

    pub fn flat(&self, occ: [usize; 4]) -> usize {
        occ.iter().zip(self.strides).map(|(n, s)| n * s).sum()
    }

    /// Visits every basis state in storage order with its occupations.
    fn for_each_occupation(&self, mut visit: impl FnMut(usize, [usize; 4])) {
        let d = self.levels;
        let mut flat = 0;
        for n0 in 0..d {
            for n1 in 0..d {
                for n2 in 0..d {
                    for n3 in 0..d {
                        visit(flat, [n0, n1, n2, n3]);
                        flat += 1;
                    }
                }
            }
        }
    }

    /// `op psi` for a single ladder operator.
    pub fn apply(&self, op: Ladder, layout: &ModeLayout, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        let step = LadderStep::new(op, layout, self);
        self.for_each_occupation(|idx, occ| {
            if let Some((src, factor)) = step.source(idx, occ) {
                out[idx] = psi[src] * factor;
            }
        });
        out
    }

    /// `out += coeff * second(first(psi))` for ladder operators on two
    /// distinct modes, in a single pass.
    pub fn accumulate_product(
        &self,
        coeff: C64,
        [first, second]: [Ladder; 2],
        layout: &ModeLayout,
        psi: &[C64],
        out: &mut [C64],
    ) {
        let (p, q) = (LadderStep::new(first, layout, self), LadderStep::new(second, layout, self));
        assert_ne!(p.axis, q.axis, "fused product needs two distinct modes");
        self.for_each_occupation(|idx, occ| {
            if let Some((mid, fq)) = q.source(idx, occ) {
                let mut mid_occ = occ;
                mid_occ[q.axis] = (mid_occ[q.axis] as isize + q.shift) as usize;
                if let Some((src, fp)) = p.source(mid, mid_occ) {
                    out[idx] += coeff * (fp * fq) * psi[src];
                }
            }
        });
    }
}

/// Where `(op psi)[idx]` reads from, and with what weight.
struct LadderStep {
    axis: usize,
    stride: usize,
    top: usize,
    /// +1 for lowering (reads `n + 1`), -1 for raising (reads `n - 1`)
    shift: isize,
    sqrt: Vec<f64>,
}

impl LadderStep {
    fn new(op: Ladder, layout: &ModeLayout, shape: &TensorShape) -> Self {
        let (mode, shift) = match op {
            Ladder::Lower(m) => (m, 1),
            Ladder::Raise(m) => (m, -1),
        };
        let axis = layout.index(mode);
        LadderStep {
            axis,
            stride: shape.strides[axis],
            top: shape.levels - 1,
            shift,
            sqrt: (0..=shape.levels).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    #[inline]
    fn source(&self, idx: usize, occ: [usize; 4]) -> Option<(usize, f64)> {
        let n = occ[self.axis];
        if self.shift > 0 {
            // (a psi)(n) = sqrt(n+1) psi(n+1)
            (n < self.top).then(|| (idx + self.stride, self.sqrt[n + 1]))
        } else {
            // (a^dag psi)(n) = sqrt(n) psi(n-1)
            (n > 0).then(|| (idx - self.stride, self.sqrt[n]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adjoint(m: &Array2<C64>) -> Array2<C64> {
        m.t().mapv(|z| z.conj())
    }

    fn max_abs(m: &Array2<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn cutoff_one() {
        let a = ladder_matrix(1).unwrap();
        assert_eq!(a.dim(), (2, 2));
        assert_eq!(a[[0, 1]], C64::from(1.0));
        assert_eq!(a.iter().filter(|z| z.norm() != 0.0).count(), 1);
    }

    #[test]
    fn cutoff_three_superdiagonal() {
        let a = ladder_matrix(3).unwrap();
        for (n, expected) in [1.0f64, 2.0, 3.0].into_iter().enumerate() {
            assert!((a[[n, n + 1]] - C64::from(expected.sqrt())).norm() < 1e-15);
        }
        let number = adjoint(&a).dot(&a);
        for n in 0..4 {
            assert!((number[[n, n]] - C64::from(n as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn cutoff_zero_rejected() {
        assert!(matches!(ladder_matrix(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn commutator_defect_confined_to_top_level() {
        let cutoff = 5;
        let a = ladder_matrix(cutoff).unwrap();
        let comm = a.dot(&adjoint(&a)) - adjoint(&a).dot(&a);
        for ((i, j), z) in comm.indexed_iter() {
            let expected = if i == j && i < cutoff { 1.0 } else if i == j { -(cutoff as f64) } else { 0.0 };
            assert!((z - C64::from(expected)).norm() < 1e-13, "({i},{j}) = {z}");
        }
    }

    #[test]
    fn embedding_identity_is_identity() {
        let layout = ModeLayout::standard();
        let eye = Array2::<C64>::eye(3);
        let big = embed_operator(&eye, ModeId::S2, &layout).unwrap();
        assert_eq!(big, Array2::<C64>::eye(81));
    }

    #[test]
    fn number_operator_annihilates_vacuum() {
        let layout = ModeLayout::standard();
        let a = ladder_matrix(2).unwrap();
        let n_s1 = embed_operator(&adjoint(&a).dot(&a), ModeId::S1, &layout).unwrap();
        let mut vac = ndarray::Array1::<C64>::zeros(81);
        vac[0] = C64::from(1.0);
        assert!(n_s1.dot(&vac).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn distinct_modes_commute() {
        let layout = ModeLayout::standard();
        let a = ladder_matrix(2).unwrap();
        let a_s1 = embed_operator(&a, ModeId::S1, &layout).unwrap();
        let ad_i1 = embed_operator(&adjoint(&a), ModeId::I1, &layout).unwrap();
        let comm = a_s1.dot(&ad_i1) - ad_i1.dot(&a_s1);
        assert_eq!(max_abs(&comm), 0.0);
    }

    #[test]
    fn embedding_rejects_non_square() {
        let layout = ModeLayout::standard();
        let bad = Array2::<C64>::zeros((2, 3));
        assert!(embed_operator(&bad, ModeId::S1, &layout).is_err());
    }

    #[test]
    fn matrix_free_ladder_matches_embedding() {
        let layout = ModeLayout::standard();
        let cutoff = 2;
        let shape = TensorShape::new(cutoff);
        let a = ladder_matrix(cutoff).unwrap();
        let psi: Vec<C64> = (0..shape.dim())
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let psi_arr = ndarray::Array1::from(psi.clone());
        for mode in ModeId::ALL {
            let lower = embed_operator(&a, mode, &layout).unwrap();
            let raise = embed_operator(&adjoint(&a), mode, &layout).unwrap();
            for (op, mat) in [(Ladder::Lower(mode), lower), (Ladder::Raise(mode), raise)] {
                let fast = shape.apply(op, &layout, &psi);
                let dense = mat.dot(&psi_arr);
                let err = fast.iter().zip(dense.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(err < 1e-14, "{op:?}: {err}");
            }
        }
    }
}
