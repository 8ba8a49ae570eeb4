//! Matrix exponentials for the oracle: a dense scaling-and-squaring route and
//! a matrix-free Taylor route acting on a vector.

use ndarray::Array2;

use crate::C64;

/// Scaled Taylor blocks are kept below this 1-norm.
const DENSE_SCALED_NORM: f64 = 0.25;
/// Norm of `h G` per substep of the vector route.
const VECTOR_STEP_NORM: f64 = 8.0;
const MAX_TAYLOR_TERMS: usize = 80;

fn one_norm(m: &Array2<C64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` by scaling and squaring with a truncated Taylor series.
pub fn expm_dense(m: &Array2<C64>) -> Array2<C64> {
    let (rows, cols) = m.dim();
    assert_eq!(rows, cols, "expm of a non-square matrix");
    let norm = one_norm(m);
    let squarings = if norm > DENSE_SCALED_NORM {
        (norm / DENSE_SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.mapv(|z| z / 2f64.powi(squarings));

    let mut sum = Array2::<C64>::eye(rows);
    let mut term = Array2::<C64>::eye(rows);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-3 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// `exp(G) v` where `apply` evaluates `G x` and `norm_bound >= ||G||_2`.
///
/// The unit interval is split into substeps of norm at most
/// `VECTOR_STEP_NORM`, each summed until the next Taylor term is negligible.
pub fn expm_action<F>(apply: F, norm_bound: f64, v: &[C64], substep_factor: usize) -> Vec<C64>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let steps = ((norm_bound / VECTOR_STEP_NORM).ceil() as usize).max(1) * substep_factor.max(1);
    let h = 1.0 / steps as f64;
    let mut state = v.to_vec();
    for _ in 0..steps {
        let mut acc = state.clone();
        let mut term = state;
        for k in 1..=MAX_TAYLOR_TERMS {
            term = apply(&term);
            let scale = h / k as f64;
            term.iter_mut().for_each(|z| *z *= scale);
            let mut term_norm = 0.0;
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
                term_norm += t.norm_sqr();
            }
            let acc_norm: f64 = acc.iter().map(|z| z.norm_sqr()).sum();
            if term_norm <= 1e-34 * acc_norm {
                break;
            }
        }
        state = acc;
    }
    state
}
