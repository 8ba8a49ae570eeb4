//! Brute-force oracle: the four-mode state vector in a truncated number basis.
//!
//! Amplitudes are stored densely over occupations `(n_s1, n_i1, n_s2, n_i2)`,
//! each in `0..=N`. Elements act through `exp(G)` with
//!
//! * squeezer: `G = -i chi (a b + a^dag b^dag)`
//! * beam splitter: `G = theta (a_to^dag a_from - a_from^dag a_to)`, `sin theta = t`
//!
//! so that the evolved moments reproduce the Heisenberg transforms in
//! [`crate::bogoliubov`] term for term.

pub mod expm;
mod ladder;
mod truncation;

use ndarray::{Array1, Array2};

pub use ladder::{embed_operator, ladder_matrix};
pub use truncation::{cutoff_schedule, truncation_check, truncation_check_with, TruncationReport, DEFAULT_CUTOFF_CAP};

use crate::error::{Error, Result};
use crate::experiment::ExperimentConfig;
use crate::modes::{Ladder, ModeId, ModeLayout};
use crate::moments::MomentSet;
use crate::C64;
use ladder::{kron, TensorShape};

/// Largest cutoff for which [`Propagator::Auto`] exponentiates the dense
/// two-mode generator.
pub const DENSE_CUTOFF_MAX: usize = 8;

/// Allowed change of the squared norm across one element.
pub const NORM_TOL: f64 = 1e-10;

/// Strongest squeezing the oracle is run at. Beyond this the photon-number
/// tails outgrow the cutoff cap and only the exact backend is used.
pub const ORACLE_MAX_CHI: f64 = 0.75;

/// Norm drift per element above which the Taylor route refines its substeps.
const TAYLOR_DRIFT_TARGET: f64 = 1e-12;
const MAX_SUBSTEP_FACTOR: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    layout: ModeLayout,
    shape: TensorShape,
    amplitudes: Vec<C64>,
}

impl FockState {
    pub fn vacuum(cutoff: usize) -> Result<Self> {
        Self::number_state(cutoff, [0; 4])
    }

    /// Product number state; `occupation` is in layout order.
    pub fn number_state(cutoff: usize, occupation: [usize; 4]) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::InvalidArgument(format!("Fock cutoff must be at least 1, got {cutoff}")));
        }
        if let Some(n) = occupation.iter().find(|&&n| n > cutoff) {
            return Err(Error::InvalidArgument(format!("occupation {n} exceeds cutoff {cutoff}")));
        }
        let shape = TensorShape::new(cutoff);
        let mut amplitudes = vec![C64::new(0.0, 0.0); shape.dim()];
        amplitudes[shape.flat(occupation)] = C64::new(1.0, 0.0);
        Ok(FockState {
            layout: ModeLayout::standard(),
            shape,
            amplitudes,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.shape.levels - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of the number state with `occupation` in layout order.
    pub fn amplitude(&self, occupation: [usize; 4]) -> C64 {
        if occupation.iter().any(|&n| n > self.cutoff()) {
            return C64::new(0.0, 0.0);
        }
        self.amplitudes[self.shape.flat(occupation)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn mean_number(&self, mode: ModeId) -> f64 {
        let lowered = self.shape.apply(Ladder::Lower(mode), &self.layout, &self.amplitudes);
        lowered.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Occupations (layout order) of every basis state with nonzero weight
    /// above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<[usize; 4]> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > threshold)
            .map(|(idx, _)| std::array::from_fn(|axis| self.shape.occupation(idx, axis)))
            .collect()
    }

    fn apply_ladder(&self, op: Ladder, psi: &[C64]) -> Vec<C64> {
        self.shape.apply(op, &self.layout, psi)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Squeezer,
    BeamSplitter,
}

/// One optical element as an exponentiated two-mode generator.
///
/// `strength` is `chi` for a squeezer and `theta = arcsin t` for a beam
/// splitter, which couples `modes.0` into `modes.1`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    kind: ElementKind,
    modes: (ModeId, ModeId),
    strength: f64,
}

impl GeneratorSpec {
    pub fn squeezer(mode_a: ModeId, mode_b: ModeId, chi: f64) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::InvalidArgument(format!("squeezer needs two distinct modes, got {mode_a} twice")));
        }
        if !chi.is_finite() {
            return Err(Error::InvalidArgument(format!("squeezing strength must be finite, got {chi}")));
        }
        Ok(GeneratorSpec {
            kind: ElementKind::Squeezer,
            modes: (mode_a, mode_b),
            strength: chi,
        })
    }

    pub fn beam_splitter(mode_from: ModeId, mode_to: ModeId, t: f64) -> Result<Self> {
        if mode_from == mode_to {
            return Err(Error::InvalidArgument(format!(
                "beam splitter needs two distinct modes, got {mode_from} twice"
            )));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("transmission amplitude must lie in [0, 1], got {t}")));
        }
        Ok(GeneratorSpec {
            kind: ElementKind::BeamSplitter,
            modes: (mode_from, mode_to),
            strength: t.asin(),
        })
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn modes(&self) -> (ModeId, ModeId) {
        self.modes
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// `G` as a sum of coefficient times a product of two ladder operators;
    /// the operator listed first acts first.
    fn terms(&self) -> [(C64, [Ladder; 2]); 2] {
        let (p, q) = self.modes;
        match self.kind {
            ElementKind::Squeezer => {
                let c = C64::new(0.0, -self.strength);
                [
                    (c, [Ladder::Lower(q), Ladder::Lower(p)]),
                    (c, [Ladder::Raise(q), Ladder::Raise(p)]),
                ]
            }
            ElementKind::BeamSplitter => {
                let theta = C64::from(self.strength);
                [
                    (theta, [Ladder::Lower(p), Ladder::Raise(q)]),
                    (-theta, [Ladder::Lower(q), Ladder::Raise(p)]),
                ]
            }
        }
    }

    /// Upper bound on `||G||` in the truncated space: each two-operator
    /// product is bounded by the cutoff.
    fn norm_bound(&self, cutoff: usize) -> f64 {
        2.0 * self.strength.abs() * cutoff as f64
    }
}

/// How `exp(G)` is applied to the state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Propagator {
    /// Dense two-mode exponential up to [`DENSE_CUTOFF_MAX`], Taylor above.
    #[default]
    Auto,
    /// Scaling-and-squaring on the `(N+1)^2` two-mode generator.
    DensePair,
    /// Substepped Taylor series acting on the full state vector.
    Taylor,
}

pub fn apply_element(state: &FockState, gen: &GeneratorSpec) -> FockState {
    apply_element_with(state, gen, Propagator::Auto)
}

pub fn apply_element_with(state: &FockState, gen: &GeneratorSpec, propagator: Propagator) -> FockState {
    if gen.strength == 0.0 {
        return state.clone();
    }
    let dense = match propagator {
        Propagator::Auto => state.cutoff() <= DENSE_CUTOFF_MAX,
        Propagator::DensePair => true,
        Propagator::Taylor => false,
    };
    let amplitudes = if dense {
        apply_dense_pair(state, gen)
    } else {
        apply_taylor(state, gen)
    };
    FockState {
        amplitudes,
        ..state.clone()
    }
}

fn apply_generator(state: &FockState, gen: &GeneratorSpec, psi: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for (coeff, ops) in gen.terms() {
        state.shape.accumulate_product(coeff, ops, &state.layout, psi, &mut out);
    }
    out
}

fn apply_taylor(state: &FockState, gen: &GeneratorSpec) -> Vec<C64> {
    let bound = gen.norm_bound(state.cutoff());
    let before = state.norm_sqr();
    let mut factor = 1;
    loop {
        let out = expm::expm_action(|x| apply_generator(state, gen, x), bound, &state.amplitudes, factor);
        let after: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        if (after - before).abs() < TAYLOR_DRIFT_TARGET || factor >= MAX_SUBSTEP_FACTOR {
            return out;
        }
        factor *= 2;
    }
}

/// Dense generator on the two-mode subspace, basis index `n_p (N+1) + n_q`.
fn pair_generator(gen: &GeneratorSpec, cutoff: usize) -> Array2<C64> {
    let (p, q) = gen.modes;
    let lower = ladder_matrix(cutoff).expect("cutoff validated by FockState");
    let raise = lower.t().mapv(|z| z.conj());
    let eye = Array2::<C64>::eye(cutoff + 1);
    let matrix = |op: Ladder| match op {
        Ladder::Lower(m) if m == p => kron(&lower, &eye),
        Ladder::Raise(m) if m == p => kron(&raise, &eye),
        Ladder::Lower(m) if m == q => kron(&eye, &lower),
        Ladder::Raise(m) if m == q => kron(&eye, &raise),
        _ => unreachable!("generator terms only touch their own modes"),
    };
    let d = (cutoff + 1) * (cutoff + 1);
    let mut g = Array2::<C64>::zeros((d, d));
    for (coeff, [first, second]) in gen.terms() {
        g = g + matrix(second).dot(&matrix(first)).mapv(|z| coeff * z);
    }
    g
}

fn apply_dense_pair(state: &FockState, gen: &GeneratorSpec) -> Vec<C64> {
    let cutoff = state.cutoff();
    let d = cutoff + 1;
    let unitary = expm::expm_dense(&pair_generator(gen, cutoff));

    let (p, q) = gen.modes;
    let (ap, aq) = (state.layout.index(p), state.layout.index(q));
    let others: Vec<usize> = (0..4).filter(|&k| k != ap && k != aq).collect();
    let s = state.shape.strides;
    let offset = |np: usize, nq: usize| np * s[ap] + nq * s[aq];

    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    let mut slice = Array1::<C64>::zeros(d * d);
    for o1 in 0..d {
        for o2 in 0..d {
            let base = o1 * s[others[0]] + o2 * s[others[1]];
            for np in 0..d {
                for nq in 0..d {
                    slice[np * d + nq] = state.amplitudes[base + offset(np, nq)];
                }
            }
            let evolved = unitary.dot(&slice);
            for np in 0..d {
                for nq in 0..d {
                    out[base + offset(np, nq)] = evolved[np * d + nq];
                }
            }
        }
    }
    out
}

/// `<a_j^dag a_k>` and `<a_j a_k>` over all four modes.
pub fn measure_moments(state: &FockState) -> MomentSet {
    let psi = &state.amplitudes;
    let lowered: Vec<Vec<C64>> = ModeId::ALL
        .iter()
        .map(|&m| state.apply_ladder(Ladder::Lower(m), psi))
        .collect();
    let inner = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let mut normal = Array2::<C64>::zeros((4, 4));
    let mut anomalous = Array2::<C64>::zeros((4, 4));
    for (j, &mj) in ModeId::ALL.iter().enumerate() {
        for k in 0..4 {
            normal[[j, k]] = inner(&lowered[j], &lowered[k]);
            let twice = state.apply_ladder(Ladder::Lower(mj), &lowered[k]);
            anomalous[[j, k]] = inner(psi, &twice);
        }
    }
    MomentSet::from_matrices(&state.layout, normal, anomalous)
}

/// The three elements in the order they act on the state: first
/// downconverter, idler beam splitter, second downconverter.
pub fn wzm_generators(config: &ExperimentConfig) -> Result<[GeneratorSpec; 3]> {
    Ok([
        GeneratorSpec::squeezer(ModeId::S1, ModeId::I1, config.chi())?,
        GeneratorSpec::beam_splitter(ModeId::I1, ModeId::I2, config.t())?,
        GeneratorSpec::squeezer(ModeId::S2, ModeId::I2, config.chi())?,
    ])
}

/// Final state of the chain plus the largest per-element norm drift.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: FockState,
    pub max_norm_drift: f64,
}

pub fn evolve_wzm(config: &ExperimentConfig, cutoff: usize, propagator: Propagator) -> Result<Evolution> {
    let mut state = FockState::vacuum(cutoff)?;
    let mut max_norm_drift = 0.0f64;
    for gen in wzm_generators(config)? {
        let next = apply_element_with(&state, &gen, propagator);
        max_norm_drift = max_norm_drift.max((next.norm_sqr() - state.norm_sqr()).abs());
        state = next;
    }
    Ok(Evolution { state, max_norm_drift })
}
