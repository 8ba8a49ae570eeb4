//! The two-downconverter interferometer: chain assembly, first-order
//! coherence of the two output signals, and the final fringe scan.

use std::f64::consts::TAU;

use crate::bogoliubov::{compose, reflection_amplitude, BogoliubovTransform};
use crate::error::{Error, Result};
use crate::modes::{ModeId, ModeLayout};
use crate::moments::MomentSet;
use crate::C64;

/// Largest `|g1 - t|` over a curve for it to count as linear in `t`.
pub const LINEAR_REGIME_THRESHOLD: f64 = 1e-2;
/// Largest `1 - g1` over `t >= SATURATION_MIN_T` for a saturated curve.
pub const SATURATION_THRESHOLD: f64 = 1e-2;
pub const SATURATION_MIN_T: f64 = 0.1;

/// Squeezing strength `chi` of both crystals and idler transmission `t`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    chi: f64,
    t: f64,
    r: f64,
}

impl ExperimentConfig {
    pub fn new(chi: f64, t: f64) -> Result<Self> {
        if !(chi.is_finite() && chi >= 0.0) {
            return Err(Error::InvalidArgument(format!("chi must be finite and non-negative, got {chi}")));
        }
        let r = reflection_amplitude(t)?;
        Ok(ExperimentConfig { chi, t, r })
    }

    /// Configuration whose first idler carries `nbar1 = sinh^2 chi` photons.
    pub fn from_nbar(nbar1: f64, t: f64) -> Result<Self> {
        if !(nbar1.is_finite() && nbar1 >= 0.0) {
            return Err(Error::InvalidArgument(format!("nbar1 must be finite and non-negative, got {nbar1}")));
        }
        Self::new(nbar1.sqrt().asinh(), t)
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Mean photon number of the first idler before the beam splitter.
    pub fn nbar1(&self) -> f64 {
        self.chi.sinh().powi(2)
    }
}

/// First downconverter, then the idler beam splitter, then the second
/// downconverter.
pub fn build_chain(config: &ExperimentConfig) -> Result<BogoliubovTransform> {
    let layout = ModeLayout::standard();
    let dc1 = BogoliubovTransform::two_mode_squeezer(&layout, ModeId::S1, ModeId::I1, config.chi)?;
    let bs = BogoliubovTransform::beam_splitter(&layout, ModeId::I1, ModeId::I2, config.t)?;
    let dc2 = BogoliubovTransform::two_mode_squeezer(&layout, ModeId::S2, ModeId::I2, config.chi)?;
    compose(&compose(&dc2, &bs)?, &dc1)
}

pub fn moments_closed_form(config: &ExperimentConfig) -> MomentSet {
    let (c, s) = (config.chi.cosh(), config.chi.sinh());
    let s2 = s * s;
    let (t, r) = (config.t, config.r);
    MomentSet::new(s2, s2 * (r * r + t * t * c * c), C64::from(s2 * t * c))
}

/// `|<a1^dag a2>| / sqrt(<a1^dag a1> <a2^dag a2>)`.
pub fn g1_from_moments(m: &MomentSet) -> Result<f64> {
    if !(m.n_s1 > 0.0 && m.n_s2 > 0.0) {
        return Err(Error::UndefinedCoherence(format!(
            "signal intensities n_s1 = {}, n_s2 = {} leave g1 as 0/0",
            m.n_s1, m.n_s2
        )));
    }
    Ok(m.cross.norm() / (m.n_s1 * m.n_s2).sqrt())
}

/// `t cosh chi / sqrt(1 + t^2 sinh^2 chi)`; continuous at `chi = 0`, where it
/// equals `t`.
pub fn g1_closed_form(chi: f64, t: f64) -> f64 {
    let s = chi.sinh();
    t * chi.cosh() / (1.0 + t * t * s * s).sqrt()
}

/// `t sqrt((1 + nbar1) / (1 + t^2 nbar1))`.
pub fn g1_nbar_form(nbar1: f64, t: f64) -> f64 {
    t * ((1.0 + nbar1) / (1.0 + t * t * nbar1)).sqrt()
}

/// `count` equally spaced phases covering one full period.
pub fn uniform_phase_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| TAU * k as f64 / count as f64).collect()
}

/// Intensities at both outputs of the final 50/50 beam splitter as the path
/// difference is scanned.
#[derive(Clone, Debug, PartialEq)]
pub struct FringeScanResult {
    pub phases: Vec<f64>,
    pub i_plus: Vec<f64>,
    pub i_minus: Vec<f64>,
    /// `(I_max - I_min) / (I_max + I_min)` of the sinusoid fitted to `i_plus`.
    pub visibility: f64,
    /// The same ratio from the sampled extremes only.
    pub sampled_visibility: f64,
    /// `arg <a'_s1^dag a'_s2>`: the fringe maximum sits at `phi = -phase_offset`.
    pub phase_offset: f64,
    pub balanced: bool,
    /// Amplitude factor applied to the brighter signal (1 when unbalanced).
    pub attenuation: f64,
    pub attenuated_arm: Option<ModeId>,
    pub g1: f64,
}

/// Combines the two output signals on a lossless 50/50 beam splitter after
/// delaying signal 2 by phase `phi`:
///
/// `I_pm(phi) = (n_s1 + n_s2)/2 +- |cross| cos(phi + arg cross)`.
///
/// With `balance`, the brighter signal is first attenuated by the amplitude
/// factor `sqrt(n_min / n_max)` (a beam splitter admitting vacuum), which
/// equalizes the intensities and lets the visibility reach `g1`.
pub fn fringe_scan(config: &ExperimentConfig, phases: &[f64], balance: bool) -> Result<FringeScanResult> {
    if config.chi == 0.0 {
        return Err(Error::UndefinedCoherence(
            "no photons are produced at chi = 0, so there is no fringe".into(),
        ));
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("fringe phases must be finite".into()));
    }
    let moments = build_chain(config)?.vacuum_moments();
    let g1 = g1_from_moments(&moments)?;

    let (mut n1, mut n2, mut cross) = (moments.n_s1, moments.n_s2, moments.cross);
    let (mut attenuation, mut attenuated_arm) = (1.0, None);
    if balance && n1 != n2 {
        let (n_min, n_max) = (n1.min(n2), n1.max(n2));
        attenuation = (n_min / n_max).sqrt();
        cross *= attenuation;
        if n1 > n2 {
            n1 = n_min;
            attenuated_arm = Some(ModeId::S1);
        } else {
            n2 = n_min;
            attenuated_arm = Some(ModeId::S2);
        }
    }

    let mean = 0.5 * (n1 + n2);
    let fringe = |phi: f64| (C64::from_polar(1.0, phi) * cross).re;
    let i_plus: Vec<f64> = phases.iter().map(|&p| mean + fringe(p)).collect();
    let i_minus: Vec<f64> = phases.iter().map(|&p| mean - fringe(p)).collect();

    let (offset, amplitude) = fit_sinusoid(phases, &i_plus)?;
    let (max, min) = i_plus
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &x| (hi.max(x), lo.min(x)));

    Ok(FringeScanResult {
        phases: phases.to_vec(),
        i_plus,
        i_minus,
        visibility: amplitude / offset,
        sampled_visibility: (max - min) / (max + min),
        phase_offset: cross.arg(),
        balanced: balance,
        attenuation,
        attenuated_arm,
        g1,
    })
}

/// Least-squares fit of `y = m + alpha cos phi + beta sin phi`; returns
/// `(m, sqrt(alpha^2 + beta^2))`.
fn fit_sinusoid(phases: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let basis = |p: f64| [1.0, p.cos(), p.sin()];
    let mut normal = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&p, &v) in phases.iter().zip(y) {
        let b = basis(p);
        for i in 0..3 {
            rhs[i] += b[i] * v;
            for j in 0..3 {
                normal[i][j] += b[i] * b[j];
            }
        }
    }
    let [m, alpha, beta] = solve3(normal, rhs).ok_or_else(|| {
        Error::InvalidArgument("phase grid needs at least three distinct phases modulo 2 pi".into())
    })?;
    Ok((m, alpha.hypot(beta)))
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    pub nbar1: f64,
    pub t: f64,
    pub g1: f64,
    pub deviation_from_t: f64,
    pub deviation_from_one: f64,
}

/// Regime classification of one `nbar1` curve.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitCurve {
    pub nbar1: f64,
    pub max_deviation_from_t: f64,
    /// Largest `1 - g1` over grid points with `t >= SATURATION_MIN_T`.
    pub max_deficit_above_min_t: f64,
    pub linear: bool,
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    pub curves: Vec<LimitCurve>,
}

/// Tabulates `g1` against the single-photon (`g1 = t`) and many-photon
/// (`g1 = 1`) limits for every `(nbar1, t)` pair.
pub fn limit_report(t_grid: &[f64], nbar_list: &[f64]) -> Result<LimitReport> {
    if t_grid.is_empty() || nbar_list.is_empty() {
        return Err(Error::InvalidArgument("limit report needs non-empty t and nbar1 grids".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    if let Some(n) = nbar_list.iter().find(|n| !(n.is_finite() && **n >= 0.0)) {
        return Err(Error::InvalidArgument(format!("nbar1 = {n} must be finite and non-negative")));
    }
    let mut rows = Vec::with_capacity(t_grid.len() * nbar_list.len());
    let mut curves = Vec::with_capacity(nbar_list.len());
    for &nbar1 in nbar_list {
        let start = rows.len();
        rows.extend(t_grid.iter().map(|&t| {
            let g1 = g1_nbar_form(nbar1, t);
            LimitRow {
                nbar1,
                t,
                g1,
                deviation_from_t: (g1 - t).abs(),
                deviation_from_one: 1.0 - g1,
            }
        }));
        let curve = &rows[start..];
        let max_deviation_from_t = curve.iter().map(|r| r.deviation_from_t).fold(0.0, f64::max);
        let max_deficit_above_min_t = curve
            .iter()
            .filter(|r| r.t >= SATURATION_MIN_T)
            .map(|r| r.deviation_from_one)
            .fold(0.0, f64::max);
        curves.push(LimitCurve {
            nbar1,
            max_deviation_from_t,
            max_deficit_above_min_t,
            linear: max_deviation_from_t <= LINEAR_REGIME_THRESHOLD,
            saturated: max_deficit_above_min_t <= SATURATION_THRESHOLD,
        });
    }
    Ok(LimitReport { rows, curves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::Ladder;

    const TOL: f64 = 1e-12;
    /// chi with sinh chi = 1
    fn unit_chi() -> f64 {
        1f64.asinh()
    }

    #[test]
    fn config_validation_and_derived_values() {
        let cfg = ExperimentConfig::new(0.5, 0.6).unwrap();
        assert!((cfg.r() - 0.8).abs() < 1e-15);
        assert!((cfg.t().powi(2) + cfg.r().powi(2) - 1.0).abs() < 1e-15);
        assert!((cfg.nbar1() - 0.5f64.sinh().powi(2)).abs() < 1e-15);
        assert_eq!(ExperimentConfig::new(0.2, 1.0).unwrap().r(), 0.0);
        assert!(ExperimentConfig::new(-0.1, 0.5).is_err());
        assert!(ExperimentConfig::new(0.1, 1.1).is_err());
        assert!(ExperimentConfig::from_nbar(-1.0, 0.5).is_err());
        let back = ExperimentConfig::from_nbar(10.0, 0.3).unwrap();
        assert!((back.nbar1() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn chain_without_transmission_decouples_signals() {
        let tr = build_chain(&ExperimentConfig::new(0.7, 0.0).unwrap()).unwrap();
        assert_eq!(tr.coefficient(ModeId::S2, Ladder::Raise(ModeId::I1)), C64::from(0.0));
        assert_eq!(tr.coefficient(ModeId::S2, Ladder::Lower(ModeId::S1)), C64::from(0.0));
    }

    #[test]
    fn chain_with_full_transmission_drops_second_idler() {
        let tr = build_chain(&ExperimentConfig::new(0.7, 1.0).unwrap()).unwrap();
        assert_eq!(tr.coefficient(ModeId::S2, Ladder::Raise(ModeId::I2)).norm(), 0.0);
    }

    #[test]
    fn first_signal_independent_of_transmission() {
        let chi = 0.9;
        let reference = build_chain(&ExperimentConfig::new(chi, 0.0).unwrap()).unwrap();
        for t in [0.2, 0.5, 1.0] {
            let tr = build_chain(&ExperimentConfig::new(chi, t).unwrap()).unwrap();
            for k in ModeId::ALL {
                for term in [Ladder::Lower(k), Ladder::Raise(k)] {
                    let d = tr.coefficient(ModeId::S1, term) - reference.coefficient(ModeId::S1, term);
                    assert!(d.norm() < TOL);
                }
            }
        }
        let tr = build_chain(&ExperimentConfig::new(chi, 0.4).unwrap()).unwrap();
        assert!((tr.coefficient(ModeId::S1, Ladder::Lower(ModeId::S1)) - C64::from(chi.cosh())).norm() < TOL);
        assert!((tr.coefficient(ModeId::S1, Ladder::Raise(ModeId::I1)) - C64::new(0.0, -chi.sinh())).norm() < TOL);
    }

    #[test]
    fn closed_form_moments() {
        assert!(moments_closed_form(&ExperimentConfig::new(0.0, 0.4).unwrap()).is_zero());

        let m = moments_closed_form(&ExperimentConfig::new(0.8, 0.0).unwrap());
        assert_eq!(m.n_s1, m.n_s2);
        assert_eq!(m.cross.norm(), 0.0);

        // sinh chi = 1 forces cosh^2 chi = 2
        let m = moments_closed_form(&ExperimentConfig::new(unit_chi(), 0.5).unwrap());
        assert!((m.n_s1 - 1.0).abs() < TOL);
        assert!((m.n_s2 - 1.25).abs() < TOL);
        assert!((m.cross.norm() - 0.5 * 2f64.sqrt()).abs() < TOL);
    }

    #[test]
    fn g1_routes_at_unit_photon_number() {
        let expected = 0.5 * (2.0f64 / 1.25).sqrt();
        assert!((expected - 0.632_455_532_033_675_9).abs() < 1e-15);
        let m = moments_closed_form(&ExperimentConfig::new(unit_chi(), 0.5).unwrap());
        assert!((g1_from_moments(&m).unwrap() - expected).abs() < TOL);
        assert!((g1_closed_form(unit_chi(), 0.5) - expected).abs() < TOL);
        assert!((g1_nbar_form(1.0, 0.5) - expected).abs() < TOL);
    }

    #[test]
    fn g1_edge_values() {
        assert_eq!(g1_from_moments(&MomentSet::new(2.0, 3.0, C64::from(0.0))).unwrap(), 0.0);
        assert!((g1_from_moments(&MomentSet::new(1.5, 1.5, C64::new(0.0, 1.5))).unwrap() - 1.0).abs() < TOL);
        for chi in [0.0, 0.3, 2.0] {
            assert_eq!(g1_closed_form(chi, 0.0), 0.0);
            assert!((g1_closed_form(chi, 1.0) - 1.0).abs() < TOL);
        }
        assert!((g1_nbar_form(1e4, 0.1) - 0.1 * (10001.0f64 / 101.0).sqrt()).abs() < TOL);
        assert!((g1_nbar_form(1e4, 0.1) - 0.995_086_940_825_765).abs() < 1e-12);
    }

    #[test]
    fn g1_undefined_without_photons() {
        let m = moments_closed_form(&ExperimentConfig::new(0.0, 0.5).unwrap());
        assert!(matches!(g1_from_moments(&m), Err(Error::UndefinedCoherence(_))));
        // the closed forms continue to t instead
        assert_eq!(g1_closed_form(0.0, 0.5), 0.5);
        assert_eq!(g1_nbar_form(0.0, 0.5), 0.5);
    }

    #[test]
    fn weak_pumping_tends_to_t() {
        for t in [0.1, 0.5, 0.9] {
            assert!((g1_nbar_form(1e-9, t) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn fringe_without_transmission_is_flat() {
        let cfg = ExperimentConfig::new(0.5, 0.0).unwrap();
        let scan = fringe_scan(&cfg, &uniform_phase_grid(16), true).unwrap();
        assert!(scan.visibility.abs() < 1e-15);
        assert!(scan.i_plus.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-15));
    }

    #[test]
    fn fringe_full_transmission_balanced_is_perfect() {
        for chi in [0.1, 0.8, 2.0] {
            let cfg = ExperimentConfig::new(chi, 1.0).unwrap();
            let scan = fringe_scan(&cfg, &uniform_phase_grid(32), true).unwrap();
            assert!((scan.visibility - 1.0).abs() < 1e-9, "chi {chi}: {}", scan.visibility);
            assert_eq!(scan.attenuated_arm, Some(ModeId::S2));
        }
    }

    #[test]
    fn fringe_unit_photon_number() {
        let cfg = ExperimentConfig::new(unit_chi(), 0.5).unwrap();
        let grid = uniform_phase_grid(64);
        let balanced = fringe_scan(&cfg, &grid, true).unwrap();
        let raw = fringe_scan(&cfg, &grid, false).unwrap();
        let g1 = 0.632_455_532_033_675_9;
        assert!((balanced.visibility - g1).abs() < 1e-9);
        // 2 |cross| / (n_s1 + n_s2) = sqrt(2) / 2.25
        assert!((raw.visibility - 2f64.sqrt() / 2.25).abs() < 1e-9);
        assert!(raw.visibility < g1);
        assert_eq!(raw.attenuation, 1.0);
        assert!((balanced.attenuation - (1.0f64 / 1.25).sqrt()).abs() < 1e-12);
        // cross is real and positive in this sign convention
        assert!(balanced.phase_offset.abs() < 1e-12);
        assert!((balanced.sampled_visibility - g1).abs() < 1e-9);
    }

    #[test]
    fn fringe_conserves_total_intensity() {
        let cfg = ExperimentConfig::new(1.3, 0.35).unwrap();
        let scan = fringe_scan(&cfg, &uniform_phase_grid(50), false).unwrap();
        let totals: Vec<f64> = scan.i_plus.iter().zip(&scan.i_minus).map(|(a, b)| a + b).collect();
        assert!(totals.iter().all(|x| (x - totals[0]).abs() < 1e-10 * totals[0].max(1.0)));
        assert!(scan.i_plus.iter().chain(&scan.i_minus).all(|&x| x >= 0.0));
    }

    #[test]
    fn fringe_rejects_degenerate_input() {
        let grid = uniform_phase_grid(8);
        assert!(matches!(
            fringe_scan(&ExperimentConfig::new(0.0, 0.5).unwrap(), &grid, true),
            Err(Error::UndefinedCoherence(_))
        ));
        let cfg = ExperimentConfig::new(0.5, 0.5).unwrap();
        assert!(fringe_scan(&cfg, &[0.0, TAU], true).is_err());
        assert!(fringe_scan(&cfg, &[0.0, f64::NAN, 1.0], true).is_err());
    }

    #[test]
    fn limit_report_regimes() {
        let t_grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let report = limit_report(&t_grid, &[1e-4, 1.0, 1e4]).unwrap();
        assert_eq!(report.rows.len(), 303);
        let [weak, unit, strong] = [&report.curves[0], &report.curves[1], &report.curves[2]];
        assert!(weak.max_deviation_from_t <= 5e-5);
        assert!(weak.linear && !weak.saturated);
        assert!(!unit.linear && !unit.saturated);
        assert!(strong.saturated && !strong.linear);
        let half = report.rows.iter().find(|r| r.nbar1 == 1e4 && r.t == 0.5).unwrap();
        assert!(half.deviation_from_one < 1e-3);
        assert!(report.rows.iter().filter(|r| r.t == 0.0).all(|r| r.g1 == 0.0));
    }

    #[test]
    fn limit_report_rejects_bad_grids() {
        assert!(limit_report(&[], &[1.0]).is_err());
        assert!(limit_report(&[0.5], &[]).is_err());
        assert!(limit_report(&[1.5], &[1.0]).is_err());
        assert!(limit_report(&[0.5], &[-1.0]).is_err());
    }
}
