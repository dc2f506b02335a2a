//! Independent grid-based oracle for the closed-form branch algebra.
//!
//! States are sampled on a uniform position grid and propagated spectrally:
//! forward transform, multiply by the exact free-particle dispersion phase
//! exp(-i hbar k^2 t / (2 m)), inverse transform. Free evolution is exact
//! for band-limited states, so any disagreement with `wavepacket` is a bug
//! in one of the two, not time-stepping error.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::constants::CONST;
use crate::error::{Error, Result};
use crate::wavepacket::PureComponent;

/// Minimum number of grid samples.
pub const MIN_POINTS: usize = 256;
/// Maximum tolerated edge amplitude relative to the peak.
pub const BOUNDARY_LEAK: f64 = 1e-8;
/// Sigma multiple that must stay inside the grid after propagation.
const SUPPORT_SIGMAS: f64 = 6.0;

/// Requested grid geometry.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::invalid_field(
                "grid.x_max",
                "must exceed x_min",
                x_max,
            ));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::invalid_field(
                "grid.n",
                format!("must be a power of two >= {MIN_POINTS}"),
                n,
            ));
        }
        Ok(GridSpec { x_min, x_max, n })
    }

    /// Grid centered on 0 spanning +-half_width.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        GridSpec::new(-half_width, half_width, n)
    }
}

/// Wavefunction samples on a uniform grid (units m^-1/2).
#[derive(Debug, Clone)]
pub struct GridState {
    x_min: f64,
    dx: f64,
    psi: Vec<Complex64>,
}

impl GridState {
    /// Wrap raw samples; callers are responsible for normalization.
    pub fn from_samples(spec: GridSpec, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != spec.n {
            return Err(Error::invalid_field(
                "grid.psi",
                format!("expected {} samples", spec.n),
                psi.len(),
            ));
        }
        Ok(GridState {
            x_min: spec.x_min,
            dx: (spec.x_max - spec.x_min) / spec.n as f64,
            psi,
        })
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.x(j)).collect()
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn psi_mut(&mut self) -> &mut [Complex64] {
        &mut self.psi
    }

    /// Sum |psi|^2 dx.
    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Position probability density samples.
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Rescale to unit norm.
    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            for c in &mut self.psi {
                *c *= s;
            }
        }
    }

    fn check_boundary_leak(&self) -> Result<()> {
        let peak = self.psi.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let edge = self.psi[0].norm().max(self.psi[self.n() - 1].norm());
        if edge > BOUNDARY_LEAK * peak {
            let (mean, std, _) = self.position_moments();
            return Err(Error::GridTooNarrow {
                x_min: self.x_min,
                x_max: self.x(self.n() - 1),
                required: mean.abs() + 8.0 * std,
                reason: format!(
                    "edge amplitude {:e} of peak exceeds {:e}",
                    edge / peak,
                    BOUNDARY_LEAK
                ),
            });
        }
        Ok(())
    }

    /// Mean, standard deviation and total weight of |psi|^2.
    pub fn position_moments(&self) -> (f64, f64, f64) {
        let mut w = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (j, c) in self.psi.iter().enumerate() {
            let p = c.norm_sqr();
            let x = self.x(j);
            w += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / w;
        let var = (m2 / w - mean * mean).max(0.0);
        (mean, var.sqrt(), w * self.dx)
    }

    /// FFT-ordered wavenumbers, rad/m.
    pub fn k_grid(&self) -> Vec<f64> {
        let n = self.n();
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * self.dx);
        (0..n)
            .map(|j| {
                if j < n / 2 {
                    j as f64 * dk
                } else {
                    (j as f64 - n as f64) * dk
                }
            })
            .collect()
    }

    fn fft(&self, forward: bool) -> Vec<Complex64> {
        let mut planner = FftPlanner::new();
        let fft = if forward {
            planner.plan_fft_forward(self.n())
        } else {
            planner.plan_fft_inverse(self.n())
        };
        let mut buf = self.psi.clone();
        fft.process(&mut buf);
        buf
    }

    /// Momentum-space density |psi~(k)|^2 in FFT order, normalized to sum 1.
    pub fn momentum_density(&self) -> Vec<f64> {
        let spec = self.fft(true);
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        spec.iter().map(|c| c.norm_sqr() / total).collect()
    }

    /// Two-column CSV (x, |psi|^2) for plotting.
    pub fn to_density_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (j, c) in self.psi.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.x(j), c.norm_sqr()));
        }
        out
    }
}

/// Sample a pure component of a branch ensemble onto a grid and normalize.
pub fn sample(component: &PureComponent, spec: GridSpec) -> Result<GridState> {
    let mut st = GridState::from_samples(spec, vec![Complex64::new(0.0, 0.0); spec.n])?;
    for j in 0..spec.n {
        let x = st.x(j);
        st.psi[j] = component.value(x);
    }
    if st.norm_sqr() <= 0.0 {
        return Err(Error::invalid_field(
            "grid.psi",
            "sampled state has zero norm",
            0.0,
        ));
    }
    st.check_boundary_leak()?;
    st.normalize();
    Ok(st)
}

/// Exact spectral free propagation by time `t`.
///
/// Rejects the call up front if the first and second moments of the evolved
/// state predict support outside the grid (wrap-around), using the exact
/// free-evolution relations for any state:
/// `<x>(t) = <x> + hbar <k> t / m`,
/// `var_x(t) = var_x + 2 (hbar t / m) cov_sym(x, k) + (hbar t / m)^2 var_k`.
pub fn propagate(state: &GridState, mass: f64, t: f64) -> Result<GridState> {
    if !(t >= 0.0) {
        return Err(Error::invalid_field("t", "must be non-negative", t));
    }
    if !(mass > 0.0) {
        return Err(Error::invalid_field("mass", "must be positive", mass));
    }
    let n = state.n();
    let ks = state.k_grid();
    let mut spec = state.fft(true);

    // momentum moments from the spectrum
    let mut w = 0.0;
    let mut k1 = 0.0;
    let mut k2 = 0.0;
    for (c, &k) in spec.iter().zip(&ks) {
        let p = c.norm_sqr();
        w += p;
        k1 += p * k;
        k2 += p * k * k;
    }
    let k_mean = k1 / w;
    let k_var = (k2 / w - k_mean * k_mean).max(0.0);

    // symmetrized covariance via phi = F^-1[k psi~]
    let (x_mean, x_std, _) = state.position_moments();
    let mut kspec = spec.clone();
    for (c, &k) in kspec.iter_mut().zip(&ks) {
        *c *= k;
    }
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut kspec);
    let inv_n = 1.0 / n as f64;
    let mut xk = 0.0;
    let mut norm = 0.0;
    for (j, (p, q)) in state.psi.iter().zip(&kspec).enumerate() {
        let x = state.x(j);
        xk += (p.conj() * q * inv_n).re * x;
        norm += p.norm_sqr();
    }
    let cov = xk / norm - x_mean * k_mean;

    let drift = CONST.hbar * t / mass;
    let x_mean_t = x_mean + drift * k_mean;
    let var_t = x_std * x_std + 2.0 * drift * cov + drift * drift * k_var;
    let spread_t = var_t.max(0.0).sqrt();
    let lo = x_mean_t - SUPPORT_SIGMAS * spread_t;
    let hi = x_mean_t + SUPPORT_SIGMAS * spread_t;
    let x_max = state.x(n - 1);
    if lo < state.x_min || hi > x_max {
        return Err(Error::GridTooNarrow {
            x_min: state.x_min,
            x_max,
            required: (x_mean_t.abs() + SUPPORT_SIGMAS * spread_t).max(x_mean_t.abs()),
            reason: format!(
                "predicted support [{lo:e}, {hi:e}] after t = {t:e} s would wrap around"
            ),
        });
    }

    // dispersion phase in k-space, then back
    let phase_scale = CONST.hbar * t / (2.0 * mass);
    for (c, &k) in spec.iter_mut().zip(&ks) {
        *c *= Complex64::from_polar(1.0, -phase_scale * k * k);
    }
    ifft.process(&mut spec);
    for c in &mut spec {
        *c *= inv_n;
    }
    Ok(GridState {
        x_min: state.x_min,
        dx: state.dx,
        psi: spec,
    })
}

/// Relative L2 distance between two states on identical grids.
pub fn l2_distance(a: &GridState, b: &GridState) -> f64 {
    assert_eq!(a.n(), b.n(), "grids must match");
    let num: f64 = a
        .psi
        .iter()
        .zip(&b.psi)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let den: f64 = a.psi.iter().map(|c| c.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Grid wide enough to hold `component` evolved to time `t` (closed form).
///
/// Two requirements drive the width: edge amplitudes must stay below the
/// boundary-leak threshold (centers + `margin` branch widths, margin >= 9),
/// and the wrap-around pre-check in `propagate` must see the whole-state
/// 6-sigma support inside the grid, where the whole-state spread includes
/// the branch separation, not just individual widths.
pub fn spec_for_evolution(
    component: &PureComponent,
    t: f64,
    mass: f64,
    n: usize,
    margin: f64,
) -> Result<GridSpec> {
    let mut hw: f64 = 0.0;
    for b in &component.branches {
        let e = b.evolved(t, mass);
        for s in [b, &e] {
            let c = s.center.abs();
            let w = s.position_std();
            hw = hw.max(c + margin * w).max(6.5 * (c + w));
        }
    }
    GridSpec::centered(hw, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::{free_evolve, ground_state, BranchEnsemble, GaussianBranch};
    use approx::assert_relative_eq;

    const M: f64 = 1e-17;
    const OMEGA: f64 = 63_000.0;

    fn two_slit(sep: f64, sigma: f64) -> BranchEnsemble {
        let a = GaussianBranch::from_std(-sep / 2.0, 0.0, sigma, Complex64::new(1.0, 0.0)).unwrap();
        let b = GaussianBranch::from_std(sep / 2.0, 0.0, sigma, Complex64::new(1.0, 0.0)).unwrap();
        BranchEnsemble::pure(vec![a, b]).unwrap()
    }

    #[test]
    fn sample_ground_state_normalized() {
        let gs = ground_state(M, OMEGA).unwrap();
        let st = BranchEnsemble::pure(vec![gs]).unwrap();
        let spec = GridSpec::centered(12.0 * gs.position_std(), 1024).unwrap();
        let g = sample(&st.components()[0], spec).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn symmetric_branches_mirror_symmetric() {
        let st = two_slit(100e-9, 10e-9);
        let spec = GridSpec::centered(300e-9, 2048).unwrap();
        let g = sample(&st.components()[0], spec).unwrap();
        let d = g.density();
        let n = g.n();
        let peak = d.iter().cloned().fold(0.0, f64::max);
        for j in 1..n {
            let asym = (d[j] - d[n - j]).abs() / peak;
            assert!(asym < 1e-12, "asymmetry {asym} at {j}");
        }
    }

    #[test]
    fn grid_refinement_stable() {
        let st = two_slit(100e-9, 10e-9);
        let c = &st.components()[0];
        let g1 = sample(c, GridSpec::centered(300e-9, 2048).unwrap()).unwrap();
        let g2 = sample(c, GridSpec::centered(300e-9, 4096).unwrap()).unwrap();
        // norm before normalization: resample and compare raw sums
        let raw1: f64 = g1.xs().iter().map(|&x| c.value(x).norm_sqr()).sum::<f64>() * g1.dx();
        let raw2: f64 = g2.xs().iter().map(|&x| c.value(x).norm_sqr()).sum::<f64>() * g2.dx();
        assert!((raw1 - raw2).abs() < 1e-9);
    }

    #[test]
    fn boundary_leak_rejected() {
        let gs = ground_state(M, OMEGA).unwrap();
        let st = BranchEnsemble::pure(vec![gs]).unwrap();
        let spec = GridSpec::centered(1.5 * gs.position_std(), 256).unwrap();
        let e = sample(&st.components()[0], spec);
        assert!(matches!(e, Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn propagate_zero_time_identity() {
        let st = two_slit(80e-9, 12e-9);
        let g = sample(&st.components()[0], GridSpec::centered(300e-9, 1024).unwrap()).unwrap();
        let p = propagate(&g, M, 0.0).unwrap();
        assert!(l2_distance(&g, &p) < 1e-12);
    }

    #[test]
    fn closed_form_and_spectral_agree() {
        let t = 50.0;
        let st = two_slit(100e-9, 10e-9);
        let c = &st.components()[0];
        let spec = spec_for_evolution(c, t, M, 1 << 14, 10.0).unwrap();
        let g0 = sample(c, spec).unwrap();
        let gt = propagate(&g0, M, t).unwrap();
        let evolved = free_evolve(&st, t, M).unwrap();
        let ge = sample(&evolved.components()[0], spec).unwrap();
        let d = l2_distance(&gt, &ge);
        assert!(d < 1e-8, "L2 distance {d}");
    }

    #[test]
    fn momentum_density_invariant() {
        let st = two_slit(100e-9, 10e-9);
        let c = &st.components()[0];
        let spec = spec_for_evolution(c, 20.0, M, 1 << 13, 10.0).unwrap();
        let g0 = sample(c, spec).unwrap();
        let gt = propagate(&g0, M, 20.0).unwrap();
        let p0 = g0.momentum_density();
        let pt = gt.momentum_density();
        let max_diff = p0
            .iter()
            .zip(&pt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-9, "momentum density drift {max_diff}");
    }

    #[test]
    fn unitarity_and_composition() {
        let st = two_slit(60e-9, 8e-9);
        let c = &st.components()[0];
        let t = 30.0;
        let spec = spec_for_evolution(c, t, M, 1 << 13, 10.0).unwrap();
        let g0 = sample(c, spec).unwrap();
        let full = propagate(&g0, M, t).unwrap();
        assert!((full.norm_sqr() - 1.0).abs() < 1e-9);
        let half = propagate(&propagate(&g0, M, t / 2.0).unwrap(), M, t / 2.0).unwrap();
        assert!(l2_distance(&full, &half) < 1e-10);
    }

    #[test]
    fn wraparound_rejected_before_compute() {
        let gs = ground_state(M, OMEGA).unwrap();
        let st = BranchEnsemble::pure(vec![gs]).unwrap();
        // grid fits the initial state but not 100 s of dispersion
        let spec = GridSpec::centered(20.0 * gs.position_std(), 1024).unwrap();
        let g0 = sample(&st.components()[0], spec).unwrap();
        let e = propagate(&g0, M, 100.0);
        assert!(matches!(e, Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn density_csv_round_numbers() {
        let st = two_slit(80e-9, 10e-9);
        let g = sample(&st.components()[0], GridSpec::centered(250e-9, 256).unwrap()).unwrap();
        let csv = g.to_density_csv();
        assert!(csv.starts_with("x,density\n"));
        assert_eq!(csv.lines().count(), 257);
    }

    #[test]
    fn spec_invariant_rejections() {
        assert!(GridSpec::new(0.0, 1.0, 100).is_err()); // not power of two / too small
        assert!(GridSpec::new(1.0, 0.0, 512).is_err());
    }

    #[test]
    fn moments_match_closed_form() {
        let gs = ground_state(M, OMEGA).unwrap();
        let st = BranchEnsemble::pure(vec![gs]).unwrap();
        let spec = GridSpec::centered(12.0 * gs.position_std(), 2048).unwrap();
        let g = sample(&st.components()[0], spec).unwrap();
        let (mean, std, w) = g.position_moments();
        assert!(mean.abs() < 1e-15);
        assert_relative_eq!(std, gs.position_std(), max_relative = 1e-6);
        assert_relative_eq!(w, 1.0, max_relative = 1e-9);
    }
}
