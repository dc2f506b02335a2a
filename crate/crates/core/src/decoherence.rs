//! Standard environmental decoherence: blackbody scattering / absorption /
//! emission localization parameters in the long-wavelength limit, gas
//! collision event rates, the internal-temperature power balance, and the
//! visibility-decay integrator.
//!
//! Off-diagonal density-matrix elements at separation s decay at rate
//! `min(Lambda s^2, gamma_sat)`: the quadratic long-wavelength form capped
//! by the total event rate once the environment resolves the separation.
//! Gas collisions are treated separately as binary run-killers (the
//! long-wavelength limit does not apply to heavy molecules); one collision
//! during a run destroys its coherence, so the run-survival probability
//! exp(-expected events) multiplies the predicted visibility.

use serde::Serialize;

use crate::constants::{CONST, HBAR_C};
use crate::error::{Error, Result};
use crate::numeric::{bisect, bose_integral, integrate};
use crate::types::{clausius_mossotti, thermal_wavelength, Environment, Particle, Trap};

/// Decoherence / collapse channel labels used in budgets and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BbScatter,
    BbAbsorb,
    BbEmit,
    Gas,
    Csl,
    Dp,
    K,
}

impl ChannelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ChannelKind::BbScatter => "bb_scatter",
            ChannelKind::BbAbsorb => "bb_absorb",
            ChannelKind::BbEmit => "bb_emit",
            ChannelKind::Gas => "gas",
            ChannelKind::Csl => "csl",
            ChannelKind::Dp => "dp",
            ChannelKind::K => "k",
        }
    }
}

/// A position-localization channel with saturation semantics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalizationChannel {
    pub kind: ChannelKind,
    /// Localization parameter, 1/(m^2 s).
    pub lambda: f64,
    /// Saturation event rate capping the exponent at large separations, 1/s.
    pub gamma_sat: f64,
    /// Long-wavelength validity scale: separations beyond this trigger a
    /// validity warning (thermal wavelength / 10 for blackbody channels).
    #[serde(skip)]
    pub validity_scale: Option<f64>,
}

impl LocalizationChannel {
    pub fn new(kind: ChannelKind, lambda: f64, gamma_sat: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::invalid_field(
                "channel.lambda",
                "must be non-negative",
                lambda,
            ));
        }
        if !(gamma_sat >= 0.0) {
            return Err(Error::invalid_field(
                "channel.gamma_sat",
                "must be non-negative",
                gamma_sat,
            ));
        }
        Ok(LocalizationChannel {
            kind,
            lambda,
            gamma_sat,
            validity_scale: None,
        })
    }

    /// Decoherence rate at branch separation `dx`, 1/s.
    pub fn rate_at(&self, dx: f64) -> f64 {
        (self.lambda * dx * dx).min(self.gamma_sat)
    }
}

/// Blackbody-photon scattering localization channel.
///
/// Lambda_sc = 8! zeta(9) (8 c R^6 / 9 pi) (k_B T / hbar c)^9 Re[CM]^2 in
/// the long-wavelength limit; the saturation rate is the total photon
/// scattering rate obtained by spectral quadrature.
pub fn bb_scatter(particle: &Particle, temp: f64) -> Result<LocalizationChannel> {
    if !(temp >= 0.0) {
        return Err(Error::invalid_field("temp", "must be non-negative", temp));
    }
    if temp == 0.0 {
        return LocalizationChannel::new(ChannelKind::BbScatter, 0.0, 0.0);
    }
    let r = particle.radius;
    let cm = clausius_mossotti(particle.eps_bb);
    let kth = CONST.k_b * temp / HBAR_C; // thermal wavenumber scale, 1/m
    let lambda = 40_320.0
        * crate::constants::ZETA_9
        * (8.0 * CONST.c * r.powi(6) / (9.0 * std::f64::consts::PI))
        * kth.powi(9)
        * cm.re
        * cm.re;
    // total scattering rate: c int n(k) sigma_sc(k) dk
    let gamma = 8.0 * CONST.c * r.powi(6) / (3.0 * std::f64::consts::PI)
        * cm.norm_sqr()
        * kth.powi(7)
        * bose_integral(6.0)?;
    let mut ch = LocalizationChannel::new(ChannelKind::BbScatter, lambda, gamma)?;
    ch.validity_scale = Some(thermal_wavelength(temp)? / 10.0);
    Ok(ch)
}

fn bb_absorb_like(kind: ChannelKind, particle: &Particle, temp: f64) -> Result<LocalizationChannel> {
    if !(temp >= 0.0) {
        return Err(Error::invalid_field("temp", "must be non-negative", temp));
    }
    if temp == 0.0 {
        return LocalizationChannel::new(kind, 0.0, 0.0);
    }
    let r = particle.radius;
    let cm_im = clausius_mossotti(particle.eps_bb).im;
    let kth = CONST.k_b * temp / HBAR_C;
    let lambda = 16.0 * std::f64::consts::PI.powi(5) * CONST.c * r.powi(3) / 189.0
        * kth.powi(6)
        * cm_im;
    // photon absorption/emission event rate: c int n(k) sigma_abs(k) dk
    let gamma = 4.0 * CONST.c * r.powi(3) / std::f64::consts::PI
        * cm_im
        * kth.powi(4)
        * bose_integral(3.0)?;
    let mut ch = LocalizationChannel::new(kind, lambda, gamma)?;
    ch.validity_scale = Some(thermal_wavelength(temp)? / 10.0);
    Ok(ch)
}

/// Blackbody absorption channel, driven by the environment temperature.
///
/// Lambda_abs = (16 pi^5 c R^3 / 189) (k_B T / hbar c)^6 Im[CM].
pub fn bb_absorb(particle: &Particle, temp: f64) -> Result<LocalizationChannel> {
    bb_absorb_like(ChannelKind::BbAbsorb, particle, temp)
}

/// Blackbody emission channel; same functional form with the particle's
/// internal temperature in place of the environment temperature.
pub fn bb_emit(particle: &Particle) -> Result<LocalizationChannel> {
    bb_absorb_like(ChannelKind::BbEmit, particle, particle.internal_temp)
}

/// Gas-collision statistics over one experimental run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GasCollisions {
    /// Collision rate n vbar pi R^2, 1/s.
    pub rate: f64,
    /// Expected collisions over the run.
    pub expected_events: f64,
    /// Run-survival probability exp(-expected_events).
    pub survival: f64,
}

/// Kinetic collision rate of gas molecules with the sphere and the expected
/// event count over `run_time`. Any collision is treated as fully
/// localizing.
pub fn gas_collisions(particle: &Particle, env: &Environment, run_time: f64) -> Result<GasCollisions> {
    if !(run_time >= 0.0) {
        return Err(Error::invalid_field(
            "run_time",
            "must be non-negative",
            run_time,
        ));
    }
    let number_density = env.pressure / (CONST.k_b * env.temp);
    let mean_speed = (8.0 * CONST.k_b * env.temp / (std::f64::consts::PI * env.gas_mass)).sqrt();
    let rate = number_density * mean_speed * particle.geometric_cross_section();
    let expected = rate * run_time;
    Ok(GasCollisions {
        rate,
        expected_events: expected,
        survival: (-expected).exp(),
    })
}

/// Internal-temperature equilibrium solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InternalTempEquilibrium {
    /// Equilibrium internal temperature, K.
    pub internal_temp: f64,
    /// Absorbed trap-light power, W.
    pub absorbed_power: f64,
    /// |P_abs - (P_em(T_i) - P_em(T_env))| at the solution, W.
    pub residual: f64,
    pub iterations: u32,
    pub bracket: (f64, f64),
}

/// Dipole absorption cross-section 4 pi (w/c) R^3 Im[CM], m^2.
fn dipole_absorption_cross_section(radius: f64, omega: f64, cm_im: f64) -> f64 {
    4.0 * std::f64::consts::PI * omega / CONST.c * radius.powi(3) * cm_im
}

/// Thermal emission power of the sphere at bulk temperature `temp`, W,
/// with the blackbody-band dipole cross-section.
pub fn emission_power(particle: &Particle, temp: f64) -> Result<f64> {
    if temp <= 0.0 {
        return Ok(0.0);
    }
    let cm_im = clausius_mossotti(particle.eps_bb).im;
    // int sigma_abs(w) (hbar w^3 / pi^2 c^2) / (exp(hbar w / kT) - 1) dw
    let scale = CONST.k_b * temp / CONST.hbar; // omega scale
    let pref = 4.0 * particle.radius.powi(3) * cm_im * CONST.hbar
        / (std::f64::consts::PI * CONST.c.powi(3));
    Ok(pref * scale.powi(5) * bose_integral(4.0)?)
}

/// Equilibrium internal temperature from the power balance
/// `P_abs = P_em(T_i) - P_em(T_env)` by bracketing and bisection.
///
/// `bulk_absorption` is the bulk intensity absorption coefficient of the
/// sphere material at the trap wavelength, 1/m. It is converted to
/// Im(eps) through the weak-absorption relation
/// Im(eps) = n_r * a * lambda / (2 pi), n_r = Re(sqrt(eps_trap)).
pub fn internal_temperature_equilibrium(
    particle: &Particle,
    trap: &Trap,
    bulk_absorption: f64,
) -> Result<InternalTempEquilibrium> {
    if !(bulk_absorption >= 0.0) {
        return Err(Error::invalid_field(
            "bulk_absorption",
            "must be non-negative",
            bulk_absorption,
        ));
    }
    // this op balances power against the environment the trap sits in; the
    // particle's configured internal_temp is the quantity being replaced
    let t_env = particle.internal_temp.max(0.0);
    let n_r = particle.eps_trap.sqrt().re;
    let im_eps = n_r * bulk_absorption * trap.wavelength / (2.0 * std::f64::consts::PI);
    let eps_eff = num_complex::Complex64::new(particle.eps_trap.re, im_eps);
    let omega_trap = 2.0 * std::f64::consts::PI * CONST.c / trap.wavelength;
    let sigma_abs =
        dipole_absorption_cross_section(particle.radius, omega_trap, clausius_mossotti(eps_eff).im);
    let p_abs = trap.intensity * sigma_abs;

    if p_abs == 0.0 {
        return Ok(InternalTempEquilibrium {
            internal_temp: t_env,
            absorbed_power: 0.0,
            residual: 0.0,
            iterations: 0,
            bracket: (t_env, t_env),
        });
    }

    let p_env = emission_power(particle, t_env)?;
    let net = |t: f64| -> f64 {
        emission_power(particle, t).map(|p| p - p_env - p_abs).unwrap_or(f64::NAN)
    };

    // expand the upper bracket until the net emission exceeds the load
    let mut hi = (t_env * 2.0).max(1.0);
    let mut expansions = 0;
    while net(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::RootSolve {
                context: "internal temperature equilibrium".to_string(),
                reason: "bracket expansion exhausted".to_string(),
                lo: t_env,
                hi,
            });
        }
    }
    let res = bisect(
        &net,
        t_env,
        hi,
        0.0,
        1e-7 * p_abs,
        300,
        "internal temperature equilibrium",
    )?;
    Ok(InternalTempEquilibrium {
        internal_temp: res.root,
        absorbed_power: p_abs,
        residual: res.f_at_root.abs(),
        iterations: res.iterations,
        bracket: (t_env, hi),
    })
}

/// Branch separation |dx(t)| as a piecewise-linear function of time.
#[derive(Debug, Clone)]
pub enum SeparationPath {
    /// Constant separation for the whole duration.
    Constant { dx: f64 },
    /// Consecutive segments, each linearly interpolating dx over its span.
    Piecewise(Vec<PathSegment>),
}

#[derive(Debug, Clone, Copy)]
pub struct PathSegment {
    pub duration: f64,
    pub dx_start: f64,
    pub dx_end: f64,
}

impl SeparationPath {
    /// Total time covered by the path definition.
    pub fn defined_until(&self) -> f64 {
        match self {
            SeparationPath::Constant { .. } => f64::INFINITY,
            SeparationPath::Piecewise(segs) => segs.iter().map(|s| s.duration).sum(),
        }
    }

    pub fn dx_at(&self, t: f64) -> Option<f64> {
        match self {
            SeparationPath::Constant { dx } => Some(*dx),
            SeparationPath::Piecewise(segs) => {
                let mut t0 = 0.0;
                for s in segs {
                    if t <= t0 + s.duration {
                        let f = if s.duration > 0.0 {
                            (t - t0) / s.duration
                        } else {
                            1.0
                        };
                        return Some(s.dx_start + f * (s.dx_end - s.dx_start));
                    }
                    t0 += s.duration;
                }
                None
            }
        }
    }

    pub fn max_dx(&self, duration: f64) -> f64 {
        match self {
            SeparationPath::Constant { dx } => dx.abs(),
            SeparationPath::Piecewise(segs) => {
                let mut m: f64 = 0.0;
                let mut t0 = 0.0;
                for s in segs {
                    if t0 > duration {
                        break;
                    }
                    m = m.max(s.dx_start.abs()).max(s.dx_end.abs());
                    t0 += s.duration;
                }
                m
            }
        }
    }
}

/// Result of the visibility-decay integral.
#[derive(Debug, Clone, Serialize)]
pub struct DecayResult {
    /// exp(-exponent), in [0, 1].
    pub factor: f64,
    /// Integral of the summed channel rates over the duration.
    pub exponent: f64,
    pub warnings: Vec<String>,
}

/// Coherence suppression exp(-int sum_ch min(Lambda dx(t)^2, gamma) dt).
pub fn visibility_decay(
    path: &SeparationPath,
    channels: &[LocalizationChannel],
    duration: f64,
) -> Result<DecayResult> {
    if !(duration >= 0.0) {
        return Err(Error::invalid_field(
            "duration",
            "must be non-negative",
            duration,
        ));
    }
    if path.defined_until() + 1e-12 * duration.abs() < duration {
        return Err(Error::invalid_field(
            "separation_path",
            format!("path defined only until {:e} s", path.defined_until()),
            duration,
        ));
    }
    if let Some(t) = sample_undefined(path, duration) {
        return Err(Error::invalid_field(
            "separation_path",
            "undefined path segment",
            t,
        ));
    }

    let mut warnings = Vec::new();
    let max_dx = path.max_dx(duration);
    for ch in channels {
        if let Some(scale) = ch.validity_scale {
            if max_dx > scale {
                warnings.push(format!(
                    "long-wavelength limit strained for {}: max separation {:.3e} m exceeds \
                     thermal wavelength / 10 = {:.3e} m",
                    ch.kind.label(),
                    max_dx,
                    scale
                ));
            }
        }
    }

    let total_rate = |t: f64| -> f64 {
        let dx = path.dx_at(t).unwrap_or(0.0);
        channels.iter().map(|c| c.rate_at(dx)).sum()
    };
    // integrate segment by segment so the quadrature only ever sees a
    // smooth integrand (protocol paths step at the slit time)
    let mut exponent = 0.0;
    match path {
        SeparationPath::Constant { .. } => {
            exponent = integrate(&total_rate, 0.0, duration, 1e-10, 1e-300, "visibility decay")?;
        }
        SeparationPath::Piecewise(segs) => {
            let mut t0 = 0.0;
            for s in segs {
                let t1 = (t0 + s.duration).min(duration);
                if t1 > t0 {
                    exponent +=
                        integrate(&total_rate, t0, t1, 1e-10, 1e-300, "visibility decay")?;
                }
                t0 += s.duration;
                if t0 >= duration {
                    break;
                }
            }
        }
    }
    Ok(DecayResult {
        factor: (-exponent).exp(),
        exponent,
        warnings,
    })
}

fn sample_undefined(path: &SeparationPath, duration: f64) -> Option<f64> {
    for i in 0..=32 {
        let t = duration * i as f64 / 32.0;
        if path.dx_at(t).is_none() {
            return Some(t);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn silica(t_i: f64) -> Particle {
        Particle::new(
            1e-7,
            2300.0,
            Complex64::new(2.1, 0.0),
            Complex64::new(2.1, 0.57),
            t_i,
        )
        .unwrap()
    }

    #[test]
    fn zero_temperature_channels_vanish() {
        let p = silica(0.0);
        assert_eq!(bb_scatter(&p, 0.0).unwrap().lambda, 0.0);
        assert_eq!(bb_absorb(&p, 0.0).unwrap().lambda, 0.0);
        assert_eq!(bb_emit(&p).unwrap().lambda, 0.0);
    }

    #[test]
    fn scaling_laws_exact() {
        let p = silica(16.0);
        for t in [4.0, 16.0, 64.0] {
            let r_sc = bb_scatter(&p, 2.0 * t).unwrap().lambda / bb_scatter(&p, t).unwrap().lambda;
            assert!((r_sc - 512.0).abs() < 512.0 * 1e-12, "T^9 law: {r_sc}");
            let r_ab = bb_absorb(&p, 2.0 * t).unwrap().lambda / bb_absorb(&p, t).unwrap().lambda;
            assert!((r_ab - 64.0).abs() < 64.0 * 1e-12, "T^6 law: {r_ab}");
        }
    }

    #[test]
    fn emit_equals_absorb_at_equal_temperature() {
        let p = silica(16.0);
        let em = bb_emit(&p).unwrap();
        let ab = bb_absorb(&p, 16.0).unwrap();
        assert_eq!(em.lambda, ab.lambda);
        assert_eq!(em.gamma_sat, ab.gamma_sat);
    }

    #[test]
    fn lossless_particle_does_not_absorb() {
        let p = Particle::new(
            1e-7,
            2300.0,
            Complex64::new(2.1, 0.0),
            Complex64::new(2.1, 0.0),
            16.0,
        )
        .unwrap();
        assert_eq!(bb_absorb(&p, 16.0).unwrap().lambda, 0.0);
    }

    #[test]
    fn scatter_lambda_against_spectral_oracle() {
        // independent route: quadrature of the full spectral integrand
        // (8 c R^6 / 9 pi) Re[CM]^2 k^8 / (e^{hbar c k / kT} - 1)
        let p = silica(16.0);
        let t = 16.0;
        let ch = bb_scatter(&p, t).unwrap();
        let cm = clausius_mossotti(p.eps_bb);
        let kth = CONST.k_b * t / HBAR_C;
        let pref = 8.0 * CONST.c * p.radius.powi(6) / (9.0 * std::f64::consts::PI)
            * cm.re
            * cm.re;
        let integrand = |x: f64| {
            if x < 1e-8 {
                x.powi(7)
            } else {
                x.powi(8) / x.exp_m1()
            }
        };
        let oracle = pref
            * kth.powi(9)
            * integrate(&integrand, 0.0, 120.0, 1e-11, 1e-300, "oracle").unwrap();
        assert_relative_eq!(ch.lambda, oracle, max_relative = 0.05);
        // the two routes actually agree far better than the 5% gate
        assert_relative_eq!(ch.lambda, oracle, max_relative = 1e-6);
        // and the absolute scale sits where the hand calculation puts it
        assert_relative_eq!(ch.lambda, 1.08e4, max_relative = 2e-2);
    }

    #[test]
    fn saturation_rates_match_closed_forms() {
        let p = silica(16.0);
        let t = 16.0;
        let cm = clausius_mossotti(p.eps_bb);
        let kth = CONST.k_b * t / HBAR_C;
        let sc = bb_scatter(&p, t).unwrap();
        let expect_sc = 8.0 * CONST.c * p.radius.powi(6) / (3.0 * std::f64::consts::PI)
            * cm.norm_sqr()
            * kth.powi(7)
            * 720.0
            * crate::constants::ZETA_7;
        assert_relative_eq!(sc.gamma_sat, expect_sc, max_relative = 1e-8);
        let ab = bb_absorb(&p, t).unwrap();
        let expect_ab = 4.0 * CONST.c * p.radius.powi(3) / std::f64::consts::PI
            * cm.im
            * kth.powi(4)
            * 6.0
            * crate::constants::ZETA_4;
        assert_relative_eq!(ab.gamma_sat, expect_ab, max_relative = 1e-8);
    }

    #[test]
    fn gas_rate_example() {
        let p = Particle::new(
            120e-9,
            2300.0,
            Complex64::new(2.1, 0.0),
            Complex64::new(2.1, 0.57),
            16.0,
        )
        .unwrap();
        let env = Environment::new(16.0, 1e-13, 2.0 * CONST.amu).unwrap();
        let g = gas_collisions(&p, &env, 100.0).unwrap();
        assert_relative_eq!(g.rate, 8.4e-3, max_relative = 2e-2);
        assert_relative_eq!(g.expected_events, 0.84, max_relative = 2e-2);
        assert_relative_eq!(g.survival, (-g.expected_events).exp(), max_relative = 1e-14);
    }

    #[test]
    fn gas_vacuum_and_linearity() {
        let p = silica(16.0);
        let env0 = Environment::new(16.0, 0.0, 2.0 * CONST.amu).unwrap();
        let g0 = gas_collisions(&p, &env0, 100.0).unwrap();
        assert_eq!(g0.rate, 0.0);
        assert_eq!(g0.survival, 1.0);
        let env1 = Environment::new(16.0, 1e-13, 2.0 * CONST.amu).unwrap();
        let env2 = Environment::new(16.0, 2e-13, 2.0 * CONST.amu).unwrap();
        let g1 = gas_collisions(&p, &env1, 100.0).unwrap();
        let g2 = gas_collisions(&p, &env2, 100.0).unwrap();
        assert_relative_eq!(g2.rate / g1.rate, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn decay_trivial_cases() {
        let ch = LocalizationChannel::new(ChannelKind::BbAbsorb, 0.0, 0.0).unwrap();
        let d = visibility_decay(&SeparationPath::Constant { dx: 1e-7 }, &[ch], 100.0).unwrap();
        assert_eq!(d.factor, 1.0);
        let ch = LocalizationChannel::new(ChannelKind::BbAbsorb, 1e12, f64::INFINITY).unwrap();
        let d = visibility_decay(&SeparationPath::Constant { dx: 0.0 }, &[ch], 100.0).unwrap();
        assert_eq!(d.factor, 1.0);
    }

    #[test]
    fn decay_constant_separation_example() {
        let ch = LocalizationChannel::new(ChannelKind::BbAbsorb, 1e10, f64::INFINITY).unwrap();
        let d = visibility_decay(&SeparationPath::Constant { dx: 1e-7 }, &[ch], 100.0).unwrap();
        assert_relative_eq!(d.exponent, 1e-2, max_relative = 1e-10);
        assert_relative_eq!(d.factor, 0.990, max_relative = 1e-3);
    }

    #[test]
    fn decay_saturation_caps_rate() {
        let ch = LocalizationChannel::new(ChannelKind::BbEmit, 1e30, 2.0).unwrap();
        let d = visibility_decay(&SeparationPath::Constant { dx: 1e-3 }, &[ch], 3.0).unwrap();
        assert_relative_eq!(d.exponent, 6.0, max_relative = 1e-10);
    }

    #[test]
    fn decay_piecewise_protocol_shape() {
        let ch = LocalizationChannel::new(ChannelKind::BbAbsorb, 1e10, f64::INFINITY).unwrap();
        let path = SeparationPath::Piecewise(vec![
            PathSegment {
                duration: 1.0,
                dx_start: 0.0,
                dx_end: 0.0,
            },
            PathSegment {
                duration: 100.0,
                dx_start: 1e-7,
                dx_end: 1e-7,
            },
        ]);
        let d = visibility_decay(&path, &[ch], 101.0).unwrap();
        assert_relative_eq!(d.exponent, 1e-2, max_relative = 1e-9);
    }

    #[test]
    fn decay_undefined_path_rejected() {
        let ch = LocalizationChannel::new(ChannelKind::BbAbsorb, 1e10, f64::INFINITY).unwrap();
        let path = SeparationPath::Piecewise(vec![PathSegment {
            duration: 1.0,
            dx_start: 0.0,
            dx_end: 1e-7,
        }]);
        assert!(visibility_decay(&path, &[ch], 2.0).is_err());
    }

    #[test]
    fn decay_monotone_in_duration_and_lambda() {
        let path = SeparationPath::Constant { dx: 1e-7 };
        let mk = |l: f64| LocalizationChannel::new(ChannelKind::BbAbsorb, l, f64::INFINITY).unwrap();
        let d1 = visibility_decay(&path, &[mk(1e10)], 50.0).unwrap().factor;
        let d2 = visibility_decay(&path, &[mk(1e10)], 100.0).unwrap().factor;
        let d3 = visibility_decay(&path, &[mk(2e10)], 50.0).unwrap().factor;
        assert!(d2 < d1);
        assert!(d3 < d1);
    }

    #[test]
    fn long_wavelength_warning() {
        let p = silica(16.0);
        let ch = bb_scatter(&p, 16.0).unwrap();
        // thermal wavelength at 16 K is ~143 um; 20 um separation strains it
        let d = visibility_decay(&SeparationPath::Constant { dx: 2e-5 }, &[ch], 1.0).unwrap();
        assert!(d.warnings.iter().any(|w| w.contains("long-wavelength")));
        let d = visibility_decay(&SeparationPath::Constant { dx: 1e-7 }, &[ch], 1.0).unwrap();
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn emission_power_monotone() {
        let p = silica(16.0);
        let p1 = emission_power(&p, 10.0).unwrap();
        let p2 = emission_power(&p, 20.0).unwrap();
        let p3 = emission_power(&p, 40.0).unwrap();
        assert!(p2 > p1 && p3 > p2);
        // T^5 law
        assert_relative_eq!(p2 / p1, 32.0, max_relative = 1e-8);
    }

    #[test]
    fn equilibrium_no_heating_returns_env() {
        let p = silica(16.0);
        let trap = Trap::new(63_000.0, 1064e-9, 0.0).unwrap();
        let eq = internal_temperature_equilibrium(&p, &trap, 2.5e-8).unwrap();
        assert_eq!(eq.internal_temp, 16.0);
        assert_eq!(eq.residual, 0.0);
    }

    #[test]
    fn equilibrium_ppb_vs_ppm() {
        let p = silica(16.0);
        let trap = Trap::new(63_000.0, 1064e-9, 1e9).unwrap();
        // 0.25 ppb/cm = 2.5e-8 1/m, 0.25 ppm/cm = 2.5e-5 1/m
        let ppb = internal_temperature_equilibrium(&p, &trap, 2.5e-8).unwrap();
        let ppm = internal_temperature_equilibrium(&p, &trap, 2.5e-5).unwrap();
        assert!(ppb.internal_temp < 20.0, "ppb case {}", ppb.internal_temp);
        assert!(ppm.internal_temp > 20.0, "ppm case {}", ppm.internal_temp);
        assert!(ppm.internal_temp > ppb.internal_temp);
        // residual contract
        assert!(ppb.residual < 1e-6 * ppb.absorbed_power);
        assert!(ppm.residual < 1e-6 * ppm.absorbed_power);
    }

    #[test]
    fn equilibrium_monotone_in_absorption() {
        let p = silica(16.0);
        let trap = Trap::new(63_000.0, 1064e-9, 1e9).unwrap();
        let mut last = 0.0;
        for a in [1e-8, 1e-7, 1e-6, 1e-5] {
            let eq = internal_temperature_equilibrium(&p, &trap, a).unwrap();
            assert!(eq.internal_temp > last);
            last = eq.internal_temp;
        }
    }
}
