//! Shared numerics: adaptive quadrature and bracketed root finding.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Classic recursive scheme with Richardson correction; accepts a panel when
/// the two-half estimate agrees with the single-panel estimate to the local
/// error budget. `rel_tol` is measured against the running whole-interval
/// estimate, `abs_tol` is an absolute floor for integrals near zero.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    context: &str,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(abs_tol);
    let mut worst: f64 = 0.0;
    let v = simpson_rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        rel_tol * scale,
        MAX_DEPTH,
        &mut worst,
    );
    if worst > 16.0 * rel_tol * v.abs().max(abs_tol) {
        return Err(Error::QuadratureNonConvergence {
            context: context.to_string(),
            estimate: v,
            error: worst,
        });
    }
    Ok(v)
}

const MAX_DEPTH: u32 = 48;

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        if depth == 0 {
            *worst = worst.max(delta.abs());
        }
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, worst)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, worst)
}

/// Integral of x^p / (e^x - 1) over (0, inf), evaluated numerically.
///
/// The integrand is cut at x = 120 (the tail is below 1e-45 of the peak for
/// every p used here) and the removable singularity at 0 is handled by the
/// series limit x^(p-1). Values are cached per exponent; the same handful
/// of spectral moments is hit thousands of times during bisection solves.
pub fn bose_integral(p: f64) -> Result<f64> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&p.to_bits()) {
        return Ok(v);
    }
    let f = move |x: f64| {
        if x < 1e-8 {
            // x^p/(e^x-1) -> x^(p-1) as x -> 0
            x.powf(p - 1.0)
        } else {
            x.powf(p) / x.exp_m1()
        }
    };
    let v = integrate(&f, 0.0, 120.0, 1e-11, 1e-300, "bose integral")?;
    cache.lock().unwrap().insert(p.to_bits(), v);
    Ok(v)
}

/// Result of a bracketed bisection solve.
#[derive(Debug, Clone, Copy)]
pub struct BisectResult {
    pub root: f64,
    pub iterations: u32,
    pub f_at_root: f64,
}

/// Bisection on `[lo, hi]`, requiring `f(lo)` and `f(hi)` of opposite signs.
///
/// Runs until the bracket shrinks below `rel_tol` relative to the midpoint
/// or `f_tol` is met, whichever the caller cares about (pass 0.0 to disable
/// one of them).
pub fn bisect<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    f_tol: f64,
    max_iter: u32,
    context: &str,
) -> Result<BisectResult> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(BisectResult {
            root: lo,
            iterations: 0,
            f_at_root: 0.0,
        });
    }
    if fhi == 0.0 {
        return Ok(BisectResult {
            root: hi,
            iterations: 0,
            f_at_root: 0.0,
        });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootSolve {
            context: context.to_string(),
            reason: "endpoints have the same sign".to_string(),
            lo,
            hi,
        });
    }
    let mut mid = 0.5 * (lo + hi);
    let mut fmid = f(mid);
    for it in 1..=max_iter {
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
        if fmid == 0.0
            || (f_tol > 0.0 && fmid.abs() < f_tol)
            || (rel_tol > 0.0 && (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE))
        {
            return Ok(BisectResult {
                root: mid,
                iterations: it,
                f_at_root: fmid,
            });
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootSolve {
        context: context.to_string(),
        reason: format!("no convergence after {max_iter} iterations (|f| = {:e})", fmid.abs()),
        lo,
        hi,
    })
}
