//! Closed-form limits and finite-K formulas.
//!
//! These are deterministic functions used as oracles by the experiments:
//! the limit basin profile and rank law, the fluid-limit ODE of the
//! incremental construction, and the finite-K sums whose limits produce them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_half_interval(epsilon: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1/2], got {epsilon}")));
    }
    Ok(())
}

fn check_open_half_interval(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::arg(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    Ok(())
}

/// φ(ε) = exp(√(1−2ε)): limit of E|BoA(η_⌊εK⌋)|/K, and the density of the
/// rescaled rank of the equilibrium reached from a uniform start.
pub fn basin_limit(epsilon: f64) -> Result<f64> {
    check_half_interval(epsilon)?;
    Ok((1.0 - 2.0 * epsilon).sqrt().exp())
}

/// Φ(ε) = (1−√(1−2ε))·exp(√(1−2ε)), the limit CDF of Λ/K on [0, 1/2].
pub fn rank_cdf_limit(epsilon: f64) -> Result<f64> {
    check_half_interval(epsilon)?;
    let x = (1.0 - 2.0 * epsilon).sqrt();
    Ok((1.0 - x) * x.exp())
}

/// Φ extended to the whole line: 0 below 0, 1 above 1/2.
pub fn rank_cdf_limit_total(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 0.5 {
        1.0
    } else {
        rank_cdf_limit(x).expect("in range")
    }
}

/// Limit of E[Λ/K]: e − 5/2.
pub fn mean_rank_limit() -> f64 {
    std::f64::consts::E - 2.5
}

/// Rescaled state (r, c, g) of the fluid limit at time s = t/K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub s: f64,
    pub r: f64,
    pub c: f64,
    pub g: f64,
}

/// Solution of ṙ = 1−r, ċ = 1−c, ġ = (1−r)(1−c) from zero initial data.
pub fn ode_solution(s: f64) -> Result<OdeState> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::arg(format!("time must be finite and nonnegative, got {s}")));
    }
    let r = -(-s).exp_m1();
    let g = -0.5 * (-2.0 * s).exp_m1();
    Ok(OdeState { s, r, c: r, g })
}

/// Drift of the fluid system at `(r, c, g)`.
pub fn fluid_drift(r: f64, c: f64, _g: f64) -> [f64; 3] {
    [1.0 - r, 1.0 - c, (1.0 - r) * (1.0 - c)]
}

/// Classical fourth-order Runge–Kutta on the fluid system, `steps` equal steps on [0, s].
pub fn integrate_fluid_limit(s: f64, steps: usize) -> OdeState {
    let h = s / steps as f64;
    let mut y = [0.0f64; 3];
    let add = |y: [f64; 3], d: [f64; 3], f: f64| [y[0] + f * d[0], y[1] + f * d[1], y[2] + f * d[2]];
    for _ in 0..steps {
        let k1 = fluid_drift(y[0], y[1], y[2]);
        let y2 = add(y, k1, h / 2.0);
        let k2 = fluid_drift(y2[0], y2[1], y2[2]);
        let y3 = add(y, k2, h / 2.0);
        let k3 = fluid_drift(y3[0], y3[1], y3[2]);
        let y4 = add(y, k3, h);
        let k4 = fluid_drift(y4[0], y4[1], y4[2]);
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    OdeState { s, r: y[0], c: y[1], g: y[2] }
}

/// Limit of τ_⌊εK⌋/K: ½·log(1/(1−2ε)).
pub fn tau_limit(epsilon: f64) -> Result<f64> {
    check_open_half_interval(epsilon)?;
    Ok(-0.5 * (-2.0 * epsilon).ln_1p())
}

/// Common limit of R_τ/K and C_τ/K: 1 − √(1−2ε).
pub fn rc_limit(epsilon: f64) -> Result<f64> {
    check_open_half_interval(epsilon)?;
    Ok(1.0 - (1.0 - 2.0 * epsilon).sqrt())
}

/// h(t) = Σ_{i=1}^{t} ⌊i/2⌋ = ⌊t²/4⌋.
pub fn h_cumulative(t: u64) -> u64 {
    t * t / 4
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Shared double sum Σ_{ℓ=0}^{2K−2} lead/((ℓ+1)K − h(ℓ+1)) · ∏_{t=1}^{ℓ} num(t)/(tK − h(t)).
/// The product is clamped to zero once a numerator reaches zero.
fn sum_of_products(k: u64, lead: f64, numerator: impl Fn(u64) -> f64) -> f64 {
    let denom = |t: u64| (t * k - h_cumulative(t)) as f64;
    let mut acc = CompensatedSum::default();
    let mut product = 1.0f64;
    for l in 0..=(2 * k).saturating_sub(2) {
        acc.add(lead / denom(l + 1) * product);
        let num = numerator(l + 1);
        if num <= 0.0 {
            break;
        }
        product *= num / denom(l + 1);
        if product == 0.0 {
            break;
        }
    }
    acc.value()
}

/// L_K(ζ) = Σ_{ℓ=0}^{2K−2} ζK/((ℓ+1)K − h(ℓ+1)) ∏_{t=1}^{ℓ} (ζK − ⌊t/2⌋)/(tK − h(t)),
/// which tends to e^ζ − 1.
pub fn sum_product(k: usize, zeta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::arg("k must be at least 1"));
    }
    if !zeta.is_finite() || zeta <= 0.0 {
        return Err(Error::arg(format!("zeta must be positive, got {zeta}")));
    }
    let zk = zeta * k as f64;
    Ok(sum_of_products(k as u64, zk, |t| zk - (t / 2) as f64))
}

fn check_basin_args(k: usize, r: usize, c: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::arg("k must be at least 1"));
    }
    if r > k || c > k {
        return Err(Error::arg(format!("r = {r} and c = {c} must lie in [0, {k}]")));
    }
    Ok(())
}

fn basin_numerator(k: u64, r: u64, c: u64, t: u64) -> i64 {
    let occupied = if t % 2 == 1 { r } else { c };
    k as i64 - occupied as i64 - (t / 2) as i64
}

/// Conditional expected basin size (over K) of the ⌊εK⌋-th equilibrium given
/// `r` occupied rows and `c` occupied columns at the stopping time:
/// 1 + (K−c) Σ_ℓ 1/((ℓ+1)K − h(ℓ+1)) ∏_{t≤ℓ} (K − r·1{t odd} − c·1{t even} − ⌊t/2⌋)/(tK − h(t)).
pub fn conditional_basin_sum(k: usize, r: usize, c: usize) -> Result<f64> {
    check_basin_args(k, r, c)?;
    let (k, r, c) = (k as u64, r as u64, c as u64);
    let tail = sum_of_products(k, (k - c) as f64, |t| basin_numerator(k, r, c, t) as f64);
    Ok(1.0 + tail)
}

/// Exact rational evaluation of [`conditional_basin_sum`], for K ≤ 100.
pub fn conditional_basin_sum_exact(k: usize, r: usize, c: usize) -> Result<BigRational> {
    check_basin_args(k, r, c)?;
    if k > 100 {
        return Err(Error::arg("exact evaluation is limited to k <= 100"));
    }
    let (k, r, c) = (k as u64, r as u64, c as u64);
    let denom = |t: u64| BigInt::from(t * k - h_cumulative(t));
    let lead = BigRational::from_integer(BigInt::from(k - c));
    let mut sum = BigRational::zero();
    let mut product = BigRational::one();
    for l in 0..=(2 * k).saturating_sub(2) {
        sum += &lead * &product / BigRational::from_integer(denom(l + 1));
        let num = basin_numerator(k, r, c, l + 1);
        if num <= 0 {
            break;
        }
        product *= BigRational::new(BigInt::from(num), denom(l + 1));
    }
    Ok(BigRational::one() + sum)
}

/// H_n = Σ_{i=1}^{n} 1/i.
pub fn harmonic(n: usize) -> f64 {
    let mut acc = CompensatedSum::default();
    for i in (1..=n).rev() {
        acc.add(1.0 / i as f64);
    }
    acc.value()
}

/// Expected time for a K-coupon collector to hold `j` distinct coupons:
/// K(H_K − H_{K−j}).
pub fn coupon_expectation(k: usize, j: usize) -> Result<f64> {
    if j == 0 || j > k {
        return Err(Error::arg(format!("j must lie in [1, {k}], got {j}")));
    }
    let mut acc = CompensatedSum::default();
    for i in (k - j + 1..=k).rev() {
        acc.add(1.0 / i as f64);
    }
    Ok(k as f64 * acc.value())
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// The interval is cut into 16 panels and the last one is split again, so
/// integrands with a derivative singularity at `b` (like φ at 1/2) still
/// converge.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 16;
    let width = (b - a) / PANELS as f64;
    let mut edges: Vec<f64> = (0..=PANELS).map(|i| a + width * i as f64).collect();
    edges[PANELS] = b;
    let last_mid = 0.5 * (edges[PANELS - 1] + b);
    edges.insert(PANELS, last_mid);
    let pieces = edges.len() - 1;
    let mut acc = CompensatedSum::default();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(lo, hi, flo, fmid, fhi);
        acc.add(simpson_step(&f, lo, hi, flo, fmid, fhi, whole, tol / pieces as f64, 60));
    }
    acc.value()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn phi_values() {
        assert!(close(basin_limit(0.0).unwrap(), E, 1e-15));
        assert!(close(basin_limit(0.5).unwrap(), 1.0, 1e-15));
        // 1 - 0.36 = 0.64, sqrt = 0.8
        assert!(close(basin_limit(0.18).unwrap(), 2.225_540_928_492_468, 1e-12));
        assert!(basin_limit(-0.01).is_err());
        assert!(basin_limit(0.51).is_err());
        assert!(basin_limit(f64::NAN).is_err());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(rank_cdf_limit(0.0).unwrap(), 0.0);
        assert!(close(rank_cdf_limit(0.5).unwrap(), 1.0, 1e-15));
        assert!(close(rank_cdf_limit(0.18).unwrap(), 0.2 * 0.8f64.exp(), 1e-12));
        assert!(close(rank_cdf_limit(0.18).unwrap(), 0.445_108, 1e-6));
        assert!(rank_cdf_limit(0.6).is_err());
    }

    #[test]
    fn cdf_is_increasing() {
        let mut prev = -1.0;
        for i in 0..=1000 {
            let v = rank_cdf_limit(i as f64 * 0.0005).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn mean_rank_by_quadrature() {
        let m = mean_rank_limit();
        assert!(m > 0.0 && m < 0.5);
        assert!(close(m, 0.218_281_828_459_045, 1e-12));
        let first_moment = integrate(|e| e * basin_limit(e).unwrap(), 0.0, 0.5, 1e-11);
        assert!(close(first_moment, m, 1e-8));
        let by_parts = 0.5 - integrate(|e| rank_cdf_limit(e).unwrap(), 0.0, 0.5, 1e-11);
        // E[X] = ∫(1 − Φ) over [0, 1/2]
        assert!(close(by_parts, m, 1e-8));
    }

    #[test]
    fn ode_closed_form() {
        let s0 = ode_solution(0.0).unwrap();
        assert_eq!((s0.r, s0.c, s0.g), (0.0, 0.0, 0.0));
        let s = ode_solution(2f64.ln()).unwrap();
        assert!(close(s.r, 0.5, 1e-15) && close(s.c, 0.5, 1e-15) && close(s.g, 0.375, 1e-15));
        assert!(ode_solution(-1.0).is_err());
        for eps in [0.1, 0.25, 0.4] {
            let st = ode_solution(tau_limit(eps).unwrap()).unwrap();
            assert!(close(st.g, eps, 1e-12));
            assert!(close(st.r, rc_limit(eps).unwrap(), 1e-12));
        }
    }

    #[test]
    fn ode_matches_runge_kutta() {
        for s in [0.1, 0.5, 1.0, 2.5] {
            let exact = ode_solution(s).unwrap();
            let num = integrate_fluid_limit(s, 2000);
            assert!(close(exact.r, num.r, 1e-10));
            assert!(close(exact.c, num.c, 1e-10));
            assert!(close(exact.g, num.g, 1e-10));
        }
    }

    #[test]
    fn limits_at_sample_points() {
        assert!(close(tau_limit(0.3).unwrap(), 0.5 * 2.5f64.ln(), 1e-15));
        assert!(close(tau_limit(0.3).unwrap(), 0.458_145_366, 1e-9));
        assert!(tau_limit(1e-9).unwrap() < 1e-8);
        assert!(close(rc_limit(0.18).unwrap(), 0.2, 1e-15));
        assert!(close(rc_limit(0.3).unwrap(), 0.367_544, 1e-6));
        assert!(tau_limit(0.0).is_err() && rc_limit(0.5).is_err());
    }

    #[test]
    fn h_matches_direct_sum() {
        for t in 0..200u64 {
            let direct: u64 = (1..=t).map(|i| i / 2).sum();
            assert_eq!(h_cumulative(t), direct);
            assert!(2 * h_cumulative(t) <= t * t);
        }
        assert_eq!([1, 4, 6].map(h_cumulative), [0, 4, 9]);
    }

    #[test]
    fn sum_product_behaviour() {
        assert!(close(sum_product(10_000, 1.0).unwrap(), E - 1.0, 0.01));
        assert!(sum_product(1000, 1e-6).unwrap() < 1e-5);
        let zeta = 0.4f64.sqrt();
        let target = zeta.exp() - 1.0;
        let errs: Vec<f64> =
            [100, 1000, 10_000].iter().map(|&k| (sum_product(k, zeta).unwrap() - target).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(sum_product(0, 1.0).is_err() && sum_product(5, 0.0).is_err());
    }

    #[test]
    fn conditional_sum_cases() {
        assert_eq!(conditional_basin_sum(50, 10, 50).unwrap(), 1.0);
        let v = conditional_basin_sum(10_000, 2000, 2000).unwrap();
        assert!(close(v, basin_limit(0.18).unwrap(), 0.02), "{v}");
        let v0 = conditional_basin_sum(10_000, 0, 0).unwrap();
        assert!(close(v0, E, 0.02), "{v0}");
        assert!(conditional_basin_sum(10, 11, 0).is_err());
    }

    #[test]
    fn conditional_sum_float_matches_exact() {
        for (k, r, c) in [(1, 0, 0), (5, 2, 3), (20, 4, 4), (60, 10, 25), (100, 0, 0), (100, 37, 21)] {
            let exact = conditional_basin_sum_exact(k, r, c).unwrap();
            let approx = conditional_basin_sum(k, r, c).unwrap();
            let exact_f = crate::util::ratio_to_f64(&exact);
            assert!(close(exact_f, approx, 1e-12), "{k} {r} {c}: {exact_f} vs {approx}");
        }
        assert!(conditional_basin_sum_exact(101, 0, 0).is_err());
    }

    #[test]
    fn conditional_sum_with_equal_counts_is_sum_product() {
        for (k, c) in [(50, 10), (400, 123), (3000, 600)] {
            let zeta = (k - c) as f64 / k as f64;
            let lhs = conditional_basin_sum(k, c, c).unwrap();
            let rhs = 1.0 + sum_product(k, zeta).unwrap();
            assert!(close(lhs, rhs, 1e-12));
        }
    }

    #[test]
    fn harmonic_and_coupons() {
        assert!(close(harmonic(1), 1.0, 0.0));
        assert!(close(harmonic(4), 25.0 / 12.0, 1e-15));
        for k in [1, 7, 100] {
            assert!(close(coupon_expectation(k, 1).unwrap(), 1.0, 1e-12));
            assert!(close(coupon_expectation(k, k).unwrap(), k as f64 * harmonic(k), 1e-9));
        }
        assert!(close(coupon_expectation(100, 100).unwrap(), 518.737_751_763_962, 1e-9));
        assert!(coupon_expectation(5, 0).is_err() && coupon_expectation(5, 6).is_err());
    }

    #[test]
    fn quadrature_on_known_integrals() {
        assert!(close(integrate(|x| x * x, 0.0, 1.0, 1e-12), 1.0 / 3.0, 1e-12));
        assert!(close(integrate(|x| (1.0 - x).sqrt(), 0.0, 1.0, 1e-10), 2.0 / 3.0, 1e-9));
    }
}
