//! Scalar special functions: log-gamma, regularized incomplete beta/gamma,
//! their inverses, and the error function.
//!
//! Everything is evaluated in log space where overflow is possible; the
//! incomplete beta uses the continued fraction with the symmetry switch at
//! x = (a+1)/(a+b+2), and the inverses use bracketed Newton iteration with
//! bisection fallback.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π/sin(πx)
        let pi = std::f64::consts::PI;
        return Ok((pi / (pi * x).sin()).ln() - log_gamma(1.0 - x)?);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    let half_ln_2pi = 0.918_938_533_204_672_8;
    Ok(half_ln_2pi + (x + 0.5) * t.ln() - t + acc.ln())
}

/// ln B(a, b).
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires x in [0,1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - log_beta(a, b)?;
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * betacf(a, b, x) / a)
    } else {
        Ok(1.0 - front * betacf(b, a, 1.0 - x) / b)
    }
}

/// Inverse of the regularized incomplete beta: x such that I_x(a, b) = u.
pub fn inv_reg_inc_beta(u: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "inv_reg_inc_beta requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "inv_reg_inc_beta requires u in [0,1], got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    let ln_b = log_beta(a, b)?;
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut x = a / (a + b);
    for _ in 0..200 {
        let f = reg_inc_beta(x, a, b)? - u;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f.abs() < 1e-15 {
            break;
        }
        // Newton step on the pdf; fall back to bisection when it escapes
        let ln_pdf = (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_b;
        let mut next = x - f * (-ln_pdf).exp();
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-17 * x.max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Series expansion of the lower incomplete gamma P(a, x), x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> Result<f64> {
    let gln = log_gamma(a)?;
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    Ok(sum * (-x + a * x.ln() - gln).exp())
}

/// Continued fraction for the upper incomplete gamma Q(a, x), x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> Result<f64> {
    let gln = log_gamma(a)?;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    Ok((-x + a * x.ln() - gln).exp() * h)
}

/// Regularized lower incomplete gamma P(a, x).
pub fn reg_inc_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("reg_inc_gamma requires a > 0, got {a}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("reg_inc_gamma requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        Ok(1.0 - gamma_q_cf(a, x)?)
    }
}

/// Inverse of P(a, ·): x such that P(a, x) = u.
pub fn inv_reg_inc_gamma(u: f64, a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "inv_reg_inc_gamma requires u in [0,1], got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(f64::INFINITY);
    }
    let gln = log_gamma(a)?;
    // Wilson-Hilferty starting point
    let g = inv_erf(2.0 * u - 1.0)? * std::f64::consts::SQRT_2;
    let t = 1.0 - 1.0 / (9.0 * a) + g / (3.0 * a.sqrt());
    let mut x = (a * t * t * t).max(1e-300);
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for _ in 0..200 {
        let f = reg_inc_gamma(a, x)? - u;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f.abs() < 1e-15 {
            break;
        }
        let ln_pdf = (a - 1.0) * x.ln() - x - gln;
        let mut next = x - f * (-ln_pdf).exp();
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() < 1e-16 * x.max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Error function, via the regularized incomplete gamma.
pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let p = reg_inc_gamma(0.5, x * x).expect("erf: P(1/2, x^2) is always in-domain");
    if x > 0.0 {
        p
    } else {
        -p
    }
}

/// Inverse error function on (-1, 1).
pub fn inv_erf(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("inv_erf requires |y| < 1, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let target = y.abs();
    // bracket on [0, 6]: erf(6) = 1 − 2e-17 exceeds any representable |y| < 1
    let mut lo = 0.0_f64;
    let mut hi = 6.0_f64;
    let mut x = 0.5 * (lo + hi);
    let two_over_sqrt_pi = 1.128_379_167_095_512_6;
    for _ in 0..100 {
        let f = erf(x) - target;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f.abs() < 1e-16 {
            break;
        }
        let deriv = two_over_sqrt_pi * (-x * x).exp();
        let mut next = x - f / deriv;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-16 * x.max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(if y > 0.0 { x } else { -x })
}
