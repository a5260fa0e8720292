//! Log-gamma and digamma for positive real arguments.
//!
//! Both use the recurrence to shift the argument above [`SHIFT`] and then an
//! asymptotic (Stirling) series; arguments below 1/2 go through reflection.

use std::f64::consts::PI;

const SHIFT: f64 = 10.0;

/// 0.5 * ln(2π)
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1)), k = 1..=9
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
];

// B_{2k} / (2k), k = 1..=8
const DIGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Natural log of |Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }

    let mut z = x;
    let mut prod = 1.0;
    while z < SHIFT {
        prod *= z;
        z += 1.0;
    }
    stirling(z) - prod.ln()
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// ψ(x) = d/dx ln Γ(x).
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.0 {
        // ψ(1-x) - ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }

    let mut z = x;
    let mut acc = 0.0;
    while z < SHIFT {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = 0.0;
    for c in DIGAMMA_SERIES.iter().rev() {
        series = series * inv2 + c;
    }
    acc + z.ln() - 0.5 / z - series * inv2
}

/// ln(n!) for a non-negative integer.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0)
}
