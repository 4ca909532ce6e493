//! Deterministic numeric rendering for reports.
//!
//! Report output must be byte-stable across runs, so every number printed by
//! the toolkit goes through one of these helpers.

/// Formats `x` to `digits` significant digits, using plain decimal notation
/// when the exponent is close to zero and scientific notation otherwise.
pub fn significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let scientific = format!("{:.*e}", digits - 1, x);
    let (_, exp) = scientific
        .split_once('e')
        .expect("scientific format always carries an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= digits as i32 {
        return scientific;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Formats `x` (a fraction) as a percentage with a fixed number of decimals.
pub fn percent_fixed(x: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, x * 100.0)
}

/// Formats `x` (a fraction) as a percentage truncated — not rounded — to
/// four decimal places, the precision of the bundled reference tables.
pub fn percent_truncated_4dp(x: f64) -> String {
    let scaled = (x.max(0.0) * 1_000_000.0).floor() as i64;
    format!("{}.{:04}", scaled / 10_000, scaled % 10_000)
}
