//! Deterministic number formatting.

/// Nine significant digits in fixed notation; `inf`, `-inf`, `nan` otherwise.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000".into();
    }
    // exponent after rounding to nine digits
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Nine decimal places, for human-readable reports.
pub fn fixed9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9}")
    } else {
        sig9(x)
    }
}
