//! Fixed-point decimal rendering with round-half-away-from-zero.

/// Renders `value` with exactly `decimals` fractional digits, rounding halves
/// away from zero.
pub fn format_fixed(value: f64, decimals: u32) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = (value * scale).round();
    if !scaled.is_finite() || scaled.abs() >= 1e30 {
        return format!("{:.*}", decimals as usize, value);
    }
    let negative = scaled < 0.0;
    let digits = (scaled.abs() as u128).to_string();
    let d = decimals as usize;
    let padded = if digits.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - d);
    let mut out = String::with_capacity(padded.len() + 2);
    if negative {
        out.push('-');
    }
    out.push_str(int_part);
    if d > 0 {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

/// `value` rounded half away from zero to `decimals` places.
pub fn round_to(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}
