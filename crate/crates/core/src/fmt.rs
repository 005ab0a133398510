//! `%g`-style float formatting for the text and CSV outputs.

use alloc::format;
use alloc::string::String;

/// Formats `v` with `digits` significant digits, trailing zeros trimmed,
/// switching to exponent notation outside `1e-5 <= |v| < 10^digits`.
pub fn sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return String::from("0");
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // Rounding to `digits` first fixes the exponent (9.99.. may round up).
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!(
            "{mantissa}e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, v);
        String::from(trim_zeros(&fixed))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
