//! Decimal rendering with 17 significant digits, enough to round-trip any f64.

/// Formats `x` with 17 significant digits. Moderate magnitudes use positional
/// notation, everything else scientific. Both forms parse back bit-exactly.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // log10 can land one short of a power of ten; re-check the digit count
        if significant_digits(&s) > 17 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.16e}")
    }
}

fn significant_digits(s: &str) -> usize {
    s.chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count()
}
