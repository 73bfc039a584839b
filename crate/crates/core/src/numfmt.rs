//! Number formatting for text outputs.

/// Formats `x` like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// trimmed, exponent notation outside `[1e-5, 10^sig)`.
///
/// With `sig = 17` every finite `f64` survives a text round-trip exactly.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_sig(500.0, 17), "500");
        assert_eq!(format_sig(0.1, 17), "0.10000000000000001");
        assert_eq!(format_sig(-2.5, 17), "-2.5");
        assert_eq!(format_sig(1e-7, 17), "9.9999999999999995e-08");
        assert_eq!(format_sig(1.5e20, 17), "1.5e+20");
        assert_eq!(format_sig(0.0, 10), "0");
        assert_eq!(format_sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(format_sig(123456.789, 4), "1.235e+05");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[
            std::f64::consts::PI,
            1e-300,
            -7.123456789012345e150,
            0.30000000000000004,
            f64::MIN_POSITIVE,
            f64::MAX,
        ] {
            let s = format_sig(x, 17);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
