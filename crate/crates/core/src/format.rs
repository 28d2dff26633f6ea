//! Byte-stable number formatting shared by every text output.

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() || digits == 0 {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().unwrap_or(v)
}

/// Formats with 12 significant digits, shortest round-trip spelling of the
/// rounded value. Very small or very large magnitudes use exponent form.
pub fn fmt_num(v: f64) -> String {
    let r = round_sig(v, 12);
    if r == 0.0 {
        return "0".into();
    }
    if !r.is_finite() {
        return if r.is_nan() { "nan".into() } else if r > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = r.abs();
    if !(1e-6..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// The message of a JSON error without serde's trailing position, which
/// callers report separately.
pub fn json_message(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    msg.strip_suffix(&suffix).map_or(msg.clone(), str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-4.0), "-4");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 + 1e-14), "1");
        assert_eq!(fmt_num(1.25e-9), "1.25e-9");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding_is_idempotent() {
        for v in [0.1, 1e-7, 123456.789012345, std::f64::consts::PI] {
            let r = round_sig(v, 12);
            assert_eq!(round_sig(r, 12), r);
        }
    }
}
