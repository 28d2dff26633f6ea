//! Parsers for the small textual notations used on command lines and in
//! experiment specs: fractions, powers of two, lists and schedules.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("not a number: {0:?}")]
    Number(String),
    #[error("{0}")]
    Syntax(String),
    #[error("out of range: {0}")]
    Range(String),
}

/// Parses a real written as a decimal, a fraction `p/q` or a power `b^e`.
pub fn parse_real(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    let bad = || ParseError::Number(s.to_string());
    let v = if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0.0 {
            return Err(ParseError::Range(format!("zero denominator in {s:?}")));
        }
        p / q
    } else if let Some((b, e)) = t.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let e: i32 = e.trim().parse().map_err(|_| bad())?;
        b.powi(e)
    } else {
        t.parse().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Parses a strictly positive real.
pub fn parse_positive(s: &str) -> Result<f64, ParseError> {
    let v = parse_real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ParseError::Range(format!("{s:?} must be positive")))
    }
}

/// Comma-separated reals. The empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, ParseError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_real).collect()
}

/// A scale list: either a comma list or `b^e1..b^e2`, expanding to every
/// integer exponent between `e1` and `e2` inclusive, in the written order.
pub fn parse_scales(s: &str) -> Result<Vec<f64>, ParseError> {
    if let Some((lo, hi)) = s.split_once("..") {
        let split = |part: &str| -> Result<(f64, i32), ParseError> {
            let (b, e) = part
                .trim()
                .split_once('^')
                .ok_or_else(|| ParseError::Syntax(format!("range end {part:?} is not of the form b^e")))?;
            let b: f64 = b.trim().parse().map_err(|_| ParseError::Number(part.to_string()))?;
            let e: i32 = e.trim().parse().map_err(|_| ParseError::Number(part.to_string()))?;
            Ok((b, e))
        };
        let (b1, e1) = split(lo)?;
        let (b2, e2) = split(hi)?;
        if b1 != b2 {
            return Err(ParseError::Syntax(format!("range {s:?} mixes bases {b1} and {b2}")));
        }
        if !(b1 > 0.0) || b1 == 1.0 {
            return Err(ParseError::Range(format!("base {b1} cannot produce a scale range")));
        }
        if (i64::from(e1) - i64::from(e2)).abs() > 64 {
            return Err(ParseError::Range(format!("range {s:?} is too long")));
        }
        let step = if e2 >= e1 { 1 } else { -1 };
        let mut out = Vec::new();
        let mut e = e1;
        loop {
            out.push(b1.powi(e));
            if e == e2 {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    let v = parse_list(s)?;
    if v.is_empty() {
        return Err(ParseError::Syntax("empty scale list".into()));
    }
    Ok(v)
}

/// A slit-length schedule: a comma list, `harmonic` (`r_i = 1/sqrt(i+2)`)
/// or `const:<r>`. Named schedules are expanded to `levels` entries; a list
/// is returned as written.
pub fn parse_schedule(s: &str, levels: usize) -> Result<Vec<f64>, ParseError> {
    let t = s.trim();
    if t == "harmonic" {
        return Ok((0..levels).map(|i| 1.0 / ((i + 2) as f64).sqrt()).collect());
    }
    if let Some(v) = t.strip_prefix("const:") {
        let r = parse_real(v)?;
        return Ok(vec![r; levels]);
    }
    parse_list(t)
}

/// A pair `x,y`.
pub fn parse_point(s: &str) -> Result<[f64; 2], ParseError> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [x, y] => Ok([*x, *y]),
        _ => Err(ParseError::Syntax(format!("expected `x,y`, got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_real("2^-3").unwrap(), 0.125);
        assert_eq!(parse_real(" 0.25 ").unwrap(), 0.25);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("inf").is_err());
        assert!(parse_positive("0").is_err());
    }

    #[test]
    fn scale_ranges() {
        assert_eq!(
            parse_scales("2^-3..2^-5").unwrap(),
            vec![0.125, 0.0625, 0.03125]
        );
        assert_eq!(parse_scales("0.5,0.25").unwrap(), vec![0.5, 0.25]);
        assert!(parse_scales("2^-3..3^-5").is_err());
        assert!(parse_scales("2^-2147483648..2^2147483647").is_err());
        assert!(parse_scales("").is_err());
    }

    #[test]
    fn schedules() {
        let h = parse_schedule("harmonic", 3).unwrap();
        assert!((h[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((h[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(parse_schedule("0.5,0.5", 7).unwrap(), vec![0.5, 0.5]);
        assert_eq!(parse_schedule("const:1/2", 2).unwrap(), vec![0.5, 0.5]);
        assert_eq!(parse_schedule("", 0).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0.5,1/4").unwrap(), [0.5, 0.25]);
        assert!(parse_point("1").is_err());
    }
}
