//! Angles written as `pi/8`, `3pi/4`, `-2*pi/3` or plain decimals.

use std::f64::consts::PI;

use crate::error::{HarnessError, Result};

pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || HarnessError::Angle(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let value = match body.find("pi") {
        None => body.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let coeff = body[..at].trim_end_matches('*');
            let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| bad())? };
            let rest = &body[at + 2..];
            let den = match rest.strip_prefix('/') {
                Some(d) => d.parse::<f64>().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            if den == 0.0 {
                return Err(bad());
            }
            coeff * PI / den
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi/8").unwrap(), -PI / 8.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        for bad in ["", "pi/0", "tau", "pi8", "x/2"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }
}
