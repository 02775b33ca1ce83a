//! Exact rationals for metrics and slack sequences.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

pub type Rat = Ratio<i64>;

/// Parses `"3/20"`, `"0.15"`, or `"2"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| format!("bad number {s:?}"))?
        };
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad number {s:?}"));
        }
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| format!("bad number {s:?}"))?;
        let frac = Rat::new(num, den);
        let whole = Rat::from_integer(whole);
        return Ok(if neg { whole - frac } else { whole + frac });
    }
    s.parse::<i64>()
        .map(Rat::from_integer)
        .map_err(|_| format!("bad number {s:?}"))
}

pub fn format_rat(r: &Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rat(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rat("3/20").unwrap(), Rat::new(3, 20));
        assert_eq!(parse_rat("0.15").unwrap(), Rat::new(3, 20));
        assert_eq!(parse_rat("-0.25").unwrap(), Rat::new(-1, 4));
        assert_eq!(parse_rat("2").unwrap(), Rat::from_integer(2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert_eq!(format_rat(&Rat::new(6, 40)), "3/20");
    }
}
