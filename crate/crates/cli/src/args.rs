//! Flag value parsers. Every numeric flag accepts scientific notation
//! ("1e7", "2.5e3") as well as plain decimal.

use num_bigint::BigUint;

/// Exact arbitrary-precision integer from decimal or scientific notation.
pub fn parse_big_integer(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty value".into());
    }
    if !s.contains(['e', 'E', '.']) {
        return s
            .parse::<BigUint>()
            .map_err(|_| format!("invalid integer {s:?}"));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| format!("invalid exponent {e:?}"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("invalid number {s:?}"));
    }
    let shift = exp - frac_part.len() as i64;
    let base: BigUint = digits
        .parse()
        .map_err(|_| format!("invalid number {s:?}"))?;
    if shift >= 0 {
        Ok(base * BigUint::from(10u32).pow(shift as u32))
    } else {
        // the shift must absorb the fractional digits exactly
        let ten = BigUint::from(10u32).pow((-shift) as u32);
        if (&base % &ten) == BigUint::from(0u32) {
            Ok(base / ten)
        } else {
            Err(format!("{s:?} is not an integer"))
        }
    }
}

/// u64 from decimal or scientific notation.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let big = parse_big_integer(s)?;
    u64::try_from(&big).map_err(|_| format!("{s:?} is too large"))
}

pub fn parse_count_usize(s: &str) -> Result<usize, String> {
    let big = parse_big_integer(s)?;
    usize::try_from(&big).map_err(|_| format!("{s:?} is too large"))
}
