//! SPICE numeric literals with magnitude suffixes.

use super::NetlistError;

/// Magnitude suffixes in match order. `meg` must precede `m`.
pub const SUFFIXES: &[(&str, f64)] = &[
    ("meg", 1e6),
    ("f", 1e-15),
    ("p", 1e-12),
    ("n", 1e-9),
    ("u", 1e-6),
    ("m", 1e-3),
    ("k", 1e3),
    ("g", 1e9),
    ("t", 1e12),
];

/// Parses a SPICE value such as `9.3k`, `2meg`, `1e-14` or `10kOhm`.
///
/// Letters after the numeral select a multiplier from [`SUFFIXES`]; any
/// letters that follow (a unit name, typically) are ignored. Letters that
/// are not a known suffix are ignored entirely, so `10V` is `10`.
pub fn parse_value(token: &str) -> Result<f64, NetlistError> {
    let bytes = token.as_bytes();
    let mut end = 0;
    if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
        end += 1;
    }
    let int_start = end;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    let mut digits = end - int_start;
    if end < bytes.len() && bytes[end] == b'.' {
        end += 1;
        let frac_start = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        digits += end - frac_start;
    }
    if digits == 0 {
        return Err(NetlistError::bad_value(token));
    }
    // Exponent only when digits follow, so `2e` stays a plain 2.
    if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
        let mut k = end + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        let exp_digits = k;
        while k < bytes.len() && bytes[k].is_ascii_digit() {
            k += 1;
        }
        if k > exp_digits {
            end = k;
        }
    }
    let numeral: f64 = token[..end]
        .parse()
        .map_err(|_| NetlistError::bad_value(token))?;
    let rest = &token[end..];
    if !rest.bytes().all(|b| b.is_ascii_alphabetic()) {
        return Err(NetlistError::bad_value(token));
    }
    Ok(numeral * suffix_multiplier(rest))
}

fn suffix_multiplier(rest: &str) -> f64 {
    let lower = rest.to_ascii_lowercase();
    SUFFIXES
        .iter()
        .find(|(s, _)| lower.starts_with(s))
        .map_or(1.0, |&(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_and_table_values() {
        assert_eq!(parse_value("9.3k").unwrap(), 9300.0);
        assert_eq!(parse_value("9.3kOhm").unwrap(), 9300.0);
        assert_eq!(parse_value("1").unwrap(), 1.0);
        assert_eq!(parse_value("2meg").unwrap(), 2.0e6);
        assert_eq!(parse_value("2MEG").unwrap(), 2.0e6);
        assert_eq!(parse_value("2m").unwrap(), 2.0e-3);
        assert_eq!(parse_value("1m").unwrap(), 1e-3);
        assert_eq!(parse_value("10u").unwrap(), 10.0 * 1e-6);
        assert_eq!(parse_value("1e-14").unwrap(), 1e-14);
        assert_eq!(parse_value("-.5").unwrap(), -0.5);
        assert_eq!(parse_value("10V").unwrap(), 10.0);
        assert_eq!(parse_value("2e").unwrap(), 2.0);
    }

    #[test]
    fn malformed() {
        for bad in ["", "k", "abc", "1.2.3", "--1", "1k5", "."] {
            assert!(parse_value(bad).is_err(), "{bad} should fail");
        }
    }

    proptest! {
        #[test]
        fn suffix_table_is_total(mantissa in 0u32..1_000_000, scale in 0u32..4, idx in 0usize..SUFFIXES.len(), upper: bool, unit: bool) {
            let x = mantissa as f64 / 10f64.powi(scale as i32);
            let (s, mult) = SUFFIXES[idx];
            let s = if upper { s.to_ascii_uppercase() } else { s.to_string() };
            let unit = if unit { "Ohm" } else { "" };
            let token = format!("{x}{s}{unit}");
            let got = parse_value(&token).unwrap();
            prop_assert_eq!(got, x * mult);
        }
    }
}
