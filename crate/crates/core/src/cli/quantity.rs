//! Command-line numbers with optional SI units, converted to natural units
//! (rad/s for frequencies, energies, rates and temperatures; seconds for
//! times).

use std::fmt;

use crate::units::{hz, kelvin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Energies and angular frequencies: `Hz`, `kHz`, `MHz`, `GHz` (×2π) or `rad/s`.
    Frequency,
    /// Decay rates: `Hz` family (×2π) or `/s` (as is).
    Rate,
    /// `K`, `mK`, `uK`, or `rad/s`.
    Temperature,
    /// `s`, `ms`, `us`, `ns`.
    Time,
}

/// A parsed value together with how it was written.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub written: String,
    pub unit: Option<&'static str>,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Some(u) if self.written.trim() != format!("{}", self.value) => {
                write!(f, "{} -> {:e} {u}", self.written, self.value)
            }
            _ => write!(f, "{:e}", self.value),
        }
    }
}

fn split_number(s: &str) -> Option<(f64, &str)> {
    let s = s.trim();
    // Longest prefix that parses as a float.
    let mut best = None;
    for (i, _) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        if let Ok(v) = s[..i].parse::<f64>() {
            best = Some((v, s[i..].trim()));
        }
    }
    best
}

pub fn parse(s: &str, kind: Kind) -> Result<Quantity, String> {
    let (number, suffix) =
        split_number(s).ok_or_else(|| format!("`{s}` does not start with a number"))?;
    let (value, unit) = match (kind, suffix) {
        (_, "") => (number, None),
        (Kind::Frequency | Kind::Rate | Kind::Temperature, "rad/s") => (number, Some("rad/s")),
        (Kind::Frequency | Kind::Rate, "Hz") => (hz(number), Some("rad/s")),
        (Kind::Frequency | Kind::Rate, "kHz") => (hz(number * 1e3), Some("rad/s")),
        (Kind::Frequency | Kind::Rate, "MHz") => (hz(number * 1e6), Some("rad/s")),
        (Kind::Frequency | Kind::Rate, "GHz") => (hz(number * 1e9), Some("rad/s")),
        (Kind::Rate, "/s" | "1/s") => (number, Some("1/s")),
        (Kind::Temperature, "K") => (kelvin(number), Some("rad/s")),
        (Kind::Temperature, "mK") => (kelvin(number * 1e-3), Some("rad/s")),
        (Kind::Temperature, "uK") => (kelvin(number * 1e-6), Some("rad/s")),
        (Kind::Time, "s") => (number, Some("s")),
        (Kind::Time, "ms") => (number * 1e-3, Some("s")),
        (Kind::Time, "us") => (number * 1e-6, Some("s")),
        (Kind::Time, "ns") => (number * 1e-9, Some("s")),
        (_, other) => return Err(format!("unit `{other}` not accepted for a {kind:?} value")),
    };
    Ok(Quantity {
        value,
        written: s.trim().to_string(),
        unit,
    })
}

/// Like [`parse`], but a bare number is read in SI (Hz, kelvin) when `si`.
pub fn parse_in(s: &str, kind: Kind, si: bool) -> Result<Quantity, String> {
    let q = parse(s, kind)?;
    if !si || q.unit.is_some() {
        return Ok(q);
    }
    let bare = match kind {
        Kind::Frequency | Kind::Rate => format!("{}Hz", q.written),
        Kind::Temperature => format!("{}K", q.written),
        Kind::Time => format!("{}s", q.written),
    };
    let mut converted = parse(&bare, kind)?;
    converted.written = bare;
    Ok(converted)
}

pub fn frequency(s: &str) -> Result<Quantity, String> {
    parse(s, Kind::Frequency)
}

pub fn rate(s: &str) -> Result<Quantity, String> {
    parse(s, Kind::Rate)
}

pub fn temperature(s: &str) -> Result<Quantity, String> {
    parse(s, Kind::Temperature)
}

pub fn time(s: &str) -> Result<Quantity, String> {
    parse(s, Kind::Time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn units_convert() {
        assert_eq!(frequency("2.5").unwrap().value, 2.5);
        assert!((frequency("10.56MHz").unwrap().value - TAU * 10.56e6).abs() < 1e-6);
        assert!((frequency("1 GHz").unwrap().value - TAU * 1e9).abs() < 1e-3);
        assert!((temperature("20mK").unwrap().value - kelvin(0.02)).abs() < 1e-3);
        assert_eq!(rate("5e3/s").unwrap().value, 5e3);
        assert!((time("3us").unwrap().value - 3e-6).abs() < 1e-20);
        assert_eq!(frequency("1e-3").unwrap().value, 1e-3);
    }

    #[test]
    fn bare_numbers_follow_unit_system() {
        assert_eq!(parse_in("0.5", Kind::Temperature, false).unwrap().value, 0.5);
        let q = parse_in("0.5", Kind::Temperature, true).unwrap();
        assert!((q.value - kelvin(0.5)).abs() < 1e-3);
        assert_eq!(q.written, "0.5K");
        assert_eq!(parse_in("2rad/s", Kind::Rate, true).unwrap().value, 2.0);
    }

    #[test]
    fn bad_units_rejected() {
        assert!(temperature("3Hz").is_err());
        assert!(frequency("abc").is_err());
        assert!(time("4K").is_err());
    }
}
