//! Scalar quantities in scenario files: a bare number in the base unit, or a
//! string such as `"20 km/h"`, `"90 deg"` or `"10 min"`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Speed,
    Length,
    Time,
    Angle,
}

impl Dimension {
    fn factor(self, unit: &str) -> Option<f64> {
        let f = match (self, unit) {
            (Dimension::Speed, "m/s") => 1.0,
            (Dimension::Speed, "km/h" | "kph") => 1.0 / 3.6,
            (Dimension::Speed, "kn" | "kt" | "knot" | "knots") => 1852.0 / 3600.0,
            (Dimension::Length, "m") => 1.0,
            (Dimension::Length, "cm") => 0.01,
            (Dimension::Length, "km") => 1000.0,
            (Dimension::Time, "s") => 1.0,
            (Dimension::Time, "min") => 60.0,
            (Dimension::Time, "h") => 3600.0,
            (Dimension::Angle, "deg" | "°") => std::f64::consts::PI / 180.0,
            (Dimension::Angle, "rad") => 1.0,
            _ => return None,
        };
        Some(f)
    }

    /// Factor applied to a bare number. Angles default to degrees.
    fn bare_factor(self) -> f64 {
        match self {
            Dimension::Angle => std::f64::consts::PI / 180.0,
            _ => 1.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Speed => "speed",
            Dimension::Length => "length",
            Dimension::Time => "duration",
            Dimension::Angle => "angle",
        }
    }
}

/// Parses `"<number> <unit>"` (the space is optional) into SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let text = text.trim();
    let split = text
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{text}` is not a {}", dim.name())))?;
    let unit = unit.trim();
    let factor = if unit.is_empty() {
        dim.bare_factor()
    } else {
        dim.factor(unit)
            .ok_or_else(|| Error::Parse(format!("unknown {} unit `{unit}` in `{text}`", dim.name())))?
    };
    Ok(value * factor)
}

macro_rules! quantity {
    ($name:ident, $dim:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name(pub f64);

        impl $name {
            pub fn si(self) -> f64 {
                self.0
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = f64;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a number or a string with a {} unit", $dim.name())
                    }
                    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
                        Ok(v * $dim.bare_factor())
                    }
                    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
                        Ok(v as f64 * $dim.bare_factor())
                    }
                    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
                        Ok(v as f64 * $dim.bare_factor())
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
                        parse_quantity(v, $dim).map_err(E::custom)
                    }
                }
                d.deserialize_any(V).map($name)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_f64(self.0 / $dim.bare_factor())
            }
        }
    };
}

quantity!(Speed, Dimension::Speed, "Speed in m/s.");
quantity!(Length, Dimension::Length, "Length in m.");
quantity!(Seconds, Dimension::Time, "Duration in s.");
quantity!(Angle, Dimension::Angle, "Angle in radians; bare numbers are degrees.");
