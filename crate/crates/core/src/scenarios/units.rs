//! Physical quantities written as `"<number> <unit>"` strings.
//!
//! Rates must say whether they are angular (`Hz_angular`, rad/s) or cyclic
//! (`Hz_cyclic`, multiplied by 2 pi on read), so a bare `Hz` is rejected.

use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Second,
    Millisecond,
    Microsecond,
    Nanosecond,
    Picosecond,
    HzAngular,
    KHzAngular,
    MHzAngular,
    GHzAngular,
    HzCyclic,
    KHzCyclic,
    MHzCyclic,
    GHzCyclic,
    Meter,
    Centimeter,
    Millimeter,
    Micrometer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    Rate,
    Length,
}

const TABLE: &[(Unit, &str, Dimension, f64)] = &[
    (Unit::Second, "s", Dimension::Time, 1.0),
    (Unit::Millisecond, "ms", Dimension::Time, 1e-3),
    (Unit::Microsecond, "us", Dimension::Time, 1e-6),
    (Unit::Nanosecond, "ns", Dimension::Time, 1e-9),
    (Unit::Picosecond, "ps", Dimension::Time, 1e-12),
    (Unit::HzAngular, "Hz_angular", Dimension::Rate, 1.0),
    (Unit::KHzAngular, "kHz_angular", Dimension::Rate, 1e3),
    (Unit::MHzAngular, "MHz_angular", Dimension::Rate, 1e6),
    (Unit::GHzAngular, "GHz_angular", Dimension::Rate, 1e9),
    (
        Unit::HzCyclic,
        "Hz_cyclic",
        Dimension::Rate,
        std::f64::consts::TAU,
    ),
    (
        Unit::KHzCyclic,
        "kHz_cyclic",
        Dimension::Rate,
        std::f64::consts::TAU * 1e3,
    ),
    (
        Unit::MHzCyclic,
        "MHz_cyclic",
        Dimension::Rate,
        std::f64::consts::TAU * 1e6,
    ),
    (
        Unit::GHzCyclic,
        "GHz_cyclic",
        Dimension::Rate,
        std::f64::consts::TAU * 1e9,
    ),
    (Unit::Meter, "m", Dimension::Length, 1.0),
    (Unit::Centimeter, "cm", Dimension::Length, 1e-2),
    (Unit::Millimeter, "mm", Dimension::Length, 1e-3),
    (Unit::Micrometer, "um", Dimension::Length, 1e-6),
];

impl Unit {
    fn entry(self) -> &'static (Unit, &'static str, Dimension, f64) {
        TABLE
            .iter()
            .find(|e| e.0 == self)
            .expect("every unit is tabulated")
    }

    pub fn symbol(self) -> &'static str {
        self.entry().1
    }

    pub fn dimension(self) -> Dimension {
        self.entry().2
    }

    /// Multiplier to SI (s, rad/s, m).
    pub fn to_si(self) -> f64 {
        self.entry().3
    }

    /// The most natural unit of a dimension for an SI value.
    fn si(dim: Dimension) -> Unit {
        match dim {
            Dimension::Time => Unit::Second,
            Dimension::Rate => Unit::HzAngular,
            Dimension::Length => Unit::Meter,
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TABLE.iter().find(|e| e.1 == s).map(|e| e.0).ok_or_else(|| {
            let known: Vec<&str> = TABLE.iter().map(|e| e.1).collect();
            Error::Config(format!(
                "unknown unit `{s}`; expected one of {}",
                known.join(", ")
            ))
        })
    }
}

/// Marker types fixing the dimension of a [`Quantity`].
pub trait Dim {
    const DIM: Dimension;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeDim;
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateDim;
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthDim;

impl Dim for TimeDim {
    const DIM: Dimension = Dimension::Time;
}
impl Dim for RateDim {
    const DIM: Dimension = Dimension::Rate;
}
impl Dim for LengthDim {
    const DIM: Dimension = Dimension::Length;
}

/// A number with an explicit unit, remembered as written.
#[derive(Debug, Clone, Copy)]
pub struct Quantity<D> {
    value: f64,
    unit: Unit,
    _dim: PhantomData<D>,
}

pub type Time = Quantity<TimeDim>;
pub type Rate = Quantity<RateDim>;
pub type Length = Quantity<LengthDim>;

impl<D> PartialEq for Quantity<D> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.unit == other.unit
    }
}

impl<D: Dim> Quantity<D> {
    pub fn new(value: f64, unit: Unit) -> Result<Self> {
        if unit.dimension() != D::DIM {
            return Err(Error::Config(format!(
                "unit `{}` is a {:?}, expected a {:?}",
                unit.symbol(),
                unit.dimension(),
                D::DIM
            )));
        }
        if !value.is_finite() {
            return Err(Error::Config("quantity must be finite".into()));
        }
        Ok(Self {
            value,
            unit,
            _dim: PhantomData,
        })
    }

    /// An SI value written in the base unit of the dimension.
    pub fn from_si(value: f64) -> Self {
        Self {
            value,
            unit: Unit::si(D::DIM),
            _dim: PhantomData,
        }
    }

    pub fn si(&self) -> f64 {
        self.value * self.unit.to_si()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }
}

impl<D: Dim> FromStr for Quantity<D> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let (Some(number), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Config(format!(
                "quantity `{s}` must be `<number> <unit>`, e.g. `300 ns`"
            )));
        };
        let value: f64 = number
            .parse()
            .map_err(|_| Error::Config(format!("`{number}` is not a number")))?;
        Self::new(value, unit.parse()?)
    }
}

impl<D> fmt::Display for Quantity<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{:?}` on f64 is the shortest string that parses back exactly.
        write!(f, "{:?} {}", self.value, self.unit.symbol())
    }
}

impl<D> Serialize for Quantity<D> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, D: Dim> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(d: De) -> std::result::Result<Self, De::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}
