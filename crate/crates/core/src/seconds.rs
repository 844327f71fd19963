use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Nanoseconds per abstract cost unit (one unit models 0.1 s).
pub const NANOS_PER_UNIT: i64 = 100_000_000;

const NANOS_PER_SEC: f64 = 1e9;

/// Signed modeled time with nanosecond resolution.
///
/// Fixed-point so that sums of coefficients and attributed deltas are exact;
/// serialized as a JSON number of seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seconds(i64);

impl Seconds {
    pub const ZERO: Seconds = Seconds(0);

    pub const fn from_nanos(nanos: i64) -> Self {
        Seconds(nanos)
    }

    pub const fn nanos(self) -> i64 {
        self.0
    }

    /// Rounds to the nearest nanosecond.
    pub fn from_secs_f64(secs: f64) -> Self {
        Seconds((secs * NANOS_PER_SEC).round() as i64)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / NANOS_PER_SEC
    }

    pub const fn from_units(units: u64) -> Self {
        Seconds(units as i64 * NANOS_PER_UNIT)
    }

    pub const fn abs(self) -> Self {
        Seconds(self.0.abs())
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let secs = self.as_secs_f64();
        let sign = if f.sign_plus() && self.0 >= 0 { "+" } else { "" };
        let text = match f.precision() {
            Some(p) => format!("{sign}{secs:.p$}"),
            None => format!("{sign}{secs}"),
        };
        // Numbers align right unless asked otherwise.
        match (f.width(), f.align()) {
            (None, _) => f.write_str(&text),
            (Some(w), Some(fmt::Alignment::Left)) => write!(f, "{text:<w$}"),
            (Some(w), Some(fmt::Alignment::Center)) => write!(f, "{text:^w$}"),
            (Some(w), _) => write!(f, "{text:>w$}"),
        }
    }
}

impl Add for Seconds {
    type Output = Seconds;
    fn add(self, rhs: Seconds) -> Seconds {
        Seconds(self.0 + rhs.0)
    }
}

impl AddAssign for Seconds {
    fn add_assign(&mut self, rhs: Seconds) {
        self.0 += rhs.0;
    }
}

impl Sub for Seconds {
    type Output = Seconds;
    fn sub(self, rhs: Seconds) -> Seconds {
        Seconds(self.0 - rhs.0)
    }
}

impl SubAssign for Seconds {
    fn sub_assign(&mut self, rhs: Seconds) {
        self.0 -= rhs.0;
    }
}

impl Neg for Seconds {
    type Output = Seconds;
    fn neg(self) -> Seconds {
        Seconds(-self.0)
    }
}

impl Sum for Seconds {
    fn sum<I: Iterator<Item = Seconds>>(iter: I) -> Seconds {
        iter.fold(Seconds::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Seconds> for Seconds {
    fn sum<I: Iterator<Item = &'a Seconds>>(iter: I) -> Seconds {
        iter.copied().sum()
    }
}

impl Serialize for Seconds {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_secs_f64())
    }
}

impl<'de> Deserialize<'de> for Seconds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Seconds::from_secs_f64)
    }
}
