//! Exact half-integer quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A quantum number that is an integer or half an odd integer, stored as
/// twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn is_half_odd(self) -> bool {
        !self.is_integer()
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Integer value, if the number is integral.
    pub fn as_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    /// `2j + 1`, the multiplicity of an angular momentum `j`.
    pub fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// True when `m` is an allowed projection of `self`.
    pub fn admits_projection(self, m: HalfInt) -> bool {
        let diff = self.0 - m.0;
        self.0 >= 0 && diff >= 0 && m.0 >= -self.0 && diff % 2 == 0
    }

    /// Projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + ExactSizeIterator + Clone {
        let j = self.0;
        (0..(j + 1).max(0)).map(move |k| HalfInt(2 * k - j))
    }

    /// Check that `m` is a projection of `self`.
    pub fn check_projection(self, m: HalfInt) -> Result<(), Error> {
        if self.0 < 0 {
            return Err(Error::domain(format!("negative angular momentum {self}")));
        }
        if !self.admits_projection(m) {
            return Err(Error::domain(format!("projection {m} out of range for j = {self}")));
        }
        Ok(())
    }
}

/// Triangle rule `|a - b| <= c <= a + b` with `a + b + c` integral.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.0, b.0, c.0);
    a >= 0 && b >= 0 && c >= 0 && c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::from_int(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-2"`, `"7/2"`, `"-1/2"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::parse(format!("not a half-integer: {s:?}"));
        match s.split_once('/') {
            None => s.parse::<i32>().map(HalfInt::from_int).map_err(|_| bad()),
            Some((num, den)) => {
                let num: i32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "1" => Ok(HalfInt::from_int(num)),
                    "2" => Ok(HalfInt(num)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i32),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(HalfInt::from_int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["0", "3", "-2", "7/2", "-1/2"] {
            let h: HalfInt = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert_eq!("6/1".parse::<HalfInt>().unwrap(), HalfInt::from_int(6));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
        assert!("".parse::<HalfInt>().is_err());
    }

    #[test]
    fn projections_and_parity() {
        let f = HalfInt::from_twice(3);
        let ms: Vec<_> = f.projections().map(|m| m.to_string()).collect();
        assert_eq!(ms, ["-3/2", "-1/2", "1/2", "3/2"]);
        assert!(f.admits_projection(HalfInt::from_twice(-3)));
        assert!(!f.admits_projection(HalfInt::from_int(1)));
        assert!(!f.admits_projection(HalfInt::from_twice(5)));
        assert!(HalfInt::from_int(1).check_projection(HalfInt::from_int(2)).is_err());
    }

    #[test]
    fn triangle_rule() {
        let h = HalfInt::from_twice;
        assert!(triangle(h(2), h(2), h(0)));
        assert!(triangle(h(1), h(2), h(3)));
        assert!(!triangle(h(1), h(2), h(2)));
        assert!(!triangle(h(2), h(2), h(6)));
    }

    #[test]
    fn serde_accepts_strings_and_ints() {
        let v: Vec<HalfInt> = serde_json::from_str(r#"["7/2", 3, "-1/2"]"#).unwrap();
        assert_eq!(v, [HalfInt::from_twice(7), HalfInt::from_int(3), HalfInt::from_twice(-1)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["7/2","3","-1/2"]"#);
    }
}
