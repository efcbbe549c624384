use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Ambient dimension; only 1, 2 and 3 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::domain("dimension", d as f64, "{1, 2, 3}")),
        }
    }

    pub fn get(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Surface measure of the unit sphere in R^d: 2, 2π, 4π.
    pub fn sphere_area(self) -> f64 {
        match self {
            Dim::One => 2.0,
            Dim::Two => 2.0 * PI,
            Dim::Three => 4.0 * PI,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Point in R^d stored in three slots; coordinates beyond `d` stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; 3]);

    pub fn on_axis(x: f64) -> Self {
        Point([x, 0.0, 0.0])
    }

    pub fn norm(&self) -> f64 {
        let [a, b, c] = self.0;
        (a * a + b * b + c * c).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    /// Mirror image of `self` through `center`.
    pub fn reflect_through(&self, center: &Point) -> Point {
        *center * 2.0 - *self
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(Dim::new(2).unwrap().get(), 2);
        assert!(Dim::new(0).is_err());
        assert!(Dim::new(4).is_err());
        assert_eq!(Dim::Three.sphere_area(), 4.0 * PI);
    }

    #[test]
    fn reflection() {
        let c = Point::on_axis(1.0);
        let p = Point([1.5, -2.0, 0.0]);
        assert_eq!(p.reflect_through(&c), Point([0.5, 2.0, 0.0]));
    }
}
