use crate::geometry::Point;

/// A measurable set given by its membership predicate.
pub trait Region: Sync {
    fn contains(&self, p: &Point) -> bool;
}

impl<F> Region for F
where
    F: Fn(&Point) -> bool + Sync,
{
    fn contains(&self, p: &Point) -> bool {
        self(p)
    }
}

/// Open ball `{z : |z - center| < radius}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Region for Ball {
    fn contains(&self, p: &Point) -> bool {
        p.dist(&self.center) < self.radius
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Complement<R>(pub R);

impl<R: Region> Region for Complement<R> {
    fn contains(&self, p: &Point) -> bool {
        !self.0.contains(p)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmptySet;

impl Region for EmptySet {
    fn contains(&self, _: &Point) -> bool {
        false
    }
}

/// `{z : inner ≤ |z - center| < outer}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

impl Region for Annulus {
    fn contains(&self, p: &Point) -> bool {
        let r = p.dist(&self.center);
        r >= self.inner && r < self.outer
    }
}

/// The half of an [`Annulus`] with non-negative first coordinate relative to
/// its center. By isotropy it carries exactly half the annulus mass of any
/// rotation invariant measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfAnnulus {
    pub annulus: Annulus,
}

impl Region for HalfAnnulus {
    fn contains(&self, p: &Point) -> bool {
        self.annulus.contains(p) && p.first() - self.annulus.center.first() >= 0.0
    }
}
