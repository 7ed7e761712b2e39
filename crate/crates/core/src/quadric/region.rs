//! Exponent regions in the `(1/p, 1/r)` square, with exact rational membership.

use std::fmt;

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// A point `(1/p, 1/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(Rational::new(xn, xd), Rational::new(yn, yd))
    }

    pub fn to_f64(self) -> (f64, f64) {
        let f = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
        (f(self.x), f(self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `a x + b y <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    fn slack(&self, p: Point) -> Rational {
        self.c - (self.a * p.x + self.b * p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Vertex,
    Boundary,
    Inside,
    Outside,
}

impl Location {
    pub fn is_contained(self) -> bool {
        self != Location::Outside
    }

    pub fn label(self) -> &'static str {
        match self {
            Location::Vertex => "vertex",
            Location::Boundary => "boundary",
            Location::Inside => "inside",
            Location::Outside => "outside",
        }
    }
}

/// A closed convex polygon in `[0,1]^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentRegion {
    vertices: Vec<Point>,
    halfplanes: Vec<HalfPlane>,
}

fn cross(o: Point, a: Point, b: Point) -> Rational {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise hull without collinear points (monotone chain).
fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let zero = Rational::from_integer(0);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= zero {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= zero {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl ExponentRegion {
    pub fn from_points(points: &[Point]) -> Self {
        let vertices = convex_hull(points);
        let n = vertices.len();
        let halfplanes = (0..n)
            .map(|i| {
                let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                // interior lies to the left of p -> q
                let a = q.y - p.y;
                let b = p.x - q.x;
                HalfPlane {
                    a,
                    b,
                    c: a * p.x + b * p.y,
                }
            })
            .collect();
        ExponentRegion {
            vertices,
            halfplanes,
        }
    }

    /// Hull vertices, counter-clockwise from the lowest-leftmost point.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn locate(&self, point: Point) -> Location {
        if self.vertices.contains(&point) {
            return Location::Vertex;
        }
        let zero = Rational::from_integer(0);
        let mut on_edge = false;
        for h in &self.halfplanes {
            let s = h.slack(point);
            if s < zero {
                return Location::Outside;
            }
            on_edge |= s == zero;
        }
        if on_edge {
            Location::Boundary
        } else {
            Location::Inside
        }
    }

    pub fn contains(&self, point: Point) -> bool {
        self.locate(point).is_contained()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as i64;
        let sx = self.vertices.iter().fold(Rational::from_integer(0), |a, p| a + p.x);
        let sy = self.vertices.iter().fold(Rational::from_integer(0), |a, p| a + p.y);
        Point::new(sx / n, sy / n)
    }
}

/// The critical vertex `((d^2-2d+2)/(d(d-1)), 1/(d-1))`.
pub fn critical_exponents(d: usize) -> Point {
    let d = d as i64;
    Point::from_ints(d * d - 2 * d + 2, d * (d - 1), 1, d - 1)
}

/// The hull of (0,0), (0,1), (1,1) with the two hyperbolic vertices, or with
/// `(d/(d+1), 1/(d+1))` otherwise.
pub fn region_for(d: usize, hyperbolic: bool) -> ExponentRegion {
    assert!(d >= 2, "dimension must be at least 2");
    let di = d as i64;
    let mut points = vec![
        Point::from_ints(0, 1, 0, 1),
        Point::from_ints(0, 1, 1, 1),
        Point::from_ints(1, 1, 1, 1),
    ];
    if hyperbolic {
        points.push(critical_exponents(d));
        points.push(Point::from_ints(di - 2, di - 1, di - 2, di * (di - 1)));
    } else {
        points.push(Point::from_ints(di, di + 1, 1, di + 1));
    }
    ExponentRegion::from_points(&points)
}

pub fn region_contains(region: &ExponentRegion, point: Point) -> bool {
    region.contains(point)
}
