use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, Rational};

/// Lower convex polygon with vertices at strictly increasing x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(Rational, Rational)>,
}

/// Slopes in strictly increasing order with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlopeData {
    pairs: Vec<(Rational, usize)>,
}

/// JSON form of slope data: `[[num, den, mult], ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlopeTriples(pub Vec<(i64, i64, usize)>);

fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn cross(o: (Rational, Rational), a: (Rational, Rational), b: (Rational, Rational)) -> Rational {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl NewtonPolygon {
    /// Lower convex hull of the given points, keeping only break points.
    pub fn lower_hull(points: &[(Rational, Rational)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup_by(|b, a| a.0 == b.0);
        let mut hull: Vec<(Rational, Rational)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= rat(0) {
                hull.pop();
            }
            hull.push(p);
        }
        NewtonPolygon { vertices: hull }
    }

    /// Polygon with one segment per slope, starting at the origin.
    pub fn from_slopes(s: &SlopeData) -> Self {
        let mut v = vec![(rat(0), rat(0))];
        let (mut x, mut y) = (rat(0), rat(0));
        for &(a, m) in s.pairs() {
            x += rat(m as i64);
            y += a * rat(m as i64);
            v.push((x, y));
        }
        NewtonPolygon { vertices: v }
    }

    pub fn vertices(&self) -> &[(Rational, Rational)] {
        &self.vertices
    }

    /// Height of the polygon above x, None outside its range.
    pub fn height_at(&self, x: Rational) -> Option<Rational> {
        let v = &self.vertices;
        if v.is_empty() || x < v[0].0 || x > v[v.len() - 1].0 {
            return None;
        }
        for w in v.windows(2) {
            if x >= w[0].0 && x <= w[1].0 {
                let t = (x - w[0].0) / (w[1].0 - w[0].0);
                return Some(w[0].1 + t * (w[1].1 - w[0].1));
            }
        }
        Some(v[0].1)
    }

    /// Segment slopes with integer horizontal lengths.
    pub fn slopes(&self) -> SlopeData {
        let pairs = self
            .vertices
            .windows(2)
            .map(|w| {
                let len = w[1].0 - w[0].0;
                ((w[1].1 - w[0].1) / len, len.to_integer() as usize)
            })
            .collect();
        SlopeData { pairs }
    }

    pub fn endpoint(&self) -> (Rational, Rational) {
        self.vertices.last().copied().unwrap_or((rat(0), rat(0)))
    }

    /// Vertex list as strings "(x,y)".
    pub fn render(&self) -> String {
        self.vertices.iter().map(|(x, y)| format!("({},{})", fmt_q(*x), fmt_q(*y))).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

pub fn fmt_q(q: Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Newton polygon of a polynomial given leading coefficient first, using the
/// points (i, nu(c_i)). Segment slopes are then the valuations of the roots.
pub fn newton_polygon_of_poly(coeffs: &[PadicScalar]) -> Result<NewtonPolygon> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial".into()));
    }
    if coeffs[0].is_zero() {
        return Err(Error::PrecisionInsufficient("leading coefficient is zero to precision".into()));
    }
    let last = coeffs.len() - 1;
    if coeffs[last].is_zero() {
        return Err(Error::PrecisionInsufficient(format!(
            "constant coefficient is zero to precision O(p^{})",
            coeffs[last].precision()
        )));
    }
    let pts: Vec<(Rational, Rational)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (rat(i as i64), rat(v)))).collect();
    let poly = NewtonPolygon::lower_hull(&pts);
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            let h = poly.height_at(rat(i as i64)).expect("inside the hull");
            if rat(c.precision()) < h {
                return Err(Error::PrecisionInsufficient(format!(
                    "coefficient {i} is O(p^{}) below the hull height {}",
                    c.precision(),
                    fmt_q(h)
                )));
            }
        }
    }
    Ok(poly)
}

impl SlopeData {
    /// Collects a multiset of (slope, multiplicity) pairs, merging equal slopes.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rational, usize)>) -> Self {
        let mut v: Vec<(Rational, usize)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        v.sort();
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for (a, m) in v {
            match out.last_mut() {
                Some(last) if last.0 == a => last.1 += m,
                _ => out.push((a, m)),
            }
        }
        SlopeData { pairs: out }
    }

    pub fn pairs(&self) -> &[(Rational, usize)] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.pairs.iter().map(|p| p.1).sum()
    }

    /// t_N: sum of slope times multiplicity.
    pub fn newton_number(&self) -> Rational {
        self.pairs.iter().map(|&(a, m)| a * rat(m as i64)).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_pairs(self.pairs.iter().chain(other.pairs.iter()).copied())
    }

    pub fn negate(&self) -> Self {
        Self::from_pairs(self.pairs.iter().map(|&(a, m)| (-a, m)))
    }

    pub fn is_isoclinic(&self) -> bool {
        self.pairs.len() <= 1
    }

    /// Each slope listed with its multiplicity, increasing.
    pub fn expanded(&self) -> Vec<Rational> {
        self.pairs.iter().flat_map(|&(a, m)| std::iter::repeat_n(a, m)).collect()
    }

    /// lcm of the slope denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.pairs.iter().fold(1, |acc, (a, _)| acc.lcm(a.denom()))
    }

    pub fn to_triples(&self) -> SlopeTriples {
        SlopeTriples(self.pairs.iter().map(|&(a, m)| (*a.numer(), *a.denom(), m)).collect())
    }

    pub fn from_triples(t: &SlopeTriples) -> Result<Self> {
        for (i, &(_, den, mult)) in t.0.iter().enumerate() {
            if den <= 0 {
                return Err(Error::validation(format!("[{i}]"), "slope denominator must be positive"));
            }
            if mult == 0 {
                return Err(Error::validation(format!("[{i}]"), "multiplicity must be positive"));
            }
        }
        Ok(Self::from_pairs(t.0.iter().map(|&(n, d, m)| (Rational::new(n, d), m))))
    }

    /// "0 (×1), 1 (×1)".
    pub fn render(&self) -> String {
        self.pairs.iter().map(|&(a, m)| format!("{} (\u{d7}{m})", fmt_q(a))).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for SlopeData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Slopes 1 - alpha in increasing order, for data inside [0, 1].
pub fn dieudonne_dual_slopes(s: &SlopeData) -> Result<SlopeData> {
    if let Some(&(a, _)) = s.pairs().iter().find(|&&(a, _)| a < rat(0) || a > rat(1)) {
        return Err(Error::InvalidArgument(format!("slope {} outside [0,1]", fmt_q(a))));
    }
    Ok(SlopeData::from_pairs(s.pairs().iter().map(|&(a, m)| (rat(1) - a, m))))
}
