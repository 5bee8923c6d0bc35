//! Dimension bookkeeping for 1-motives M = [L -> G], G an extension of an
//! abelian variety A by a torus T.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isocrystal::{dieudonne_dual_slopes, SlopeData, SlopeTriples};
use crate::padic::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotiveShape {
    pub rank_l: usize,
    pub dim_t: usize,
    pub dim_a: usize,
    pub label: Option<String>,
    pub abelian_newton: Option<SlopeData>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotiveSpec {
    #[serde(rename = "rank_L")]
    pub rank_l: usize,
    #[serde(rename = "dim_T")]
    pub dim_t: usize,
    #[serde(rename = "dim_A")]
    pub dim_a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_newton: Option<SlopeTriples>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Multiplicities of the Hodge-Tate weights 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HodgeTate {
    pub weight0: usize,
    pub weight1: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeRhamDims {
    pub t_dr: usize,
    pub fil0: usize,
}

fn validate_abelian(s: &SlopeData, dim_a: usize) -> Result<()> {
    let field = "abelian_newton";
    if let Some((a, _)) =
        s.pairs().iter().find(|(a, _)| *a < Rational::from_integer(0) || *a > Rational::from_integer(1))
    {
        return Err(Error::validation(field, format!("slope {a} outside [0, 1]")));
    }
    if s.dim() != 2 * dim_a {
        return Err(Error::validation(
            field,
            format!("multiplicities sum to {}, expected 2 dim_A = {}", s.dim(), 2 * dim_a),
        ));
    }
    if s.newton_number() != Rational::from_integer(dim_a as i64) {
        return Err(Error::validation(
            field,
            format!("polygon ends at height {}, expected {dim_a}", s.newton_number()),
        ));
    }
    let e = s.expanded();
    let g2 = e.len();
    for i in 0..g2 {
        if e[i] != Rational::from_integer(1) - e[g2 - 1 - i] {
            return Err(Error::validation(field, "slope sequence is not symmetric under a -> 1 - a"));
        }
    }
    Ok(())
}

impl MotiveShape {
    pub fn new(rank_l: usize, dim_t: usize, dim_a: usize) -> Self {
        MotiveShape { rank_l, dim_t, dim_a, label: None, abelian_newton: None }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn with_abelian_newton(mut self, s: SlopeData) -> Result<Self> {
        validate_abelian(&s, self.dim_a)?;
        self.abelian_newton = Some(s);
        Ok(self)
    }

    /// [Z -> G_m].
    pub fn kummer() -> Self {
        Self::new(1, 1, 0).with_label("kummer")
    }

    pub fn from_spec(spec: &MotiveSpec) -> Result<Self> {
        let mut m = Self::new(spec.rank_l, spec.dim_t, spec.dim_a);
        m.label = spec.label.clone();
        if let Some(t) = &spec.abelian_newton {
            let s = SlopeData::from_triples(t).map_err(|e| match e {
                Error::Validation { field, message } => Error::validation(format!("abelian_newton{field}"), message),
                e => e,
            })?;
            m = m.with_abelian_newton(s)?;
        }
        Ok(m)
    }

    pub fn to_spec(&self) -> MotiveSpec {
        MotiveSpec {
            rank_l: self.rank_l,
            dim_t: self.dim_t,
            dim_a: self.dim_a,
            abelian_newton: self.abelian_newton.as_ref().map(|s| s.to_triples()),
            label: self.label.clone(),
        }
    }

    pub fn tate_rank(&self) -> usize {
        self.rank_l + self.dim_t + 2 * self.dim_a
    }

    pub fn hodge_tate_weights(&self) -> HodgeTate {
        HodgeTate { weight0: self.rank_l + self.dim_a, weight1: self.dim_t + self.dim_a }
    }

    /// dim T_dR and dim Fil^0 = dim V(M).
    pub fn de_rham_dims(&self) -> DeRhamDims {
        DeRhamDims { t_dr: self.tate_rank(), fil0: self.rank_l + self.dim_a }
    }

    /// [T^dual -> G^dual]: lattice and torus ranks swap, A goes to its dual.
    pub fn cartier_dual(&self) -> Self {
        MotiveShape {
            rank_l: self.dim_t,
            dim_t: self.rank_l,
            dim_a: self.dim_a,
            label: self.label.as_ref().map(|l| format!("{l}^dual")),
            abelian_newton: self
                .abelian_newton
                .as_ref()
                .map(|s| dieudonne_dual_slopes(s).expect("validated slopes lie in [0, 1]")),
        }
    }

    /// Slope 0 for the lattice part, 1 for the torus, the abelian data for A.
    pub fn crystalline_slopes(&self) -> Result<SlopeData> {
        let ab = match (&self.abelian_newton, self.dim_a) {
            (Some(s), _) => s.clone(),
            (None, 0) => SlopeData::default(),
            (None, _) => return Err(Error::validation("abelian_newton", "required when dim_A > 0")),
        };
        let base =
            SlopeData::from_pairs([(Rational::from_integer(0), self.rank_l), (Rational::from_integer(1), self.dim_t)]);
        Ok(base.union(&ab))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let abelian_newton = match (&self.abelian_newton, &other.abelian_newton) {
            (Some(a), Some(b)) => Some(a.union(b)),
            (Some(a), None) if other.dim_a == 0 => Some(a.clone()),
            (None, Some(b)) if self.dim_a == 0 => Some(b.clone()),
            _ => None,
        };
        MotiveShape {
            rank_l: self.rank_l + other.rank_l,
            dim_t: self.dim_t + other.dim_t,
            dim_a: self.dim_a + other.dim_a,
            label: None,
            abelian_newton,
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        (self.rank_l, self.dim_t, self.dim_a) == (other.rank_l, other.dim_t, other.dim_a)
    }

    pub fn shape_eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.abelian_newton == other.abelian_newton
    }
}

/// Additivity of r_L, dim T and dim A along 0 -> M1 -> M -> M2 -> 0.
pub fn check_exact(m1: &MotiveShape, m: &MotiveShape, m2: &MotiveShape) -> bool {
    m1.rank_l + m2.rank_l == m.rank_l && m1.dim_t + m2.dim_t == m.dim_t && m1.dim_a + m2.dim_a == m.dim_a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn kummer() {
        let k = MotiveShape::kummer();
        assert_eq!(k.tate_rank(), 2);
        assert_eq!(k.hodge_tate_weights(), HodgeTate { weight0: 1, weight1: 1 });
        assert_eq!(k.de_rham_dims(), DeRhamDims { t_dr: 2, fil0: 1 });
        assert_eq!(k.crystalline_slopes().unwrap().render(), "0 (\u{d7}1), 1 (\u{d7}1)");
        assert!(k.cartier_dual().same_shape(&k));
        assert!(check_exact(&MotiveShape::new(0, 1, 0), &k, &MotiveShape::new(1, 0, 0)));
        assert!(!check_exact(&k, &k, &k));
    }

    #[test]
    fn abelian_validation() {
        let e = MotiveShape::new(0, 0, 1);
        let ss = e.clone().with_abelian_newton(SlopeData::from_pairs([(q(1, 2), 2)])).unwrap();
        assert_eq!(ss.crystalline_slopes().unwrap().pairs(), &[(q(1, 2), 2)]);
        assert!(e.clone().with_abelian_newton(SlopeData::from_pairs([(q(0, 1), 2)])).is_err());
        assert!(e.clone().with_abelian_newton(SlopeData::from_pairs([(q(1, 3), 2)])).is_err());
        assert!(e.crystalline_slopes().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"rank_L": 2, "dim_T": 3, "dim_A": 1, "abelian_newton": [[0,1,1],[1,1,1]]}"#;
        let spec: MotiveSpec = serde_json::from_str(json).unwrap();
        let m = MotiveShape::from_spec(&spec).unwrap();
        assert_eq!(m.to_spec(), spec);
        let d = m.cartier_dual();
        assert_eq!((d.rank_l, d.dim_t, d.dim_a), (3, 2, 1));
        assert!(d.cartier_dual().shape_eq(&m));
        assert!(serde_json::from_str::<MotiveSpec>(r#"{"rank_L":1,"dim_T":0,"dim_A":0,"extra":1}"#).is_err());
    }
}
