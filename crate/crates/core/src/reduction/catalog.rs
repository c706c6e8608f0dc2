//! Shipped generating-function families with closed-form invariants.

use serde::Deserialize;

use super::characteristics::{Bounds, NumericInvariant};
use super::ReductionError;
use crate::expr::{parse, Expr, SamplingSpec};

const FAMILIES_TOML: &str = include_str!("../../data/families.toml");

#[derive(Deserialize)]
struct RawCatalog {
    family: Vec<RawFamily>,
}

#[derive(Deserialize)]
struct RawBox {
    y: [f64; 2],
    z: [f64; 2],
}

#[derive(Deserialize)]
struct RawFamily {
    name: String,
    #[serde(rename = "T")]
    t: String,
    omega: String,
    domain: RawBox,
    reference_y: f64,
    characteristic_box: RawBox,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub t: Expr,
    pub omega: Expr,
    pub domain: Bounds,
    pub reference_y: f64,
    pub characteristic_box: Bounds,
}

impl Family {
    /// Sampling spec restricted to the family's validation box.
    pub fn sampling(&self, base: &SamplingSpec) -> SamplingSpec {
        base.clone()
            .with_range("y", self.domain.y.0, self.domain.y.1)
            .with_range("z", self.domain.z.0, self.domain.z.1)
    }

    /// Characteristic labelling whose values are expressed in the
    /// parameterization of the closed-form `omega`.
    pub fn numeric_invariant(&self, step: f64) -> Result<NumericInvariant, ReductionError> {
        let k = (self.t.d(&["y"]) / self.t.d(&["z"])).simplify();
        let section = self
            .omega
            .substitute("y", &Expr::float(self.reference_y))
            .simplify();
        NumericInvariant::new(&k, self.reference_y, self.characteristic_box, step)?
            .with_section(&section)
    }

    /// Largest `|ω_numeric − ω|` over an `n × n` node grid of the domain box,
    /// with the node where it occurs.
    pub fn numeric_agreement(&self, step: f64, n: usize) -> Result<(f64, (f64, f64)), ReductionError> {
        let inv = self.numeric_invariant(step)?;
        let omega = self.omega.compile(&["y", "z"])?;
        let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
        let points: Vec<(f64, f64)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (at(self.domain.y.0, self.domain.y.1, i), at(self.domain.z.0, self.domain.z.1, j)))
            .collect();
        let labels = inv.label_all(&points);
        let mut worst = (0.0, points[0]);
        for (&(y, z), label) in points.iter().zip(labels) {
            let d = (label? - omega.eval(&[y, z])?).abs();
            if d > worst.0 {
                worst = (d, (y, z));
            }
        }
        Ok(worst)
    }
}

fn bounds(b: &RawBox) -> Bounds {
    Bounds {
        y: (b.y[0], b.y[1]),
        z: (b.z[0], b.z[1]),
    }
}

/// The shipped catalog. Panics only if the bundled data file is malformed.
pub fn families() -> Vec<Family> {
    let raw: RawCatalog = toml::from_str(FAMILIES_TOML).expect("bundled families.toml");
    raw.family
        .iter()
        .map(|f| Family {
            name: f.name.clone(),
            t: parse(&f.t).expect("family T parses"),
            omega: parse(&f.omega).expect("family omega parses"),
            domain: bounds(&f.domain),
            reference_y: f.reference_y,
            characteristic_box: bounds(&f.characteristic_box),
        })
        .collect()
}

/// Finds the family whose `T` agrees with `t` (by sampling on the family box).
pub fn lookup(t: &Expr, spec: &SamplingSpec) -> Option<Family> {
    families().into_iter().find(|fam| {
        let diff = t - &fam.t;
        crate::expr::is_zero(&diff, &fam.sampling(spec)).verdict.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads() {
        let fams = families();
        let names: Vec<&str> = fams.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["translation", "scaling", "quadratic-z", "quadratic-y"]);
    }

    #[test]
    fn numeric_labels_match_closed_forms() {
        for fam in families() {
            let (err, at) = fam.numeric_agreement(1e-3, 11).unwrap();
            assert!(err < 1e-6, "{} {err:e} at {at:?}", fam.name);
        }
    }

    #[test]
    fn lookup_is_semantic() {
        let spec = SamplingSpec::default();
        assert_eq!(lookup(&parse("z + y").unwrap(), &spec).unwrap().name, "translation");
        assert_eq!(lookup(&parse("z*y").unwrap(), &spec).unwrap().name, "scaling");
        assert!(lookup(&parse("y - z").unwrap(), &spec).is_none());
    }
}
