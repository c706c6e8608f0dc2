//! Probabilistic identity testing by random sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Bindings, Expr, Symbol};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_RANGE: (f64, f64) = (0.5, 2.0);
pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 42;

/// Fraction of samples that may hit domain errors before the test gives up.
const MAX_DOMAIN_ERROR_FRACTION: f64 = 0.2;
/// Redraws allowed per sample when it lands near an excluded set.
const MAX_REDRAWS: usize = 16;

/// Sampling parameters for [`is_zero`].
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingSpec {
    pub samples: usize,
    pub default_range: (f64, f64),
    /// Per-variable overrides of `default_range`.
    pub ranges: BTreeMap<String, (f64, f64)>,
    /// Points where any of these is within `exclusion_radius` of zero are redrawn.
    pub excluded: Vec<Expr>,
    pub exclusion_radius: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            samples: DEFAULT_SAMPLES,
            default_range: DEFAULT_RANGE,
            ranges: BTreeMap::new(),
            excluded: Vec::new(),
            exclusion_radius: 1e-6,
            epsilon: DEFAULT_EPSILON,
            seed: DEFAULT_SEED,
        }
    }
}

impl SamplingSpec {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_range(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.ranges.insert(var.to_string(), (lo, hi));
        self
    }

    pub fn excluding(mut self, singular: Expr) -> Self {
        self.excluded.push(singular);
        self
    }

    pub fn range_of(&self, var: &str) -> (f64, f64) {
        self.ranges.get(var).copied().unwrap_or(self.default_range)
    }
}

/// Sample point at which an expression was found to be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: BTreeMap<String, f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    Zero,
    Nonzero(Witness),
    Inconclusive,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, ZeroVerdict::Nonzero(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ZeroVerdict::Nonzero(w) => Some(w),
            _ => None,
        }
    }
}

/// Outcome of [`is_zero`] with the statistics behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCheck {
    pub verdict: ZeroVerdict,
    /// Largest `|value|` over valid samples; `None` if no sample was valid.
    pub max_abs: Option<f64>,
    pub valid_samples: usize,
    pub domain_errors: usize,
    pub epsilon: f64,
}

/// Decides whether `e` vanishes identically by evaluating it at
/// `spec.samples` random points.
///
/// A sample fails when `|value| > epsilon * (1 + scale)`, with `scale` the
/// largest intermediate magnitude at that point. Any failing sample makes the
/// verdict `Nonzero` (the worst one is the witness). Otherwise, more than 20%
/// of samples hitting domain errors gives `Inconclusive`.
pub fn is_zero(e: &Expr, spec: &SamplingSpec) -> ZeroCheck {
    let mut vars = e.variables();
    for g in &spec.excluded {
        vars.extend(g.variables());
    }
    let vars: Vec<Symbol> = vars.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut max_abs: Option<f64> = None;
    let mut worst: Option<(f64, Witness)> = None;
    let mut valid = 0;
    let mut errors = 0;

    for _ in 0..spec.samples {
        let Some(point) = draw(&vars, spec, &mut rng) else {
            errors += 1;
            continue;
        };
        match e.evaluate_with_scale(&point) {
            Err(_) => errors += 1,
            Ok((v, scale)) => {
                valid += 1;
                max_abs = Some(max_abs.map_or(v.abs(), |m| m.max(v.abs())));
                let excess = v.abs() / (1.0 + scale);
                if excess > spec.epsilon && worst.as_ref().is_none_or(|(w, _)| excess > *w) {
                    let witness = Witness {
                        point: point.iter().map(|(k, x)| (k.to_string(), x)).collect(),
                        value: v,
                    };
                    worst = Some((excess, witness));
                }
            }
        }
    }

    let verdict = if let Some((_, w)) = worst {
        ZeroVerdict::Nonzero(w)
    } else if errors as f64 > MAX_DOMAIN_ERROR_FRACTION * spec.samples as f64 || valid == 0 {
        ZeroVerdict::Inconclusive
    } else {
        ZeroVerdict::Zero
    };
    ZeroCheck {
        verdict,
        max_abs,
        valid_samples: valid,
        domain_errors: errors,
        epsilon: spec.epsilon,
    }
}

/// Values of `e` at `spec.samples` points drawn like [`is_zero`] draws
/// them; `None` marks a domain error or an exhausted redraw budget.
pub fn sample_values(e: &Expr, spec: &SamplingSpec) -> Vec<Option<f64>> {
    let mut vars = e.variables();
    for g in &spec.excluded {
        vars.extend(g.variables());
    }
    let vars: Vec<Symbol> = vars.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.samples)
        .map(|_| draw(&vars, spec, &mut rng).and_then(|b| e.evaluate(&b).ok()))
        .collect()
}

fn draw(vars: &[Symbol], spec: &SamplingSpec, rng: &mut ChaCha8Rng) -> Option<Bindings<f64>> {
    for _ in 0..MAX_REDRAWS {
        let mut b = Bindings::new();
        for v in vars {
            let (lo, hi) = spec.range_of(v.as_str());
            let x = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            b.set(v.as_str(), x);
        }
        let near_singular = spec.excluded.iter().any(|g| {
            g.evaluate(&b)
                .map_or(true, |gv: f64| gv.abs() < spec.exclusion_radius)
        });
        if !near_singular {
            return Some(b);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn check(text: &str) -> ZeroCheck {
        is_zero(&parse(text).unwrap(), &SamplingSpec::default())
    }

    #[test]
    fn expanded_square_is_zero() {
        assert!(check("(y+z)^2 - y^2 - 2*y*z - z^2").verdict.is_zero());
    }

    #[test]
    fn difference_of_variables_is_nonzero() {
        let c = check("y - z");
        let w = c.verdict.witness().expect("witness");
        let at = w.point["y"] - w.point["z"];
        assert_eq!(at, w.value);
        assert!(at.abs() > 1e-8);
    }

    #[test]
    fn constant_zero() {
        let c = check("0");
        assert!(c.verdict.is_zero());
        assert_eq!(c.valid_samples, DEFAULT_SAMPLES);
    }

    #[test]
    fn mostly_undefined_is_inconclusive() {
        // log(y - 1.8) is undefined on most of [0.5, 2]
        let c = check("log(y - 1.8) - log(y - 1.8)");
        assert_eq!(c.verdict, ZeroVerdict::Inconclusive);
        assert!(c.domain_errors > 20);
    }

    #[test]
    fn sparse_domain_errors_do_not_block_a_zero_verdict() {
        // defined on 90% of the range
        let c = check("sqrt(y - 0.65) - sqrt(y - 0.65)");
        assert!(c.domain_errors > 0);
        assert!(c.verdict.is_zero());
    }

    #[test]
    fn excluded_sets_are_avoided() {
        let spec = SamplingSpec::default()
            .with_range("y", -1.0, 1.0)
            .excluding(parse("y").unwrap());
        let c = is_zero(&parse("y/y - 1").unwrap(), &spec);
        assert!(c.verdict.is_zero());
        assert_eq!(c.domain_errors, 0);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let e = parse("sin(y) - y").unwrap();
        let a = is_zero(&e, &SamplingSpec::default());
        let b = is_zero(&e, &SamplingSpec::default());
        assert_eq!(a, b);
        let c = is_zero(&e, &SamplingSpec::default().with_seed(7));
        assert_ne!(a.verdict, c.verdict);
    }

    #[test]
    fn relative_tolerance_uses_intermediate_scale() {
        // cancellation between terms of size 1e12 leaves rounding noise
        let c = check("(1e12*y + 1) - 1e12*y - 1");
        assert!(c.verdict.is_zero());
    }
}
