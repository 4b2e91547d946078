//! Mamdani fuzzy inference.
//!
//! Crisp inputs are fuzzified against each input variable's sets, every rule
//! fires at the minimum of its antecedent degrees, consequents are clipped at
//! the firing strength, the clipped sets are combined with a pointwise max and
//! the aggregate is reduced to a crisp value by its centroid.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Smallest accepted sample count over the output universe.
pub const MIN_RESOLUTION: usize = 101;
/// Default sample count over the output universe.
pub const DEFAULT_RESOLUTION: usize = 1001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FisError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("no rule fired: aggregate output set is empty")]
    NoRuleFired,
}

/// Shape of a membership function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipFunction {
    Gaussian { center: f64, sigma: f64 },
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    pub fn gaussian(center: f64, sigma: f64) -> Result<Self, FisError> {
        let mf = Self::Gaussian { center, sigma };
        mf.validate()?;
        Ok(mf)
    }

    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FisError> {
        let mf = Self::Triangular { a, b, c };
        mf.validate()?;
        Ok(mf)
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FisError> {
        let mf = Self::Trapezoidal { a, b, c, d };
        mf.validate()?;
        Ok(mf)
    }

    pub fn validate(&self) -> Result<(), FisError> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Self::Gaussian { center, sigma } => {
                if !finite(&[center, sigma]) || sigma <= 0.0 {
                    return Err(FisError::Configuration(format!(
                        "gaussian needs finite center and sigma > 0, got center={center} sigma={sigma}"
                    )));
                }
            }
            Self::Triangular { a, b, c } => {
                if !finite(&[a, b, c]) || !(a <= b && b <= c) {
                    return Err(FisError::Configuration(format!(
                        "triangular needs a <= b <= c, got ({a}, {b}, {c})"
                    )));
                }
            }
            Self::Trapezoidal { a, b, c, d } => {
                if !finite(&[a, b, c, d]) || !(a <= b && b <= c && c <= d) {
                    return Err(FisError::Configuration(format!(
                        "trapezoidal needs a <= b <= c <= d, got ({a}, {b}, {c}, {d})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Degree of membership of `x`, always in `[0, 1]`.
    pub fn degree(&self, x: f64) -> f64 {
        let mu = match *self {
            Self::Gaussian { center, sigma } => {
                let z = x - center;
                (-(z * z) / (2.0 * sigma * sigma)).exp()
            }
            Self::Triangular { a, b, c } => {
                if x == b {
                    1.0
                } else if x < b {
                    if x <= a {
                        0.0
                    } else {
                        (x - a) / (b - a)
                    }
                } else if x >= c {
                    0.0
                } else {
                    (c - x) / (c - b)
                }
            }
            Self::Trapezoidal { a, b, c, d } => {
                if (b..=c).contains(&x) {
                    1.0
                } else if x < b {
                    if x <= a {
                        0.0
                    } else {
                        (x - a) / (b - a)
                    }
                } else if x >= d {
                    0.0
                } else {
                    (d - x) / (d - c)
                }
            }
        };
        mu.clamp(0.0, 1.0)
    }

    /// Interval on which the function reaches 1.
    pub fn peak(&self) -> (f64, f64) {
        match *self {
            Self::Gaussian { center, .. } => (center, center),
            Self::Triangular { b, .. } => (b, b),
            Self::Trapezoidal { b, c, .. } => (b, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    pub label: String,
    pub mf: MembershipFunction,
}

impl FuzzySet {
    pub fn new(label: impl Into<String>, mf: MembershipFunction) -> Self {
        Self {
            label: label.into(),
            mf,
        }
    }
}

/// Closed crisp interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub lo: f64,
    pub hi: f64,
}

impl Universe {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FisError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FisError::Configuration(format!(
                "universe needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }

    /// `resolution` evenly spaced points, both ends included.
    pub fn grid(&self, resolution: usize) -> Vec<f64> {
        let step = self.width() / (resolution - 1) as f64;
        (0..resolution)
            .map(|i| {
                if i + 1 == resolution {
                    self.hi
                } else {
                    self.lo + i as f64 * step
                }
            })
            .collect()
    }
}

/// Direction in which a variable's sets are laid out along its universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// First set peaks at `lo`.
    Ascending,
    /// First set peaks at `hi`.
    Descending,
}

/// A named crisp range with its ordered family of fuzzy sets.
///
/// Sets are ordered worst to best along the variable's meaning, which is not
/// necessarily the numeric direction (high latency is "worst").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    pub name: String,
    pub universe: Universe,
    pub sets: Vec<FuzzySet>,
}

const COVERAGE_PROBES: usize = 1001;

impl LinguisticVariable {
    pub fn new(
        name: impl Into<String>,
        universe: Universe,
        sets: Vec<FuzzySet>,
    ) -> Result<Self, FisError> {
        let var = Self {
            name: name.into(),
            universe,
            sets,
        };
        var.validate()?;
        Ok(var)
    }

    /// Gaussian sets with evenly spaced centers across the universe and
    /// `sigma = width / (2 (k - 1))`, so neighbours cross near 0.6.
    pub fn evenly_spaced_gaussians(
        name: impl Into<String>,
        universe: Universe,
        labels: &[&str],
        layout: Layout,
    ) -> Result<Self, FisError> {
        let k = labels.len();
        if k < 2 {
            return Err(FisError::Configuration(
                "need at least two sets to space evenly".into(),
            ));
        }
        let step = universe.width() / (k - 1) as f64;
        let sigma = universe.width() / (2.0 * (k - 1) as f64);
        let sets = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let slot = match layout {
                    Layout::Ascending => i,
                    Layout::Descending => k - 1 - i,
                };
                let center = if slot + 1 == k {
                    universe.hi
                } else {
                    universe.lo + slot as f64 * step
                };
                MembershipFunction::gaussian(center, sigma).map(|mf| FuzzySet::new(*label, mf))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, universe, sets)
    }

    pub fn validate(&self) -> Result<(), FisError> {
        Universe::new(self.universe.lo, self.universe.hi)?;
        if self.sets.is_empty() {
            return Err(FisError::Configuration(format!(
                "variable '{}' has no sets",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for set in &self.sets {
            set.mf.validate()?;
            if !seen.insert(set.label.as_str()) {
                return Err(FisError::Configuration(format!(
                    "variable '{}' has duplicate set label '{}'",
                    self.name, set.label
                )));
            }
            let (p0, p1) = set.mf.peak();
            if !(self.universe.contains(p0) && self.universe.contains(p1)) {
                return Err(FisError::Configuration(format!(
                    "set '{}' of '{}' peaks outside [{}, {}]",
                    set.label, self.name, self.universe.lo, self.universe.hi
                )));
            }
        }
        if let Some(x) = self
            .universe
            .grid(COVERAGE_PROBES)
            .into_iter()
            .find(|&x| self.sets.iter().all(|s| s.mf.degree(x) <= 0.0))
        {
            return Err(FisError::Configuration(format!(
                "variable '{}' has no set covering {x}",
                self.name
            )));
        }
        Ok(())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.label == label)
    }
}

/// Degree of `crisp` in every set of `var`; out-of-universe inputs are clamped.
pub fn fuzzify(var: &LinguisticVariable, crisp: f64) -> Result<Vec<f64>, FisError> {
    if !crisp.is_finite() {
        return Err(FisError::InvalidInput(format!(
            "'{}' received non-finite value {crisp}",
            var.name
        )));
    }
    let x = var.universe.clamp(crisp);
    Ok(var.sets.iter().map(|s| s.mf.degree(x)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FuzzyRule {
    /// One set index per input variable.
    pub antecedent: Vec<usize>,
    /// Set index of the output variable.
    pub consequent: usize,
}

impl FuzzyRule {
    pub fn new(antecedent: Vec<usize>, consequent: usize) -> Self {
        Self {
            antecedent,
            consequent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleBase {
    rules: Vec<FuzzyRule>,
}

impl RuleBase {
    /// Checks index ranges against the given set counts and rejects repeated
    /// antecedents.
    pub fn new(
        rules: Vec<FuzzyRule>,
        input_set_counts: &[usize],
        output_set_count: usize,
    ) -> Result<Self, FisError> {
        let capacity: usize = input_set_counts.iter().product();
        if rules.len() > capacity {
            return Err(FisError::Configuration(format!(
                "{} rules exceed the {capacity} possible antecedents",
                rules.len()
            )));
        }
        let mut seen = HashSet::new();
        for (r, rule) in rules.iter().enumerate() {
            if rule.antecedent.len() != input_set_counts.len() {
                return Err(FisError::Configuration(format!(
                    "rule {r} has {} antecedent terms, expected {}",
                    rule.antecedent.len(),
                    input_set_counts.len()
                )));
            }
            for (v, (&idx, &count)) in rule.antecedent.iter().zip(input_set_counts).enumerate() {
                if idx >= count {
                    return Err(FisError::Configuration(format!(
                        "rule {r}: input {v} set index {idx} out of range (have {count})"
                    )));
                }
            }
            if rule.consequent >= output_set_count {
                return Err(FisError::Configuration(format!(
                    "rule {r}: consequent {} out of range (have {output_set_count})",
                    rule.consequent
                )));
            }
            if !seen.insert(rule.antecedent.as_slice()) {
                return Err(FisError::Configuration(format!(
                    "rule {r} repeats antecedent {:?}",
                    rule.antecedent
                )));
            }
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn consequent_of(&self, antecedent: &[usize]) -> Option<usize> {
        self.rules
            .iter()
            .find(|r| r.antecedent == antecedent)
            .map(|r| r.consequent)
    }
}

/// Mamdani operator choice. Only the canonical min / min-clip / max /
/// centroid combination is supported; the sample count is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub resolution: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<(), FisError> {
        if self.resolution < MIN_RESOLUTION {
            return Err(FisError::Configuration(format!(
                "resolution {} below minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        Ok(())
    }
}

/// A validated inference system with its output sets pre-sampled.
#[derive(Debug, Clone)]
pub struct Mamdani {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: RuleBase,
    config: InferenceConfig,
    grid: Vec<f64>,
    // sampled[k][i] = degree of output set k at grid[i]
    sampled: Vec<Vec<f64>>,
}

impl Mamdani {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: RuleBase,
        config: InferenceConfig,
    ) -> Result<Self, FisError> {
        config.validate()?;
        if rules.is_empty() {
            return Err(FisError::Configuration("rule base is empty".into()));
        }
        for var in inputs.iter().chain(std::iter::once(&output)) {
            var.validate()?;
        }
        let counts: Vec<usize> = inputs.iter().map(|v| v.sets.len()).collect();
        // Re-check indices in case the rule base was built for other variables.
        let rules = RuleBase::new(rules.rules, &counts, output.sets.len())?;
        let grid = output.universe.grid(config.resolution);
        let sampled = output
            .sets
            .iter()
            .map(|s| grid.iter().map(|&x| s.mf.degree(x)).collect())
            .collect();
        Ok(Self {
            inputs,
            output,
            rules,
            config,
            grid,
            sampled,
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &RuleBase {
        &self.rules
    }

    pub fn config(&self) -> InferenceConfig {
        self.config
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Firing strength of every rule, in rule order.
    pub fn firing_strengths(&self, crisp: &[f64]) -> Result<Vec<f64>, FisError> {
        if crisp.len() != self.inputs.len() {
            return Err(FisError::InvalidInput(format!(
                "expected {} crisp inputs, got {}",
                self.inputs.len(),
                crisp.len()
            )));
        }
        let degrees = self
            .inputs
            .iter()
            .zip(crisp)
            .map(|(var, &x)| fuzzify(var, x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .rules
            .rules()
            .iter()
            .map(|rule| {
                rule.antecedent
                    .iter()
                    .zip(&degrees)
                    .map(|(&idx, d)| d[idx])
                    .fold(1.0, f64::min)
            })
            .collect())
    }

    /// Aggregate output set sampled at `resolution` points.
    pub fn infer(&self, crisp: &[f64]) -> Result<Vec<f64>, FisError> {
        let strengths = self.firing_strengths(crisp)?;
        // max_r min(w_r, mu_k) == min(max_r w_r, mu_k) for rules sharing k,
        // so clip each output set once at its strongest rule.
        let mut clip = vec![0.0_f64; self.output.sets.len()];
        for (rule, w) in self.rules.rules().iter().zip(strengths) {
            let c = &mut clip[rule.consequent];
            *c = c.max(w);
        }
        let mut aggregate = vec![0.0_f64; self.grid.len()];
        for (set, &level) in self.sampled.iter().zip(&clip) {
            if level <= 0.0 {
                continue;
            }
            for (agg, &mu) in aggregate.iter_mut().zip(set) {
                *agg = agg.max(mu.min(level));
            }
        }
        Ok(aggregate)
    }

    /// Crisp output: centroid of the aggregate.
    pub fn evaluate(&self, crisp: &[f64]) -> Result<f64, FisError> {
        let aggregate = self.infer(crisp)?;
        defuzzify_centroid(&aggregate, self.output.universe)
    }
}

/// Free-function form of [`Mamdani::infer`] that builds the system on the fly.
pub fn infer(
    rules: &RuleBase,
    inputs: &[LinguisticVariable],
    output: &LinguisticVariable,
    crisp: &[f64],
    config: InferenceConfig,
) -> Result<Vec<f64>, FisError> {
    Mamdani::new(inputs.to_vec(), output.clone(), rules.clone(), config)?.infer(crisp)
}

/// Centroid `Σ x_i μ_i / Σ μ_i` over the evenly spaced grid of `universe`
/// with `aggregate.len()` points.
pub fn defuzzify_centroid(aggregate: &[f64], universe: Universe) -> Result<f64, FisError> {
    if aggregate.len() < 2 {
        return Err(FisError::InvalidInput(
            "aggregate needs at least two samples".into(),
        ));
    }
    if aggregate.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(FisError::InvalidInput(
            "aggregate has negative or non-finite samples".into(),
        ));
    }
    let grid = universe.grid(aggregate.len());
    let (num, den) = grid
        .iter()
        .zip(aggregate)
        .fold((0.0, 0.0), |(n, d), (&x, &mu)| (n + x * mu, d + mu));
    if den <= 0.0 {
        return Err(FisError::NoRuleFired);
    }
    Ok(universe.clamp(num / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_gaussians() -> LinguisticVariable {
        LinguisticVariable::evenly_spaced_gaussians(
            "rssi",
            Universe::new(-78.0, -66.0).unwrap(),
            &["Weak", "Medium", "Strong"],
            Layout::Ascending,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_peak_and_offset() {
        let mf = MembershipFunction::gaussian(-72.0, 2.0).unwrap();
        assert_eq!(mf.degree(-72.0), 1.0);
        assert!((mf.degree(-74.0) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn triangular_and_trapezoidal_peaks() {
        let tri = MembershipFunction::triangular(0.0, 0.5, 1.0).unwrap();
        assert_eq!(tri.degree(0.5), 1.0);
        assert_eq!(tri.degree(0.25), 0.5);
        assert_eq!(tri.degree(2.0), 0.0);
        let trap = MembershipFunction::trapezoidal(0.0, 0.2, 0.4, 1.0).unwrap();
        assert_eq!(trap.degree(0.2), 1.0);
        assert_eq!(trap.degree(0.3), 1.0);
        assert_eq!(trap.degree(0.4), 1.0);
        assert!((trap.degree(0.7) - 0.5).abs() < 1e-12);
        // Shoulder at the left edge.
        let shoulder = MembershipFunction::triangular(0.0, 0.0, 1.0).unwrap();
        assert_eq!(shoulder.degree(0.0), 1.0);
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(MembershipFunction::gaussian(0.0, 0.0).is_err());
        assert!(MembershipFunction::triangular(1.0, 0.0, 2.0).is_err());
        assert!(MembershipFunction::trapezoidal(0.0, 2.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn fuzzify_boundary_peak_and_clamp() {
        let var = three_gaussians();
        let d = fuzzify(&var, -78.0).unwrap();
        assert_eq!(d[0], 1.0);
        // clamped to lo
        assert_eq!(fuzzify(&var, -90.0).unwrap(), d);
        assert_eq!(fuzzify(&var, -72.0).unwrap()[1], 1.0);
        assert!(matches!(
            fuzzify(&var, f64::NAN),
            Err(FisError::InvalidInput(_))
        ));
        assert!(matches!(
            fuzzify(&var, f64::INFINITY),
            Err(FisError::InvalidInput(_))
        ));
    }

    #[test]
    fn evenly_spaced_placement() {
        let var = three_gaussians();
        let centers: Vec<f64> = var.sets.iter().map(|s| s.mf.peak().0).collect();
        assert_eq!(centers, vec![-78.0, -72.0, -66.0]);
        match var.sets[0].mf {
            MembershipFunction::Gaussian { sigma, .. } => assert_eq!(sigma, 3.0),
            _ => unreachable!(),
        }
        let desc = LinguisticVariable::evenly_spaced_gaussians(
            "latency",
            Universe::new(0.0, 200.0).unwrap(),
            &["High", "Medium", "Low"],
            Layout::Descending,
        )
        .unwrap();
        assert_eq!(desc.sets[0].mf.peak().0, 200.0);
        assert_eq!(desc.sets[2].mf.peak().0, 0.0);
    }

    #[test]
    fn variable_invariants_enforced() {
        let u = Universe::new(0.0, 1.0).unwrap();
        let dup = vec![
            FuzzySet::new("a", MembershipFunction::triangular(0.0, 0.0, 1.0).unwrap()),
            FuzzySet::new("a", MembershipFunction::triangular(0.0, 1.0, 1.0).unwrap()),
        ];
        assert!(LinguisticVariable::new("v", u, dup).is_err());
        let outside = vec![FuzzySet::new(
            "a",
            MembershipFunction::gaussian(2.0, 1.0).unwrap(),
        )];
        assert!(LinguisticVariable::new("v", u, outside).is_err());
        let gap = vec![
            FuzzySet::new("a", MembershipFunction::triangular(0.0, 0.0, 0.3).unwrap()),
            FuzzySet::new("b", MembershipFunction::triangular(0.7, 1.0, 1.0).unwrap()),
        ];
        assert!(LinguisticVariable::new("v", u, gap).is_err());
        assert!(Universe::new(1.0, 1.0).is_err());
    }

    #[test]
    fn rule_base_checks() {
        let ok = RuleBase::new(vec![FuzzyRule::new(vec![0, 1], 0)], &[2, 2], 2);
        assert!(ok.is_ok());
        let dup = RuleBase::new(
            vec![FuzzyRule::new(vec![0, 1], 0), FuzzyRule::new(vec![0, 1], 1)],
            &[2, 2],
            2,
        );
        assert!(dup.is_err());
        assert!(RuleBase::new(vec![FuzzyRule::new(vec![2, 0], 0)], &[2, 2], 2).is_err());
        assert!(RuleBase::new(vec![FuzzyRule::new(vec![0, 0], 5)], &[2, 2], 2).is_err());
        assert!(RuleBase::new(vec![FuzzyRule::new(vec![0], 0)], &[2, 2], 2).is_err());
    }

    /// One input with two crisp-edged triangular sets, two output triangles on
    /// [0, 1] that do not overlap.
    fn two_rule_system() -> Mamdani {
        let input = LinguisticVariable::new(
            "x",
            Universe::new(0.0, 1.0).unwrap(),
            vec![
                FuzzySet::new("lo", MembershipFunction::triangular(0.0, 0.0, 1.0).unwrap()),
                FuzzySet::new("hi", MembershipFunction::triangular(0.0, 1.0, 1.0).unwrap()),
            ],
        )
        .unwrap();
        let output = LinguisticVariable::new(
            "y",
            Universe::new(0.0, 1.0).unwrap(),
            vec![
                FuzzySet::new(
                    "left",
                    MembershipFunction::triangular(0.0, 0.2, 0.4).unwrap(),
                ),
                FuzzySet::new(
                    "right",
                    MembershipFunction::triangular(0.6, 0.8, 1.0).unwrap(),
                ),
                // unused by the rules; keeps the universe covered
                FuzzySet::new(
                    "any",
                    MembershipFunction::trapezoidal(0.0, 0.0, 1.0, 1.0).unwrap(),
                ),
            ],
        )
        .unwrap();
        let rules = RuleBase::new(
            vec![FuzzyRule::new(vec![0], 0), FuzzyRule::new(vec![1], 1)],
            &[2],
            3,
        )
        .unwrap();
        Mamdani::new(
            vec![input],
            output,
            rules,
            InferenceConfig { resolution: 101 },
        )
        .unwrap()
    }

    #[test]
    fn single_full_strength_rule_reproduces_consequent() {
        let fis = two_rule_system();
        // x = 0: "lo" is 1, "hi" is 0.
        let agg = fis.infer(&[0.0]).unwrap();
        let left = &fis.output().sets[0].mf;
        for (x, mu) in fis.grid().iter().zip(&agg) {
            assert_eq!(*mu, left.degree(*x));
        }
    }

    #[test]
    fn two_rules_hand_computed_points() {
        // x = 0.7 fires "lo" at 0.3 and "hi" at 0.7.
        let fis = two_rule_system();
        let agg = fis.infer(&[0.7]).unwrap();
        // grid step 0.01: index 20 -> 0.2 (left peak), 80 -> 0.8 (right peak),
        // 50 -> 0.5 (neither set)
        assert!((agg[20] - 0.3).abs() < 1e-12);
        assert!((agg[80] - 0.7).abs() < 1e-12);
        assert_eq!(agg[50], 0.0);
        // 0.1: left degree 0.5, clipped to 0.3
        assert!((agg[10] - 0.3).abs() < 1e-12);
        // 0.7: right degree 0.5, below 0.7
        assert!((agg[70] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn no_rule_fires_gives_zero_aggregate() {
        let input = LinguisticVariable::new(
            "x",
            Universe::new(0.0, 1.0).unwrap(),
            vec![
                FuzzySet::new("lo", MembershipFunction::triangular(0.0, 0.0, 0.6).unwrap()),
                FuzzySet::new("hi", MembershipFunction::triangular(0.4, 1.0, 1.0).unwrap()),
            ],
        )
        .unwrap();
        let output = two_rule_system().output().clone();
        // Only "lo" has a rule; at x = 1 "lo" is 0.
        let rules = RuleBase::new(vec![FuzzyRule::new(vec![0], 0)], &[2], 3).unwrap();
        let fis = Mamdani::new(vec![input], output, rules, InferenceConfig::default()).unwrap();
        let agg = fis.infer(&[1.0]).unwrap();
        assert!(agg.iter().all(|&m| m == 0.0));
        assert_eq!(fis.evaluate(&[1.0]), Err(FisError::NoRuleFired));
    }

    #[test]
    fn empty_rule_base_rejected() {
        let sys = two_rule_system();
        let empty = RuleBase::new(vec![], &[2], 3).unwrap();
        let err = Mamdani::new(
            sys.inputs().to_vec(),
            sys.output().clone(),
            empty,
            InferenceConfig::default(),
        );
        assert!(matches!(err, Err(FisError::Configuration(_))));
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(InferenceConfig { resolution: 100 }.validate().is_err());
        assert!(InferenceConfig { resolution: 101 }.validate().is_ok());
    }

    #[test]
    fn free_infer_matches_method() {
        let sys = two_rule_system();
        let a = sys.infer(&[0.35]).unwrap();
        let b = infer(
            sys.rules(),
            sys.inputs(),
            sys.output(),
            &[0.35],
            sys.config(),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn centroid_symmetry_and_point_mass() {
        let u = Universe::new(0.0, 1.0).unwrap();
        let grid = u.grid(1001);
        let sym: Vec<f64> = grid.iter().map(|x| 1.0 - (2.0 * x - 1.0).abs()).collect();
        assert!((defuzzify_centroid(&sym, u).unwrap() - 0.5).abs() < 1e-12);
        let mut point = vec![0.0; 1001];
        point[137] = 0.4;
        assert!((defuzzify_centroid(&point, u).unwrap() - grid[137]).abs() < 1e-15);
        assert_eq!(
            defuzzify_centroid(&vec![0.0; 1001], u),
            Err(FisError::NoRuleFired)
        );
    }

    /// Clipped triangle (0, 0.5, 1) at 0.5 on [0, 1]: a symmetric trapezoid,
    /// so the centroid is 0.5. The asymmetric case (0, 0.2, 1) is checked
    /// against Simpson integration at 10001 points.
    #[test]
    fn clipped_triangle_matches_fine_integration() {
        fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
            let h = 1.0 / (n - 1) as f64;
            let mut s = f(0.0) + f(1.0);
            for i in 1..n - 1 {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * h);
            }
            s * h / 3.0
        }
        let u = Universe::new(0.0, 1.0).unwrap();
        for b in [0.5, 0.2] {
            let mf = MembershipFunction::triangular(0.0, b, 1.0).unwrap();
            let clipped = |x: f64| mf.degree(x).min(0.5);
            let oracle = simpson(|x| x * clipped(x), 10001) / simpson(clipped, 10001);
            let agg: Vec<f64> = u
                .grid(DEFAULT_RESOLUTION)
                .into_iter()
                .map(clipped)
                .collect();
            let c = defuzzify_centroid(&agg, u).unwrap();
            assert!((c - oracle).abs() < 1e-3, "b={b}: {c} vs {oracle}");
        }
    }

    proptest! {
        #[test]
        fn degrees_in_unit_interval(
            center in -100.0f64..100.0, sigma in 0.01f64..50.0, x in -1e4f64..1e4,
            a in -10.0f64..0.0, b in 0.0f64..5.0, c in 5.0f64..10.0,
        ) {
            let g = MembershipFunction::gaussian(center, sigma).unwrap();
            let t = MembershipFunction::triangular(a, b, c).unwrap();
            let z = MembershipFunction::trapezoidal(a, b, b + 1.0, c + 1.0).unwrap();
            for mf in [g, t, z] {
                let d = mf.degree(x);
                prop_assert!((0.0..=1.0).contains(&d));
            }
        }

        #[test]
        fn centroid_in_universe_and_scale_free(
            samples in proptest::collection::vec(0.0f64..1.0, 101..300),
            scale in 0.01f64..100.0,
        ) {
            prop_assume!(samples.iter().sum::<f64>() > 0.0);
            let u = Universe::new(-3.0, 7.0).unwrap();
            let c = defuzzify_centroid(&samples, u).unwrap();
            prop_assert!(u.contains(c));
            let scaled: Vec<f64> = samples.iter().map(|m| m * scale).collect();
            let c2 = defuzzify_centroid(&scaled, u).unwrap();
            prop_assert!((c - c2).abs() < 1e-9);
        }

        #[test]
        fn inference_deterministic_and_bounded(x in -1.0f64..2.0) {
            let fis = two_rule_system();
            let a = fis.infer(&[x]).unwrap();
            let b = fis.infer(&[x]).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.iter().all(|m| (0.0..=1.0).contains(m)));
        }

        #[test]
        fn firing_strength_monotone_in_degree(lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
            // Raising x raises "hi" degree; the rule on "hi" must not weaken.
            let fis = two_rule_system();
            let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let wa = fis.firing_strengths(&[a]).unwrap()[1];
            let wb = fis.firing_strengths(&[b]).unwrap()[1];
            prop_assert!(wb >= wa);
        }
    }
}
