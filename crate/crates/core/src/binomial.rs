//! Binomial likelihood primitives, hypothesis contrasts and Kullback-Leibler
//! divergences.
//!
//! Sample size `n` and head count `x` are continuous. The binomial coefficient
//! is omitted from every likelihood: it cancels in all likelihood ratios.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EvidenceError, Result};

/// `a * ln(b)` with the convention `0 * ln(anything) = 0`.
#[inline]
pub(crate) fn xlogy(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * b.ln()
    }
}

/// Closed interval `[lo, hi]` of the Bernoulli parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }
}

/// A binomial observation: `x` heads out of `n` tosses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    n: f64,
    x: f64,
}

impl Observation {
    pub fn new(n: f64, x: f64) -> Result<Self> {
        if !(n.is_finite() && x.is_finite() && n > 0.0 && x >= 0.0 && x <= n) {
            return Err(EvidenceError::InvalidObservation { n, x });
        }
        Ok(Self { n, x })
    }

    /// Observation at a given head fraction; `x = ratio * n`.
    pub fn from_ratio(n: f64, ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(EvidenceError::InvalidObservation { n, x: ratio * n });
        }
        // ratio * n can round a hair above n at ratio = 1
        Self::new(n, (ratio * n).min(n))
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Tails count `n - x`.
    pub fn tails(&self) -> f64 {
        self.n - self.x
    }

    pub fn ratio(&self) -> f64 {
        (self.x / self.n).clamp(0.0, 1.0)
    }

    /// The mirrored observation `(n, n - x)`.
    pub fn mirrored(&self) -> Self {
        Self {
            n: self.n,
            x: self.n - self.x,
        }
    }
}

/// The four supported hypothesis-contrast classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContrastClass {
    /// Non-nested, composite vs simple: `θ ∈ [0, 1/2]` vs `θ = 1/2`.
    Ia,
    /// Non-nested, composite vs composite: `θ ∈ [0, 1/2]` vs `θ ∈ (1/2, 1]`.
    Ib,
    /// Nested, composite vs simple: `θ ∈ [0, 1]` vs `θ = 1/2`.
    IIa,
    /// Nested, composite vs composite: `θ ∈ [0, 1]` vs `θ ∈ [θ2l, θ2r]`,
    /// symmetric around 1/2.
    IIb,
}

impl ContrastClass {
    pub const ALL: [ContrastClass; 4] = [Self::Ia, Self::Ib, Self::IIa, Self::IIb];

    pub fn is_nested(self) -> bool {
        matches!(self, Self::IIa | Self::IIb)
    }

    /// Short tag used on the command line and in emitted tables.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Ia => "1a",
            Self::Ib => "1b",
            Self::IIa => "2a",
            Self::IIb => "2b",
        }
    }
}

impl fmt::Display for ContrastClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ContrastClass {
    type Err = EvidenceError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', ' '], "").as_str() {
            "1a" | "ia" => Ok(Self::Ia),
            "1b" | "ib" => Ok(Self::Ib),
            "2a" | "iia" => Ok(Self::IIa),
            "2b" | "iib" => Ok(Self::IIb),
            _ => Err(EvidenceError::InvalidContrast(format!(
                "unknown class {s:?} (expected 1a, 1b, 2a or 2b)"
            ))),
        }
    }
}

/// Which hypothesis of the contrast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    H1,
    H2,
}

/// A hypothesis contrast `H1: θ ∈ Θ1` vs `H2: θ ∈ Θ2`.
///
/// Only `IIb` carries free parameters; the other classes fix `Θ2` at (or
/// starting from) 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisContrast {
    class: ContrastClass,
    theta2_left: f64,
    theta2_right: f64,
}

impl HypothesisContrast {
    /// `θ ∈ [0, 1/2]` vs `θ = 1/2`.
    pub fn one_sided() -> Self {
        Self {
            class: ContrastClass::Ia,
            theta2_left: 0.5,
            theta2_right: 0.5,
        }
    }

    /// `θ ∈ [0, 1/2]` vs `θ ∈ (1/2, 1]`.
    pub fn halves() -> Self {
        Self {
            class: ContrastClass::Ib,
            theta2_left: 0.5,
            theta2_right: 1.0,
        }
    }

    /// `θ ∈ [0, 1]` vs `θ = 1/2`.
    pub fn point_null() -> Self {
        Self {
            class: ContrastClass::IIa,
            theta2_left: 0.5,
            theta2_right: 0.5,
        }
    }

    /// `θ ∈ [0, 1]` vs `θ ∈ [left, right]`; the interval must be symmetric
    /// around 1/2 and strictly inside `(0, 1)`.
    pub fn interval_null(left: f64, right: f64) -> Result<Self> {
        if !(left > 0.0 && left < 0.5 && right > 0.5 && right < 1.0) {
            return Err(EvidenceError::InvalidContrast(format!(
                "need 0 < θ2l < 1/2 < θ2r < 1, got [{left}, {right}]"
            )));
        }
        if ((left + right) - 1.0).abs() > 1e-9 {
            return Err(EvidenceError::InvalidContrast(format!(
                "Θ2 = [{left}, {right}] is not symmetric around 1/2"
            )));
        }
        Ok(Self {
            class: ContrastClass::IIb,
            theta2_left: left,
            theta2_right: right,
        })
    }

    /// `IIb` contrast with `Θ2 = [1/2 - width/2, 1/2 + width/2]`.
    pub fn interval_null_width(width: f64) -> Result<Self> {
        Self::interval_null(0.5 - 0.5 * width, 0.5 + 0.5 * width)
    }

    /// Build a contrast from a class tag; `theta2` is required for `IIb` and
    /// ignored otherwise.
    pub fn from_class(class: ContrastClass, theta2: Option<(f64, f64)>) -> Result<Self> {
        match class {
            ContrastClass::Ia => Ok(Self::one_sided()),
            ContrastClass::Ib => Ok(Self::halves()),
            ContrastClass::IIa => Ok(Self::point_null()),
            ContrastClass::IIb => {
                let (l, r) =
                    theta2.ok_or_else(|| EvidenceError::InvalidContrast("class 2b requires a Θ2 interval".into()))?;
                Self::interval_null(l, r)
            }
        }
    }

    pub fn class(&self) -> ContrastClass {
        self.class
    }

    pub fn theta2_left(&self) -> f64 {
        self.theta2_left
    }

    pub fn theta2_right(&self) -> f64 {
        self.theta2_right
    }

    /// Width of `Θ2` for the nested classes; zero for `Ia`, `Ib` and `IIa`.
    pub fn width(&self) -> f64 {
        match self.class {
            ContrastClass::IIb => self.theta2_right - self.theta2_left,
            _ => 0.0,
        }
    }

    pub fn is_nested(&self) -> bool {
        self.class.is_nested()
    }

    pub fn theta1(&self) -> Interval {
        match self.class {
            ContrastClass::Ia | ContrastClass::Ib => Interval::new(0.0, 0.5),
            ContrastClass::IIa | ContrastClass::IIb => Interval::new(0.0, 1.0),
        }
    }

    /// `Θ2`. For `Ib` the half-open `(1/2, 1]` is treated as closed.
    pub fn theta2(&self) -> Interval {
        Interval::new(self.theta2_left, self.theta2_right)
    }

    /// `Θ1 ∪ Θ2`, which is also the integration domain of the volume.
    pub fn parameter_space(&self) -> Interval {
        match self.class {
            ContrastClass::Ia => Interval::new(0.0, 0.5),
            _ => Interval::new(0.0, 1.0),
        }
    }

    pub fn interval(&self, side: Side) -> Interval {
        match side {
            Side::H1 => self.theta1(),
            Side::H2 => self.theta2(),
        }
    }
}

impl fmt::Display for HypothesisContrast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class {
            ContrastClass::IIb => write!(f, "2b[{}, {}]", self.theta2_left, self.theta2_right),
            c => write!(f, "{c}"),
        }
    }
}

/// `ln L(θ) = x ln θ + (n - x) ln(1 - θ)`, with `0 ln 0 = 0`.
pub fn log_likelihood(theta: f64, obs: &Observation) -> f64 {
    xlogy(obs.x(), theta) + xlogy(obs.tails(), 1.0 - theta)
}

/// The hypothesis whose constrained maximum sits in the likelihood-ratio
/// denominator: `H2`, except for `Ib` with `x/n > 1/2`.
pub fn denominator_side(hc: &HypothesisContrast, obs: &Observation) -> Side {
    match hc.class() {
        ContrastClass::Ib if obs.ratio() > 0.5 => Side::H1,
        _ => Side::H2,
    }
}

/// Maximizer of `L(θ)` restricted to the interval of `side`.
pub fn constrained_mle(hc: &HypothesisContrast, side: Side, obs: &Observation) -> f64 {
    hc.interval(side).clamp(obs.ratio())
}

/// Constrained maximizer for the denominator hypothesis.
pub fn denominator_mle(hc: &HypothesisContrast, obs: &Observation) -> f64 {
    constrained_mle(hc, denominator_side(hc, obs), obs)
}

/// Maximizer of `L(θ)` over `Θ1 ∪ Θ2`.
pub fn unconstrained_mle(hc: &HypothesisContrast, obs: &Observation) -> f64 {
    hc.parameter_space().clamp(obs.ratio())
}

/// `KLD[Bin(n, θ1) || Bin(n, θ2)]` in closed form.
///
/// Infinite when `θ2 ∈ {0, 1}` and `θ1` puts mass where `θ2` has none.
pub fn kld(theta1: f64, theta2: f64, n: f64) -> f64 {
    let heads = xlogy(theta1, theta1) - xlogy(theta1, theta2);
    let tails = xlogy(1.0 - theta1, 1.0 - theta1) - xlogy(1.0 - theta1, 1.0 - theta2);
    (n * (heads + tails)).max(0.0)
}

/// Observed KL divergence: the divergence evaluated at `θ1 = x/n`, written
/// in terms of the counts.
pub fn kld_obs(obs: &Observation, theta_hat_i: f64) -> f64 {
    let (x, t, n) = (obs.x(), obs.tails(), obs.n());
    xlogy(x, x / n) + xlogy(t, t / n) - xlogy(x, theta_hat_i) - xlogy(t, 1.0 - theta_hat_i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(n: f64, x: f64) -> Observation {
        Observation::new(n, x).unwrap()
    }

    #[test]
    fn log_likelihood_examples() {
        assert!((log_likelihood(0.5, &obs(10.0, 5.0)) - 10.0 * 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(log_likelihood(0.0, &obs(7.0, 0.0)), 0.0);
        let expected = 20.0 * 0.4f64.ln() + 30.0 * 0.6f64.ln();
        assert!((log_likelihood(0.4, &obs(50.0, 20.0)) - expected).abs() < 1e-12);
        assert!((expected + 33.650).abs() < 1e-3);
        assert_eq!(log_likelihood(0.0, &obs(7.0, 2.0)), f64::NEG_INFINITY);
        assert_eq!(log_likelihood(1.0, &obs(7.0, 7.0)), 0.0);
    }

    #[test]
    fn observation_validation() {
        assert!(Observation::new(0.0, 0.0).is_err());
        assert!(Observation::new(5.0, 6.0).is_err());
        assert!(Observation::new(5.0, -0.1).is_err());
        assert!(Observation::new(f64::NAN, 1.0).is_err());
        assert!(Observation::from_ratio(5.0, 1.1).is_err());
        let o = Observation::from_ratio(3.7, 1.0).unwrap();
        assert_eq!(o.x(), 3.7);
        assert_eq!(obs(12.5, 2.5).ratio(), 0.2);
    }

    #[test]
    fn contrast_construction() {
        assert!(HypothesisContrast::interval_null(0.4, 0.6).is_ok());
        assert!(HypothesisContrast::interval_null(0.4, 0.7).is_err());
        assert!(HypothesisContrast::interval_null(0.0, 1.0).is_err());
        assert!(HypothesisContrast::interval_null(0.5, 0.5).is_err());
        assert!(HypothesisContrast::from_class(ContrastClass::IIb, None).is_err());
        let w = HypothesisContrast::interval_null_width(0.2).unwrap();
        assert!((w.width() - 0.2).abs() < 1e-15);
        assert_eq!(HypothesisContrast::point_null().width(), 0.0);
        assert_eq!(HypothesisContrast::one_sided().width(), 0.0);
        assert_eq!("2B".parse::<ContrastClass>().unwrap(), ContrastClass::IIb);
        assert_eq!("I_a".parse::<ContrastClass>().unwrap(), ContrastClass::Ia);
        assert!("3a".parse::<ContrastClass>().is_err());
    }

    #[test]
    fn parameter_space_unions() {
        for hc in [
            HypothesisContrast::halves(),
            HypothesisContrast::point_null(),
            HypothesisContrast::interval_null(0.3, 0.7).unwrap(),
        ] {
            assert_eq!(hc.parameter_space(), Interval::new(0.0, 1.0));
        }
        assert_eq!(
            HypothesisContrast::one_sided().parameter_space(),
            Interval::new(0.0, 0.5)
        );
    }

    #[test]
    fn constrained_mle_examples() {
        let hc = HypothesisContrast::interval_null(0.4, 0.6).unwrap();
        assert_eq!(constrained_mle(&hc, Side::H2, &obs(10.0, 7.0)), 0.6);
        assert_eq!(constrained_mle(&hc, Side::H2, &obs(10.0, 5.0)), 0.5);
        let ia = HypothesisContrast::one_sided();
        for x in [0.0, 1.0, 3.0, 9.0] {
            assert_eq!(constrained_mle(&ia, Side::H2, &obs(10.0, x)), 0.5);
        }
        let ib = HypothesisContrast::halves();
        let o = obs(10.0, 3.0);
        assert_eq!(denominator_side(&ib, &o), Side::H2);
        assert_eq!(denominator_mle(&ib, &o), 0.5);
        let o = obs(9.0, 7.0);
        assert_eq!(denominator_side(&ib, &o), Side::H1);
        assert_eq!(denominator_mle(&ib, &o), 0.5);
        assert_eq!(denominator_side(&ib, &obs(10.0, 5.0)), Side::H2);
    }

    #[test]
    fn kld_examples() {
        assert_eq!(kld(0.3, 0.3, 17.0), 0.0);
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kld(0.5, 0.25, 1.0) - expected).abs() < 1e-15);
        assert!((kld(0.5, 0.25, 1.0) - 0.14384).abs() < 1e-5);
        assert_eq!(kld(0.2, 0.0, 3.0), f64::INFINITY);
        assert_eq!(kld(0.0, 0.0, 3.0), 0.0);
        assert!((kld(0.0, 0.5, 7.0) - 7.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn kld_obs_examples() {
        assert_eq!(kld_obs(&obs(10.0, 5.0), 0.5), 0.0);
        assert!((kld_obs(&obs(7.0, 0.0), 0.5) - 7.0 * 2f64.ln()).abs() < 1e-12);
        assert!((kld_obs(&obs(7.0, 0.0), 0.5) - 4.8520).abs() < 1e-4);
        let o = obs(50.0, 10.0);
        assert!((kld_obs(&o, 0.5) - kld(0.2, 0.5, 50.0)).abs() < 1e-12);
        let direct = log_likelihood(0.2, &o) - log_likelihood(0.5, &o);
        assert!((kld_obs(&o, 0.5) - direct).abs() < 1e-12);
    }

    /// Σₓ C(n,x) θ1ˣ(1−θ1)ⁿ⁻ˣ · ln[L(θ1)/L(θ2)], summed term by term.
    fn kld_brute_force(theta1: f64, theta2: f64, n: u32) -> f64 {
        let mut total = 0.0;
        let mut binom = 1.0f64;
        for x in 0..=n {
            if x > 0 {
                binom = binom * f64::from(n - x + 1) / f64::from(x);
            }
            let (xf, tf) = (f64::from(x), f64::from(n - x));
            let pmf = binom * theta1.powi(x as i32) * (1.0 - theta1).powi((n - x) as i32);
            let log_ratio = xf * (theta1 / theta2).ln() + tf * ((1.0 - theta1) / (1.0 - theta2)).ln();
            total += pmf * log_ratio;
        }
        total
    }

    #[test]
    fn kld_matches_binomial_summation() {
        for n in 1..=12u32 {
            for &(a, b) in &[(0.3, 0.5), (0.5, 0.25), (0.1, 0.9), (0.45, 0.55), (0.7, 0.2)] {
                let closed = kld(a, b, f64::from(n));
                let brute = kld_brute_force(a, b, n);
                assert!((closed - brute).abs() < 1e-10, "n={n} a={a} b={b}: {closed} vs {brute}");
            }
        }
    }
}
