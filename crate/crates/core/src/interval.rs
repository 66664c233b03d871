//! Real intervals with independently open/closed, possibly infinite endpoints,
//! and the sign classification of an interval.

use crate::error::{Error, Result};

/// A nonempty real interval. Infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
    lower_closed: bool,
    upper_closed: bool,
}

/// Weak/strict sign classification of an interval.
///
/// `Positive`/`Negative` are strict (the interval excludes zero);
/// `NonNegative`/`NonPositive` are weak (zero is an endpoint of the interval);
/// `NotDetermining` means the interval contains values of both signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignDecision {
    Positive,
    NonNegative,
    Negative,
    NonPositive,
    NotDetermining,
}

impl SignDecision {
    /// Whether this decision pins the sign (weakly or strictly).
    pub fn is_determining(self) -> bool {
        self != SignDecision::NotDetermining
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignDecision::Positive => "positive",
            SignDecision::NonNegative => "non-negative",
            SignDecision::Negative => "negative",
            SignDecision::NonPositive => "non-positive",
            SignDecision::NotDetermining => "none",
        }
    }
}

impl std::str::FromStr for SignDecision {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "positive" => SignDecision::Positive,
            "non-negative" => SignDecision::NonNegative,
            "negative" => SignDecision::Negative,
            "non-positive" => SignDecision::NonPositive,
            "none" => SignDecision::NotDetermining,
            other => return Err(format!("unknown sign decision {other:?}")),
        })
    }
}

/// Side of the band (−δ, δ) that an interval avoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandSide {
    AboveDelta,
    BelowMinusDelta,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::Input("interval endpoint is NaN".into()));
        }
        if lower > upper {
            return Err(Error::Input(format!(
                "interval has lower {lower} > upper {upper}"
            )));
        }
        if lower == upper && !(lower_closed && upper_closed) {
            return Err(Error::Input(format!("degenerate open interval at {lower}")));
        }
        if lower == f64::NEG_INFINITY && lower_closed {
            return Err(Error::Input("lower endpoint −∞ must be open".into()));
        }
        if upper == f64::INFINITY && upper_closed {
            return Err(Error::Input("upper endpoint +∞ must be open".into()));
        }
        Ok(Interval {
            lower,
            upper,
            lower_closed,
            upper_closed,
        })
    }

    /// (lower, upper), both endpoints open.
    pub fn open(lower: f64, upper: f64) -> Self {
        Interval::new(lower, upper, false, false).expect("invalid open interval")
    }

    /// [lower, upper), closed below.
    pub fn closed_open(lower: f64, upper: f64) -> Self {
        Interval::new(lower, upper, true, false).expect("invalid interval")
    }

    /// (lower, upper], closed above.
    pub fn open_closed(lower: f64, upper: f64) -> Self {
        Interval::new(lower, upper, false, true).expect("invalid interval")
    }

    /// [lower, upper], both endpoints closed.
    pub fn closed(lower: f64, upper: f64) -> Self {
        Interval::new(lower, upper, true, true).expect("invalid interval")
    }

    /// The whole real line.
    pub fn all() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Membership test consistent with the endpoint flags.
    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lower || (x == self.lower && self.lower_closed);
        let below = x < self.upper || (x == self.upper && self.upper_closed);
        above && below
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lower_ok = self.lower > other.lower
            || (self.lower == other.lower && (other.lower_closed || !self.lower_closed));
        let upper_ok = self.upper < other.upper
            || (self.upper == other.upper && (other.upper_closed || !self.upper_closed));
        lower_ok && upper_ok
    }

    /// The reflected interval −I (endpoints negated, closure flags swapped).
    pub fn reflect(&self) -> Self {
        Interval {
            lower: -self.upper,
            upper: -self.lower,
            lower_closed: self.upper_closed,
            upper_closed: self.lower_closed,
        }
    }

    /// The scaled interval k·I for k > 0.
    pub fn scale(&self, k: f64) -> Self {
        debug_assert!(k > 0.0);
        Interval {
            lower: k * self.lower,
            upper: k * self.upper,
            lower_closed: self.lower_closed,
            upper_closed: self.upper_closed,
        }
    }
}

/// Classifies the sign content of an interval.
pub fn classify(interval: &Interval) -> SignDecision {
    let l = interval.lower;
    let u = interval.upper;
    if l < 0.0 && u > 0.0 {
        return SignDecision::NotDetermining;
    }
    if l > 0.0 || (l == 0.0 && !interval.lower_closed) {
        return SignDecision::Positive;
    }
    if u < 0.0 || (u == 0.0 && !interval.upper_closed) {
        return SignDecision::Negative;
    }
    if l == 0.0 {
        // lower endpoint closed at zero
        return SignDecision::NonNegative;
    }
    debug_assert!(u == 0.0 && interval.upper_closed);
    SignDecision::NonPositive
}

/// Reports whether the interval lies entirely above `delta` or entirely below
/// `−delta`, i.e. avoids the band [−δ, δ].
pub fn classify_outside(interval: &Interval, delta: f64) -> Option<BandSide> {
    debug_assert!(delta >= 0.0);
    let above = interval.lower > delta || (interval.lower == delta && !interval.lower_closed);
    if above {
        return Some(BandSide::AboveDelta);
    }
    let below = interval.upper < -delta || (interval.upper == -delta && !interval.upper_closed);
    if below {
        return Some(BandSide::BelowMinusDelta);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&Interval::open(0.3, 2.1)), SignDecision::Positive);
        assert_eq!(
            classify(&Interval::closed_open(0.0, 3.1)),
            SignDecision::NonNegative
        );
        assert_eq!(
            classify(&Interval::open(-0.2, 1.5)),
            SignDecision::NotDetermining
        );
        assert_eq!(
            classify(&Interval::open(-2.0, -0.1)),
            SignDecision::Negative
        );
        assert_eq!(
            classify(&Interval::open_closed(-2.0, 0.0)),
            SignDecision::NonPositive
        );
        assert_eq!(classify(&Interval::open(0.0, 1.0)), SignDecision::Positive);
        assert_eq!(classify(&Interval::open(-1.0, 0.0)), SignDecision::Negative);
    }

    #[test]
    fn membership_respects_flags() {
        let i = Interval::open_closed(0.3, 2.1);
        assert!(!i.contains(0.3));
        assert!(i.contains(2.1));
        assert!(i.contains(1.0));
        assert!(!i.contains(2.2));

        let all = Interval::all();
        assert!(all.contains(-1e300));
        assert!(all.contains(1e300));
    }

    #[test]
    fn invalid_intervals_rejected() {
        assert!(Interval::new(2.0, 1.0, false, false).is_err());
        assert!(Interval::new(1.0, 1.0, true, false).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0, true, true).is_err());
        assert!(Interval::new(0.0, f64::INFINITY, false, true).is_err());
        assert!(Interval::new(f64::NAN, 1.0, false, false).is_err());
    }

    #[test]
    fn reflect_swaps_closures() {
        let i = Interval::closed_open(0.0, 3.0);
        let r = i.reflect();
        assert_eq!(r.lower(), -3.0);
        assert_eq!(r.upper(), 0.0);
        assert!(!r.lower_closed());
        assert!(r.upper_closed());
        assert_eq!(classify(&r), SignDecision::NonPositive);
    }

    #[test]
    fn band_classification() {
        let i = Interval::open(0.6, 2.0);
        assert_eq!(classify_outside(&i, 0.5), Some(BandSide::AboveDelta));
        assert_eq!(classify_outside(&i, 0.7), None);
        let j = Interval::open(-3.0, -0.51);
        assert_eq!(classify_outside(&j, 0.5), Some(BandSide::BelowMinusDelta));
        // Open endpoint exactly at delta counts as avoiding the band.
        let k = Interval::open(0.5, 2.0);
        assert_eq!(classify_outside(&k, 0.5), Some(BandSide::AboveDelta));
    }

    #[test]
    fn subset_with_closures() {
        let inner = Interval::open(0.0, 1.0);
        let outer = Interval::closed(0.0, 1.0);
        assert!(inner.is_subset_of(&outer));
        assert!(!outer.is_subset_of(&inner));
        assert!(inner.is_subset_of(&inner));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn classify_agrees_with_membership(l in -5.0f64..5.0, w in 0.01f64..5.0,
                                           lc in any::<bool>(), uc in any::<bool>()) {
            let iv = Interval::new(l, l + w, lc, uc).unwrap();
            let d = classify(&iv);
            // Sample points inside and check consistency with the decision.
            for k in 0..=20 {
                let x = l + w * (k as f64) / 20.0;
                if !iv.contains(x) { continue; }
                match d {
                    SignDecision::Positive => prop_assert!(x > 0.0),
                    SignDecision::NonNegative => prop_assert!(x >= 0.0),
                    SignDecision::Negative => prop_assert!(x < 0.0),
                    SignDecision::NonPositive => prop_assert!(x <= 0.0),
                    SignDecision::NotDetermining => {}
                }
            }
            if d == SignDecision::NotDetermining {
                prop_assert!(iv.lower() < 0.0 && iv.upper() > 0.0);
            }
        }

        #[test]
        fn reflect_is_involution(l in -5.0f64..5.0, w in 0.01f64..5.0,
                                 lc in any::<bool>(), uc in any::<bool>()) {
            let iv = Interval::new(l, l + w, lc, uc).unwrap();
            prop_assert_eq!(iv.reflect().reflect(), iv);
        }
    }
}
