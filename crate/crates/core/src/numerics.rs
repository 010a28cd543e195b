//! Exact rationals, closed half-lines and interval partitions of `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `p/q`, failing on a zero denominator.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(p.into(), q)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.0.is_positive() {
            1
        } else if self.0.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    /// Exact integer power. Negative exponents require a nonzero base.
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Rational) -> Self {
        Rational((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    /// The rational cube root, if one exists.
    pub fn cube_root(&self) -> Option<Self> {
        let n = self.numer().cbrt();
        let d = self.denom().cbrt();
        if &(&n * &n * &n) == self.numer() && &(&d * &d * &d) == self.denom() {
            Some(Rational(BigRational::new(n, d)))
        } else {
            None
        }
    }

    /// Lossy conversion for display-only contexts such as benchmarks.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

/// `rational(p, q)` in lowest terms.
pub fn rational(p: i64, q: i64) -> Result<Rational> {
    Rational::new(p, q)
}

/// Shorthand for literals known to be valid; panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p, q).expect("nonzero denominator")
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `p` or `p/q` with optional leading sign on `p`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            message: format!("not a rational: {s:?}"),
        };
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p, q),
            None => (s, "1"),
        };
        let valid = |t: &str, signed: bool| {
            let digits = if signed {
                t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t)
            } else {
                t
            };
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid(p, true) || !valid(q, false) {
            return Err(bad());
        }
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Rational::new(p, q)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division panics on a zero divisor, like the integer types; fallible callers
// use `checked_div`.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Orientation of a closed half-line with a finite endpoint.
///
/// Ordered `AtLeast < AtMost`, i.e. `-1 < +1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `[a, +inf)`, encoded as -1.
    AtLeast,
    /// `(-inf, a]`, encoded as +1.
    AtMost,
}

impl Side {
    pub fn from_sign(sign: i32) -> Option<Side> {
        match sign {
            -1 => Some(Side::AtLeast),
            1 => Some(Side::AtMost),
            _ => None,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Side::AtLeast => -1,
            Side::AtMost => 1,
        }
    }
}

/// A closed half-line `[a, inf)` or `(-inf, a]`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfLinePair {
    pub a: Rational,
    pub b: Side,
}

impl HalfLinePair {
    pub fn new(a: Rational, b: Side) -> Self {
        HalfLinePair { a, b }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self.b {
            Side::AtLeast => x >= &self.a,
            Side::AtMost => x <= &self.a,
        }
    }

    /// The four pairs every partition of `[0, 1]` starts from.
    pub fn corners() -> [HalfLinePair; 4] {
        [
            HalfLinePair::new(Rational::zero(), Side::AtLeast),
            HalfLinePair::new(Rational::zero(), Side::AtMost),
            HalfLinePair::new(Rational::one(), Side::AtLeast),
            HalfLinePair::new(Rational::one(), Side::AtMost),
        ]
    }
}

impl fmt::Display for HalfLinePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b.sign())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        match lo.cmp(&hi) {
            Ordering::Greater => Err(Error::Construction(format!("interval bounds reversed: {lo} > {hi}"))),
            Ordering::Equal if !(lo_closed && hi_closed) => Err(Error::Construction(format!(
                "degenerate interval at {lo} must be closed"
            ))),
            _ => Ok(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Interval::new(lo, hi, true, true)
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn unit() -> Self {
        Interval {
            lo: Rational::zero(),
            hi: Rational::one(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    /// A rational strictly inside the interval, or the point itself when
    /// degenerate.
    pub fn representative(&self) -> Rational {
        if self.is_degenerate() {
            return self.lo.clone();
        }
        let mid = self.lo.midpoint(&self.hi);
        if self.contains(&mid) {
            mid
        } else {
            self.lo.midpoint(&mid)
        }
    }

    /// Intersection with a half-line, `None` when empty.
    pub fn intersect(&self, h: &HalfLinePair) -> Option<Interval> {
        let (mut lo, mut hi) = ((self.lo.clone(), self.lo_closed), (self.hi.clone(), self.hi_closed));
        match h.b {
            Side::AtLeast => {
                if h.a > lo.0 {
                    lo = (h.a.clone(), true);
                }
            }
            Side::AtMost => {
                if h.a < hi.0 {
                    hi = (h.a.clone(), true);
                }
            }
        }
        match lo.0.cmp(&hi.0) {
            Ordering::Greater => None,
            Ordering::Equal if !(lo.1 && hi.1) => None,
            _ => Some(Interval {
                lo: lo.0,
                hi: hi.0,
                lo_closed: lo.1,
                hi_closed: hi.1,
            }),
        }
    }

    /// Intersection with the complement of a closed half-line (an open
    /// half-line), `None` when empty.
    pub fn intersect_complement(&self, h: &HalfLinePair) -> Option<Interval> {
        let (mut lo, mut hi) = ((self.lo.clone(), self.lo_closed), (self.hi.clone(), self.hi_closed));
        match h.b {
            // complement of [a, inf) is (-inf, a)
            Side::AtLeast => {
                if h.a <= hi.0 {
                    hi = (h.a.clone(), false);
                }
            }
            // complement of (-inf, a] is (a, inf)
            Side::AtMost => {
                if h.a >= lo.0 {
                    lo = (h.a.clone(), false);
                }
            }
        }
        match lo.0.cmp(&hi.0) {
            Ordering::Greater => None,
            Ordering::Equal if !(lo.1 && hi.1) => None,
            _ => Some(Interval {
                lo: lo.0,
                hi: hi.0,
                lo_closed: lo.1,
                hi_closed: hi.1,
            }),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// `interval_contains(I, x)`.
pub fn interval_contains(interval: &Interval, x: &Rational) -> bool {
    interval.contains(x)
}

/// Ordered, pairwise-disjoint intervals whose union is exactly `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPartition {
    intervals: Vec<Interval>,
}

impl IntervalPartition {
    /// Cuts `[0, 1]` at the sorted half-line pairs: consecutive pairs
    /// `(a_r, b_r), (a_{r+1}, b_{r+1})` bound the `r`-th interval, closed on
    /// the left iff `b_r = -1` and closed on the right iff `b_{r+1} = +1`.
    pub fn from_pairs(pairs: &[HalfLinePair]) -> Result<Self> {
        if let Some(w) = pairs.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Construction(format!(
                "half-line pairs not strictly sorted: {} before {}",
                w[0], w[1]
            )));
        }
        for corner in HalfLinePair::corners() {
            if pairs.binary_search(&corner).is_err() {
                return Err(Error::Construction(format!("missing corner pair {corner}")));
            }
        }
        let unit = Interval::unit();
        if let Some(p) = pairs.iter().find(|p| !unit.contains(&p.a)) {
            return Err(Error::Construction(format!("pair {p} lies outside [0,1]")));
        }
        let intervals = pairs
            .windows(2)
            .map(|w| {
                let (l, r) = (&w[0], &w[1]);
                Interval {
                    lo: l.a.clone(),
                    hi: r.a.clone(),
                    lo_closed: l.b == Side::AtLeast,
                    hi_closed: r.b == Side::AtMost,
                }
            })
            .collect();
        Ok(IntervalPartition { intervals })
    }

    /// Sorts, deduplicates, adds the corners and drops pairs outside `[0,1]`.
    pub fn from_unsorted_pairs(pairs: impl IntoIterator<Item = HalfLinePair>) -> (Self, Vec<HalfLinePair>) {
        let unit = Interval::unit();
        let mut z: Vec<HalfLinePair> = pairs.into_iter().filter(|p| unit.contains(&p.a)).collect();
        z.extend(HalfLinePair::corners());
        z.sort();
        z.dedup();
        let part = IntervalPartition::from_pairs(&z).expect("normalized pairs always form a partition");
        (part, z)
    }

    /// The trivial partition `{[0,0], (0,1), [1,1]}`.
    pub fn trivial() -> Self {
        IntervalPartition::from_pairs(&HalfLinePair::corners()).expect("corners form a partition")
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Index of the interval containing `x`, `None` outside `[0, 1]`.
    pub fn locate(&self, x: &Rational) -> Option<usize> {
        // intervals are sorted by left endpoint; find the last one starting at or before x
        let idx = self.intervals.partition_point(|iv| iv.lo < *x || (iv.lo == *x && iv.lo_closed));
        let candidates = idx.saturating_sub(2)..(idx + 1).min(self.intervals.len());
        candidates.into_iter().find(|&i| self.intervals[i].contains(x))
    }

    /// Lines `[lo,hi] flags`, one per interval.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (r, iv) in self.intervals.iter().enumerate() {
            out.push_str(&format!(
                "{} {} {}{}\n",
                r + 1,
                iv,
                if iv.lo_closed { 'c' } else { 'o' },
                if iv.hi_closed { 'c' } else { 'o' }
            ));
        }
        out
    }
}

/// Exact lowest common multiple of the denominators.
pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_reduces_to_lowest_terms() {
        assert_eq!(rational(38, 162).unwrap().to_string(), "19/81");
        assert_eq!(rational(0, 7).unwrap().to_string(), "0");
        let r = rational(-6, -4).unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn zero_denominator_is_an_error() {
        assert!(matches!(rational(1, 0), Err(Error::DivisionByZero)));
        assert!("3/0".parse::<Rational>().is_err());
        assert!(Rational::zero().recip().is_err());
    }

    #[test]
    fn parse_rejects_junk() {
        for s in ["", "1/", "/2", "1/-2", "a", "1.5", "--1", "1/2/3"] {
            assert!(s.parse::<Rational>().is_err(), "{s}");
        }
        assert_eq!("-51/32".parse::<Rational>().unwrap(), ratio(-51, 32));
        assert_eq!("+4/2".parse::<Rational>().unwrap().to_string(), "2");
    }

    #[test]
    fn cube_roots() {
        assert_eq!(ratio(27, 8).cube_root(), Some(ratio(3, 2)));
        assert_eq!(ratio(27, 1).cube_root(), Some(ratio(3, 1)));
        assert_eq!(ratio(2, 1).cube_root(), None);
        assert_eq!(ratio(-8, 27).cube_root(), Some(ratio(-2, 3)));
    }

    #[test]
    fn containment_respects_flags() {
        let point = Interval::point(Rational::zero());
        assert!(point.contains(&Rational::zero()));
        let open = Interval::new(Rational::zero(), Rational::one(), false, false).unwrap();
        assert!(!open.contains(&Rational::zero()));
        assert!(interval_contains(&open, &ratio(1, 2)));
        assert!(!open.contains(&Rational::one()));
        assert!(Interval::new(ratio(1, 2), ratio(1, 2), true, false).is_err());
    }

    #[test]
    fn corner_pairs_give_trivial_partition() {
        let p = IntervalPartition::from_pairs(&HalfLinePair::corners()).unwrap();
        let shown: Vec<String> = p.intervals().iter().map(|i| i.to_string()).collect();
        assert_eq!(shown, ["[0,0]", "(0,1)", "[1,1]"]);
    }

    #[test]
    fn duplicate_endpoint_gives_degenerate_interval() {
        let half = ratio(1, 2);
        let (p, z) = IntervalPartition::from_unsorted_pairs([
            HalfLinePair::new(half.clone(), Side::AtMost),
            HalfLinePair::new(half.clone(), Side::AtLeast),
        ]);
        assert_eq!(z.len(), 6);
        let shown: Vec<String> = p.intervals().iter().map(|i| i.to_string()).collect();
        assert_eq!(shown, ["[0,0]", "(0,1/2)", "[1/2,1/2]", "(1/2,1)", "[1,1]"]);
        assert_eq!(p.locate(&half), Some(2));
    }

    #[test]
    fn from_pairs_rejects_bad_input() {
        let mut z = HalfLinePair::corners().to_vec();
        z.swap(0, 1);
        assert!(IntervalPartition::from_pairs(&z).is_err());
        assert!(IntervalPartition::from_pairs(&HalfLinePair::corners()[1..]).is_err());
        let mut z = HalfLinePair::corners().to_vec();
        z.push(HalfLinePair::new(ratio(3, 2), Side::AtLeast));
        assert!(IntervalPartition::from_pairs(&z).is_err());
    }

    #[test]
    fn half_line_intersection() {
        let unit = Interval::unit();
        let h = HalfLinePair::new(ratio(1, 3), Side::AtLeast);
        assert_eq!(unit.intersect(&h).unwrap().to_string(), "[1/3,1]");
        assert_eq!(unit.intersect_complement(&h).unwrap().to_string(), "[0,1/3)");
        let h = HalfLinePair::new(Rational::zero(), Side::AtMost);
        assert_eq!(unit.intersect(&h).unwrap().to_string(), "[0,0]");
        assert_eq!(unit.intersect_complement(&h).unwrap().to_string(), "(0,1]");
        let open = Interval::new(Rational::zero(), Rational::one(), false, true).unwrap();
        assert!(open.intersect(&h).is_none());
        let h = HalfLinePair::new(ratio(2, 1), Side::AtLeast);
        assert!(unit.intersect(&h).is_none());
        assert_eq!(unit.intersect_complement(&h).unwrap(), unit);
    }

    fn arb_unit_rational() -> impl Strategy<Value = Rational> {
        (0i64..=1000, 1i64..=1000).prop_map(|(p, q)| {
            let (p, q) = if p > q { (q, p) } else { (p, q) };
            ratio(p, q)
        })
    }

    fn arb_pairs() -> impl Strategy<Value = Vec<HalfLinePair>> {
        prop::collection::vec((arb_unit_rational(), any::<bool>()), 0..12).prop_map(|v| {
            v.into_iter()
                .map(|(a, up)| HalfLinePair::new(a, if up { Side::AtMost } else { Side::AtLeast }))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn partitions_cover_exactly_once(pairs in arb_pairs(), xs in prop::collection::vec(arb_unit_rational(), 1..20)) {
            let (part, z) = IntervalPartition::from_unsorted_pairs(pairs.clone());
            prop_assert_eq!(part.len() + 1, z.len());
            prop_assert_eq!(part.intervals()[0].to_string(), "[0,0]");
            prop_assert_eq!(part.intervals().last().unwrap().to_string(), "[1,1]");
            let mut probes = xs;
            probes.extend(z.iter().map(|p| p.a.clone()));
            for x in &probes {
                let hits = part.intervals().iter().filter(|iv| iv.contains(x)).count();
                prop_assert_eq!(hits, 1, "{} hit {} intervals", x, hits);
                let r = part.locate(x).unwrap();
                prop_assert!(part.intervals()[r].contains(x));
            }
            for iv in part.intervals() {
                prop_assert!(iv.contains(&iv.representative()));
            }
            // every half-line in Z is constant on every interval
            for h in &z {
                for iv in part.intervals() {
                    let inside = h.contains(&iv.representative());
                    if iv.lo_closed {
                        prop_assert_eq!(h.contains(&iv.lo), inside);
                    }
                    if iv.hi_closed {
                        prop_assert_eq!(h.contains(&iv.hi), inside);
                    }
                }
            }
        }

        #[test]
        fn arithmetic_is_exact(a in (-500i64..500, 1i64..500), b in (-500i64..500, 1i64..500)) {
            let a = ratio(a.0, a.1);
            let b = ratio(b.0, b.1);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            let shown = a.to_string();
            prop_assert_eq!(shown.parse::<Rational>().unwrap(), a);
        }
    }
}
