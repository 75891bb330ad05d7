//! Exact arithmetic on the unit interval and the bi-Gödel / twist-lattice
//! operations.
//!
//! Every operation here is order-based: the Gödel connectives only ever
//! select one of their inputs or a constant, so values never leave the set
//! of rationals fed in (plus 0 and 1). The one genuinely arithmetic step is
//! `1 - x`, used by the dual transform.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("value {0} out of [0,1]")]
    OutOfRange(String),
    #[error("{op} expects {expected} argument(s), got {got}")]
    Arity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
}

/// An exact rational in `[0, 1]`, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitValue(BigRational);

impl UnitValue {
    pub fn zero() -> Self {
        UnitValue(BigRational::zero())
    }

    pub fn one() -> Self {
        UnitValue(BigRational::one())
    }

    /// Builds `numer / denom`, reducing to lowest terms.
    pub fn new(numer: u64, denom: u64) -> Result<Self, ValueError> {
        if denom == 0 {
            return Err(ValueError::ZeroDenominator(format!("{numer}/0")));
        }
        Self::from_ratio(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_ratio(r: BigRational) -> Result<Self, ValueError> {
        if r.is_negative() || r > BigRational::one() {
            return Err(ValueError::OutOfRange(fmt_ratio(&r)));
        }
        Ok(UnitValue(r))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `1 - x`.
    pub fn complement(&self) -> Self {
        UnitValue(BigRational::one() - &self.0)
    }

    /// True when numerator and denominator are coprime and the denominator
    /// is positive.
    pub fn is_canonical(&self) -> bool {
        self.0.denom().is_positive() && self.0.numer().gcd(self.0.denom()).is_one()
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_ratio(&self.0))
    }
}

impl fmt::Debug for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for UnitValue {
    type Err = ValueError;

    /// Parses `"a/b"` or `"a"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        let signed = |x: &str| {
            let body = x.strip_prefix('-').unwrap_or(x);
            digits(body)
        };
        if !signed(n) || !signed(d) {
            return Err(ValueError::Malformed(s.to_string()));
        }
        let n: BigInt = n.parse().map_err(|_| ValueError::Malformed(s.to_string()))?;
        let d: BigInt = d.parse().map_err(|_| ValueError::Malformed(s.to_string()))?;
        if d.is_zero() {
            return Err(ValueError::ZeroDenominator(s.to_string()));
        }
        UnitValue::from_ratio(BigRational::new(n, d))
    }
}

/// A point of the twist lattice: support of truth and support of falsity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairValue {
    pub pos: UnitValue,
    pub neg: UnitValue,
}

impl PairValue {
    pub fn new(pos: UnitValue, neg: UnitValue) -> Self {
        PairValue { pos, neg }
    }

    /// The designated value `(1, 0)`.
    pub fn top() -> Self {
        PairValue::new(UnitValue::one(), UnitValue::zero())
    }

    /// `(0, 1)`.
    pub fn bottom() -> Self {
        PairValue::new(UnitValue::zero(), UnitValue::one())
    }

    /// `(1, 1)`: both true and false.
    pub fn both() -> Self {
        PairValue::new(UnitValue::one(), UnitValue::one())
    }

    /// `(0, 0)`: neither.
    pub fn neither() -> Self {
        PairValue::new(UnitValue::zero(), UnitValue::zero())
    }

    /// `(x, y) -> (1 - y, 1 - x)`.
    pub fn dual(&self) -> Self {
        PairValue::new(self.neg.complement(), self.pos.complement())
    }
}

impl fmt::Display for PairValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.pos, self.neg)
    }
}

impl fmt::Debug for PairValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GodelOp {
    Meet,
    Join,
    Imp,
    Coimp,
}

/// Gödel implication on any totally ordered carrier with explicit top.
pub fn imp<T: Ord + Clone>(a: &T, b: &T, top: &T) -> T {
    if a <= b {
        top.clone()
    } else {
        b.clone()
    }
}

/// Gödel coimplication `b ⨪ a`: note the argument order.
pub fn coimp<T: Ord + Clone>(b: &T, a: &T, bottom: &T) -> T {
    if b <= a {
        bottom.clone()
    } else {
        b.clone()
    }
}

/// Applies a bi-Gödel operation. For `Coimp` the result is `a ⨪ b`, i.e.
/// the first argument is the minuend.
pub fn godel_apply(op: GodelOp, a: &UnitValue, b: &UnitValue) -> UnitValue {
    match op {
        GodelOp::Meet => a.min(b).clone(),
        GodelOp::Join => a.max(b).clone(),
        GodelOp::Imp => imp(a, b, &UnitValue::one()),
        GodelOp::Coimp => coimp(a, b, &UnitValue::zero()),
    }
}

/// Connectives of the two-valuation semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairConnective {
    Neg,
    And,
    Or,
    Imp,
    Coimp,
}

impl PairConnective {
    fn name(self) -> &'static str {
        match self {
            PairConnective::Neg => "neg",
            PairConnective::And => "and",
            PairConnective::Or => "or",
            PairConnective::Imp => "imp",
            PairConnective::Coimp => "coimp",
        }
    }

    fn arity(self) -> usize {
        if self == PairConnective::Neg {
            1
        } else {
            2
        }
    }
}

/// Propositional clause of the two-valuation semantics on a generic ordered
/// carrier. `x` and `y` are `(pos, neg)` pairs.
pub(crate) fn pair_step<T: Ord + Clone>(
    conn: PairConnective,
    x: (&T, &T),
    y: (&T, &T),
    zero: &T,
    one: &T,
) -> (T, T) {
    let (p, n) = x;
    let (p2, n2) = y;
    match conn {
        PairConnective::Neg => (n.clone(), p.clone()),
        PairConnective::And => (p.min(p2).clone(), n.max(n2).clone()),
        PairConnective::Or => (p.max(p2).clone(), n.min(n2).clone()),
        PairConnective::Imp => (imp(p, p2, one), coimp(n2, n, zero)),
        PairConnective::Coimp => (coimp(p, p2, zero), imp(n2, n, one)),
    }
}

pub fn pair_apply(conn: PairConnective, args: &[PairValue]) -> Result<PairValue, ValueError> {
    if args.len() != conn.arity() {
        return Err(ValueError::Arity {
            op: conn.name(),
            expected: conn.arity(),
            got: args.len(),
        });
    }
    let x = &args[0];
    let y = args.get(1).unwrap_or(x);
    let (pos, neg) = pair_step(
        conn,
        (&x.pos, &x.neg),
        (&y.pos, &y.neg),
        &UnitValue::zero(),
        &UnitValue::one(),
    );
    Ok(PairValue::new(pos, neg))
}

/// The truth (upward) order: more support of truth, less support of falsity.
pub fn truth_order_leq(a: &PairValue, b: &PairValue) -> bool {
    a.pos <= b.pos && a.neg >= b.neg
}

/// Partial comparison in the truth order.
pub fn truth_order_cmp(a: &PairValue, b: &PairValue) -> Option<Ordering> {
    match (truth_order_leq(a, b), truth_order_leq(b, a)) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (false, false) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(s: &str) -> UnitValue {
        s.parse().unwrap()
    }

    fn pv(a: &str, b: &str) -> PairValue {
        PairValue::new(u(a), u(b))
    }

    #[test]
    fn godel_examples() {
        assert_eq!(godel_apply(GodelOp::Imp, &u("1/2"), &u("1/3")), u("1/3"));
        assert_eq!(godel_apply(GodelOp::Imp, &u("1/3"), &u("1/2")), u("1"));
        assert_eq!(godel_apply(GodelOp::Coimp, &u("1/2"), &u("1/2")), u("0"));
        assert_eq!(godel_apply(GodelOp::Coimp, &u("1/2"), &u("1/3")), u("1/2"));
        assert_eq!(godel_apply(GodelOp::Meet, &u("1/2"), &u("1/3")), u("1/3"));
        assert_eq!(godel_apply(GodelOp::Join, &u("1/2"), &u("1/3")), u("1/2"));
    }

    #[test]
    fn pair_examples() {
        let p = pv("7/10", "3/5");
        let q = pv("2/5", "1/5");
        assert_eq!(
            pair_apply(PairConnective::Neg, &[p.clone()]).unwrap(),
            pv("3/5", "7/10")
        );
        assert_eq!(
            pair_apply(PairConnective::Imp, &[p.clone(), q.clone()]).unwrap(),
            pv("2/5", "0")
        );
        assert_eq!(
            pair_apply(PairConnective::And, &[PairValue::top(), PairValue::bottom()]).unwrap(),
            PairValue::bottom()
        );
        assert!(matches!(
            pair_apply(PairConnective::Neg, &[p.clone(), q.clone()]),
            Err(ValueError::Arity { .. })
        ));
        assert!(pair_apply(PairConnective::And, &[p]).is_err());
    }

    #[test]
    fn truth_order_examples() {
        assert!(truth_order_leq(&PairValue::bottom(), &PairValue::top()));
        let p = pv("7/10", "3/5");
        let q = pv("2/5", "1/5");
        assert!(!truth_order_leq(&p, &q));
        assert!(!truth_order_leq(&q, &p));
        assert_eq!(truth_order_cmp(&p, &q), None);
        let h = pv("1/2", "1/2");
        assert!(truth_order_leq(&h, &h));
    }

    #[test]
    fn lattice_corners() {
        // f <= n, b <= t, n and b incomparable
        let (t, f, b, n) = (
            PairValue::top(),
            PairValue::bottom(),
            PairValue::both(),
            PairValue::neither(),
        );
        assert!(truth_order_leq(&f, &n) && truth_order_leq(&f, &b));
        assert!(truth_order_leq(&n, &t) && truth_order_leq(&b, &t));
        assert_eq!(truth_order_cmp(&n, &b), None);
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(u("2/4").to_string(), "1/2");
        assert_eq!(u("1").to_string(), "1");
        assert_eq!(u("0/7").to_string(), "0");
        assert!(matches!("3/2".parse::<UnitValue>(), Err(ValueError::OutOfRange(_))));
        assert!(matches!("-1/2".parse::<UnitValue>(), Err(ValueError::OutOfRange(_))));
        assert!(matches!("1/0".parse::<UnitValue>(), Err(ValueError::ZeroDenominator(_))));
        assert!("0.5".parse::<UnitValue>().is_err());
        assert!("".parse::<UnitValue>().is_err());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(pv("7/10", "3/5").dual(), pv("2/5", "3/10"));
        assert_eq!(PairValue::top().dual(), PairValue::top());
    }

    fn unit() -> impl Strategy<Value = UnitValue> {
        (1u64..40).prop_flat_map(|d| (0..=d, Just(d))).prop_map(|(n, d)| UnitValue::new(n, d).unwrap())
    }

    fn pair() -> impl Strategy<Value = PairValue> {
        (unit(), unit()).prop_map(|(a, b)| PairValue::new(a, b))
    }

    proptest! {
        #[test]
        fn imp_is_one_iff_leq(a in unit(), b in unit()) {
            prop_assert_eq!(godel_apply(GodelOp::Imp, &a, &b).is_one(), a <= b);
            prop_assert_eq!(godel_apply(GodelOp::Coimp, &b, &a).is_zero(), b <= a);
        }

        #[test]
        fn residuation(a in unit(), b in unit()) {
            let m = godel_apply(GodelOp::Meet, &a, &godel_apply(GodelOp::Imp, &a, &b));
            prop_assert!(m <= b);
        }

        #[test]
        fn neg_involution(x in pair()) {
            let once = pair_apply(PairConnective::Neg, &[x.clone()]).unwrap();
            prop_assert_eq!(pair_apply(PairConnective::Neg, &[once]).unwrap(), x);
        }

        #[test]
        fn de_morgan(x in pair(), y in pair()) {
            let lhs = pair_apply(PairConnective::Neg, &[pair_apply(PairConnective::And, &[x.clone(), y.clone()]).unwrap()]).unwrap();
            let nx = pair_apply(PairConnective::Neg, &[x]).unwrap();
            let ny = pair_apply(PairConnective::Neg, &[y]).unwrap();
            prop_assert_eq!(lhs, pair_apply(PairConnective::Or, &[nx, ny]).unwrap());
        }

        #[test]
        fn results_stay_canonical(x in pair(), y in pair()) {
            for c in [PairConnective::And, PairConnective::Or, PairConnective::Imp, PairConnective::Coimp] {
                let r = pair_apply(c, &[x.clone(), y.clone()]).unwrap();
                prop_assert!(r.pos.is_canonical() && r.neg.is_canonical());
            }
            let d = x.dual();
            prop_assert!(d.pos.is_canonical() && d.neg.is_canonical());
        }

        #[test]
        fn display_round_trip(a in unit()) {
            prop_assert_eq!(a.to_string().parse::<UnitValue>().unwrap(), a);
        }
    }
}
