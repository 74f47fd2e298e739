//! Values of the form Σ c·e^x.
//!
//! Integer-exponent sums are kept exactly as a sparse map `x ↦ c`. Their sign
//! (and hence any comparison) is decided without tolerance: a nonzero integer
//! combination of distinct powers of e is never zero, so refining an interval
//! enclosure of the sum eventually excludes zero. Real-exponent sums are kept
//! as a single log-space number and compared with [`LOG_TOLERANCE`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which two log-space values compare EQUAL.
pub const LOG_TOLERANCE: f64 = 1e-12;

/// Working precision for exact sign determination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 128,
            cap_bits: 1 << 16,
        }
    }
}

/// Sparse exact sum Σ c·e^x with integer exponents and coefficients.
#[derive(Clone, Debug, Default)]
pub struct ExpSum {
    terms: BTreeMap<u64, i64>,
    // ln of the value when every coefficient is positive
    log_approx: Option<f64>,
}

impl PartialEq for ExpSum {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for ExpSum {}

impl ExpSum {
    /// Merges equal exponents and drops zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> ExpSum {
        let mut map = BTreeMap::new();
        for (x, c) in terms {
            *map.entry(x).or_insert(0i64) += c;
        }
        map.retain(|_, c| *c != 0);
        Self::from_map(map)
    }

    fn from_map(terms: BTreeMap<u64, i64>) -> ExpSum {
        let log_approx = if !terms.is_empty() && terms.values().all(|&c| c > 0) {
            let m = *terms.keys().next_back().unwrap();
            let s: f64 = terms
                .iter()
                .map(|(&x, &c)| c as f64 * (-((m - x) as f64)).exp())
                .sum();
            Some(m as f64 + s.ln())
        } else {
            None
        };
        ExpSum { terms, log_approx }
    }

    pub fn terms(&self) -> &BTreeMap<u64, i64> {
        &self.terms
    }

    pub fn coefficient(&self, exponent: u64) -> i64 {
        self.terms.get(&exponent).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &ExpSum) -> ExpSum {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(&x, &c)| (x, c))
                .chain(other.terms.iter().map(|(&x, &c)| (x, -c))),
        )
    }

    pub fn add(&self, other: &ExpSum) -> ExpSum {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(&x, &c)| (x, c)),
        )
    }

    /// Sign of the sum, decided exactly.
    pub fn signum(&self, precision: Precision) -> Result<Ordering> {
        if self.terms.is_empty() {
            return Ok(Ordering::Equal);
        }
        if let Some(s) = self.float_sign() {
            return Ok(s);
        }
        let mut bits = precision.start_bits.max(64);
        loop {
            let encl = self.enclose(bits);
            if encl.pos_lo > encl.neg_hi {
                return Ok(Ordering::Greater);
            }
            if encl.pos_hi < encl.neg_lo {
                return Ok(Ordering::Less);
            }
            if bits >= precision.cap_bits {
                return Err(Error::PrecisionExceeded(bits));
            }
            bits = (bits * 2).min(precision.cap_bits);
        }
    }

    /// Floating-point filter: returns a sign only when the f64 evaluation
    /// clears an error bound far wider than any rounding in `exp` and the sum.
    fn float_sign(&self) -> Option<Ordering> {
        let m = *self.terms.keys().next_back()?;
        let (mut sum, mut mag) = (0.0f64, 0.0f64);
        for (&x, &c) in &self.terms {
            let w = (-((m - x) as f64)).exp();
            sum += c as f64 * w;
            mag += (c as f64).abs() * w;
        }
        let bound = mag * 1e-10 + 1e-300 * self.terms.len() as f64;
        if sum > bound {
            Some(Ordering::Greater)
        } else if sum < -bound {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Fixed-point enclosure (scale 2^bits) of the positive and negative
    /// parts of Σ c·e^(x − x_min).
    fn enclose(&self, bits: u32) -> Enclosure {
        let base = *self.terms.keys().next().expect("nonempty");
        let (e_lo, e_hi) = e_bounds(bits);
        let mut out = Enclosure::default();
        for (&x, &c) in &self.terms {
            let k = x - base;
            let lo = pow_bound(&e_lo, k, bits, false);
            let hi = pow_bound(&e_hi, k, bits, true);
            let mag = BigUint::from(c.unsigned_abs());
            if c > 0 {
                out.pos_lo += &mag * lo;
                out.pos_hi += &mag * hi;
            } else {
                out.neg_lo += &mag * lo;
                out.neg_hi += &mag * hi;
            }
        }
        out
    }

    /// Natural log of a positive sum.
    pub fn approx_log(&self) -> Result<f64> {
        if let Some(l) = self.log_approx {
            return Ok(l);
        }
        if self.signum(Precision::default())? != Ordering::Greater {
            return Err(Error::NonPositiveValue);
        }
        // Mixed signs: tighten the enclosure until its width is far below
        // the last bit of an f64.
        let base = *self.terms.keys().next().unwrap();
        let mut bits = 128u32;
        loop {
            let encl = self.enclose(bits);
            let lo = BigInt::from(encl.pos_lo) - BigInt::from(encl.neg_hi);
            let hi = BigInt::from(encl.pos_hi) - BigInt::from(encl.neg_lo);
            if lo.sign() == Sign::Plus && (&hi - &lo) << 60u32 <= lo {
                let lo = lo.magnitude();
                return Ok(base as f64 + ln_biguint(lo) - bits as f64 * std::f64::consts::LN_2);
            }
            bits = bits.checked_mul(2).ok_or(Error::PrecisionExceeded(bits))?;
        }
    }
}

#[derive(Default)]
struct Enclosure {
    pos_lo: BigUint,
    pos_hi: BigUint,
    neg_lo: BigUint,
    neg_hi: BigUint,
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Lower and upper fixed-point bounds on e at scale 2^bits.
fn e_bounds(bits: u32) -> (BigUint, BigUint) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigUint, BigUint)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&bits) {
        return v.clone();
    }
    // Σ floor-chained 2^bits/k!: each floor loses < 1 ulp relative to the
    // exact chain, so the total error is < 2 ulp per term plus a tail < 6 ulp.
    let mut term = BigUint::one() << bits;
    let mut lo = term.clone();
    let mut k = 1u32;
    loop {
        term /= k;
        if term.is_zero() {
            break;
        }
        lo += &term;
        k += 1;
    }
    let hi = &lo + BigUint::from(2 * k + 8);
    cache.lock().unwrap().insert(bits, (lo.clone(), hi.clone()));
    (lo, hi)
}

/// base^k at scale 2^bits, rounding every product down (or up).
fn pow_bound(base: &BigUint, mut k: u64, bits: u32, round_up: bool) -> BigUint {
    let one = BigUint::one() << bits;
    let mul = |a: &BigUint, b: &BigUint| -> BigUint {
        let p = a * b;
        if round_up {
            (p + &one - 1u32) >> bits
        } else {
            p >> bits
        }
    };
    let mut acc = one.clone();
    let mut sq = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(&acc, &sq);
        }
        k >>= 1;
        if k > 0 {
            sq = mul(&sq, &sq);
        }
    }
    acc
}

/// An exponential index value: exact for integer exponents, log-space otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ValueRepr", try_from = "ValueRepr")]
pub enum BigExpValue {
    Exact(ExpSum),
    LogSpace(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum ValueRepr {
    #[serde(rename = "exact")]
    Exact { terms: TermMap },
    #[serde(rename = "log")]
    Log { log_value: f64 },
}

/// Exponent map written as a JSON object with string keys in numeric order.
struct TermMap(BTreeMap<u64, i64>);

impl Serialize for TermMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (x, c) in &self.0 {
            map.serialize_entry(&x.to_string(), c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for TermMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        // Keys arrive as strings: integer keys do not survive the buffering
        // done for internally tagged enums.
        let raw = BTreeMap::<String, i64>::deserialize(de)?;
        let mut out = BTreeMap::new();
        for (x, c) in raw {
            let x = x
                .parse::<u64>()
                .map_err(|_| serde::de::Error::custom(format!("bad exponent `{x}`")))?;
            *out.entry(x).or_insert(0) += c;
        }
        Ok(TermMap(out))
    }
}

impl From<BigExpValue> for ValueRepr {
    fn from(v: BigExpValue) -> Self {
        match v {
            BigExpValue::Exact(s) => ValueRepr::Exact {
                terms: TermMap(s.terms),
            },
            BigExpValue::LogSpace(l) => ValueRepr::Log { log_value: l },
        }
    }
}

impl TryFrom<ValueRepr> for BigExpValue {
    type Error = Error;

    fn try_from(r: ValueRepr) -> Result<Self> {
        match r {
            ValueRepr::Exact { terms } => Ok(BigExpValue::Exact(ExpSum::from_terms(terms.0))),
            ValueRepr::Log { log_value } if log_value.is_finite() => {
                Ok(BigExpValue::LogSpace(log_value))
            }
            ValueRepr::Log { .. } => Err(Error::Parse("log_value must be finite".into())),
        }
    }
}

impl BigExpValue {
    pub fn exact<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> BigExpValue {
        BigExpValue::Exact(ExpSum::from_terms(terms))
    }

    pub fn as_exact(&self) -> Option<&ExpSum> {
        match self {
            BigExpValue::Exact(s) => Some(s),
            BigExpValue::LogSpace(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, BigExpValue::Exact(_))
    }

    pub fn approx_log(&self) -> Result<f64> {
        match self {
            BigExpValue::Exact(s) => s.approx_log(),
            BigExpValue::LogSpace(l) => Ok(*l),
        }
    }
}

impl std::fmt::Display for BigExpValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BigExpValue::LogSpace(l) => write!(f, "exp({l})"),
            BigExpValue::Exact(s) if s.is_zero() => f.write_str("0"),
            BigExpValue::Exact(s) => {
                for (i, (&x, &c)) in s.terms.iter().rev().enumerate() {
                    let sign = if c < 0 {
                        "-"
                    } else if i > 0 {
                        "+"
                    } else {
                        ""
                    };
                    let sep = if i > 0 { " " } else { "" };
                    let pad = if i > 0 { " " } else { "" };
                    let mag = c.unsigned_abs();
                    if mag == 1 {
                        write!(f, "{sep}{sign}{pad}e^{x}")?;
                    } else {
                        write!(f, "{sep}{sign}{pad}{mag}e^{x}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Natural log of a positive value.
pub fn approx_log(v: &BigExpValue) -> Result<f64> {
    v.approx_log()
}

/// Total order on values of the same kind with default precision.
pub fn compare(a: &BigExpValue, b: &BigExpValue) -> Result<Ordering> {
    compare_with(a, b, Precision::default())
}

pub fn compare_with(a: &BigExpValue, b: &BigExpValue, precision: Precision) -> Result<Ordering> {
    match (a, b) {
        (BigExpValue::Exact(x), BigExpValue::Exact(y)) => {
            if x == y {
                return Ok(Ordering::Equal);
            }
            x.sub(y).signum(precision)
        }
        (BigExpValue::LogSpace(x), BigExpValue::LogSpace(y)) => Ok(compare_logs(*x, *y)),
        _ => Err(Error::KindMismatch),
    }
}

/// Log-space comparison with relative tolerance [`LOG_TOLERANCE`].
pub fn compare_logs(x: f64, y: f64) -> Ordering {
    if (x - y).abs() <= LOG_TOLERANCE * x.abs().max(y.abs()) {
        Ordering::Equal
    } else if x < y {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(terms: &[(u64, i64)]) -> BigExpValue {
        BigExpValue::exact(terms.iter().copied())
    }

    #[test]
    fn construction_merges_and_drops_zeros() {
        let s = ExpSum::from_terms([(3, 2), (3, -2), (5, 1), (5, 1)]);
        assert_eq!(s.terms(), &BTreeMap::from([(5, 2)]));
        assert!(ExpSum::from_terms([(1, 1), (1, -1)]).is_zero());
    }

    #[test]
    fn compare_examples() {
        let p4 = ex(&[(2, 2), (4, 1)]);
        assert_eq!(compare(&p4, &p4.clone()).unwrap(), Ordering::Equal);
        assert_eq!(
            compare(&ex(&[(3, 4), (9, 1)]), &ex(&[(5, 5)])).unwrap(),
            Ordering::Greater
        );
        assert_eq!(compare(&p4, &ex(&[(3, 3)])).unwrap(), Ordering::Greater);
        assert_eq!(compare(&ex(&[(3, 3)]), &p4).unwrap(), Ordering::Less);
        assert_eq!(
            compare(&p4, &BigExpValue::LogSpace(1.0)),
            Err(Error::KindMismatch)
        );
    }

    #[test]
    fn interval_path_resolves_near_cancellation() {
        // e^3 - 20 ≈ 0.0855, e^10 - 22026 ≈ 0.4658, 2e^5 - e^6 + 106 ≈ -0.6025
        let cases: [(&[(u64, i64)], Ordering); 3] = [
            (&[(3, 1), (0, -20)], Ordering::Greater),
            (&[(10, 1), (0, -22026)], Ordering::Greater),
            (&[(5, 2), (6, -1), (0, 106)], Ordering::Less),
        ];
        for (terms, want) in cases {
            let s = ExpSum::from_terms(terms.iter().copied());
            assert_eq!(s.signum(Precision::default()).unwrap(), want, "{terms:?}");
            // force the interval path
            let encl = s.enclose(128);
            let got = if encl.pos_lo > encl.neg_hi {
                Ordering::Greater
            } else {
                assert!(encl.pos_hi < encl.neg_lo);
                Ordering::Less
            };
            assert_eq!(got, want);
        }
    }

    #[test]
    fn huge_cancellation_needs_more_bits() {
        // floor(e^43) = 4727839468229346561 and e^43 - floor(e^43) ≈ 0.474,
        // far below what the float filter can resolve.
        let above = ExpSum::from_terms([(43, 1), (0, -4_727_839_468_229_346_561)]);
        assert!(above.float_sign().is_none());
        assert_eq!(
            above.signum(Precision::default()).unwrap(),
            Ordering::Greater
        );
        let below = ExpSum::from_terms([(43, 1), (0, -4_727_839_468_229_346_562)]);
        assert_eq!(below.signum(Precision::default()).unwrap(), Ordering::Less);
        // floor(e^40) = 235385266837019985; 64 bits cannot resolve 0.41 against 2^57.
        let s = ExpSum::from_terms([(40, 1), (0, -235_385_266_837_019_985)]);
        let tiny = Precision {
            start_bits: 64,
            cap_bits: 64,
        };
        assert_eq!(s.signum(tiny), Err(Error::PrecisionExceeded(64)));
        assert_eq!(s.signum(Precision::default()).unwrap(), Ordering::Greater);
    }

    #[test]
    fn e_enclosure_contains_e() {
        let (lo, hi) = e_bounds(64);
        let scale = 2f64.powi(64);
        let lo = lo.to_f64().unwrap() / scale;
        let hi = hi.to_f64().unwrap() / scale;
        assert!(lo <= std::f64::consts::E && std::f64::consts::E <= hi);
        assert!(hi - lo < 1e-15);
    }

    #[test]
    fn approx_log_examples() {
        assert_eq!(ex(&[(9, 1)]).approx_log().unwrap(), 9.0);
        let v = ex(&[(3, 4), (9, 1)]).approx_log().unwrap();
        let want = 9.0 + (1.0 + 4.0 * (-6.0f64).exp()).ln();
        assert!((v - want).abs() <= 1e-12 * want);
        assert!((v - 9.009866).abs() < 1e-6);
        assert_eq!(BigExpValue::LogSpace(42.5).approx_log().unwrap(), 42.5);
        let huge = ex(&[(1_000_000, 1), (999_999, 3)]).approx_log().unwrap();
        assert!((huge - (1_000_000.0 + (1.0 + 3.0 * (-1.0f64).exp()).ln())).abs() < 1e-6);
    }

    #[test]
    fn approx_log_mixed_signs() {
        // e^5 - e^4 = e^4 (e - 1)
        let v = ex(&[(5, 1), (4, -1)]).approx_log().unwrap();
        let want = 4.0 + (std::f64::consts::E - 1.0).ln();
        assert!((v - want).abs() <= 1e-12 * want, "{v} vs {want}");
        assert_eq!(
            ex(&[(4, 1), (5, -1)]).approx_log(),
            Err(Error::NonPositiveValue)
        );
        assert_eq!(ex(&[]).approx_log(), Err(Error::NonPositiveValue));
    }

    #[test]
    fn json_shapes() {
        let v = ex(&[(3, 4), (9, 1)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"exact","terms":{"3":4,"9":1}}"#);
        let back: BigExpValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let wide = ex(&[(9, 1), (12, -2)]);
        let s = serde_json::to_string(&wide).unwrap();
        assert_eq!(s, r#"{"kind":"exact","terms":{"9":1,"12":-2}}"#);
        assert_eq!(serde_json::from_str::<BigExpValue>(&s).unwrap(), wide);
        let l = serde_json::to_string(&BigExpValue::LogSpace(9.009866)).unwrap();
        assert_eq!(l, r#"{"kind":"log","log_value":9.009866}"#);
    }

    #[test]
    fn display() {
        assert_eq!(ex(&[(3, 4), (9, 1)]).to_string(), "e^9 + 4e^3");
        assert_eq!(ex(&[(3, -4), (9, 1)]).to_string(), "e^9 - 4e^3");
    }

    #[test]
    fn log_tolerance() {
        assert_eq!(compare_logs(10.0, 10.0 + 5e-12), Ordering::Equal);
        assert_eq!(compare_logs(10.0, 10.0 + 5e-10), Ordering::Less);
    }
}
