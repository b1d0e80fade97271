//! Core accounting types: the four-component cost tuple, security parameters
//! and per-operation extra parameters.

use crate::error::{Error, Result};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign};

/// (online bits, online rounds, offline bits, offline rounds).
///
/// Addition is component-wise; scaling multiplies every component. Both
/// saturate instead of wrapping, which keeps aggregation total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostTuple {
    pub online_bits: u64,
    pub online_rounds: u64,
    pub offline_bits: u64,
    pub offline_rounds: u64,
}

impl CostTuple {
    pub const ZERO: CostTuple = CostTuple {
        online_bits: 0,
        online_rounds: 0,
        offline_bits: 0,
        offline_rounds: 0,
    };

    pub const fn new(
        online_bits: u64,
        online_rounds: u64,
        offline_bits: u64,
        offline_rounds: u64,
    ) -> Self {
        CostTuple {
            online_bits,
            online_rounds,
            offline_bits,
            offline_rounds,
        }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn scale(&self, n: u64) -> CostTuple {
        CostTuple {
            online_bits: self.online_bits.saturating_mul(n),
            online_rounds: self.online_rounds.saturating_mul(n),
            offline_bits: self.offline_bits.saturating_mul(n),
            offline_rounds: self.offline_rounds.saturating_mul(n),
        }
    }

    /// Narrows u128 components, rejecting anything that does not fit.
    pub fn from_u128(ob: u128, or: u128, fb: u128, fr: u128) -> Result<CostTuple> {
        let narrow = |x: u128| u64::try_from(x).map_err(|_| Error::CostOverflow);
        Ok(CostTuple {
            online_bits: narrow(ob)?,
            online_rounds: narrow(or)?,
            offline_bits: narrow(fb)?,
            offline_rounds: narrow(fr)?,
        })
    }

    pub fn as_array(&self) -> [u64; 4] {
        [
            self.online_bits,
            self.online_rounds,
            self.offline_bits,
            self.offline_rounds,
        ]
    }
}

impl Add for CostTuple {
    type Output = CostTuple;
    fn add(self, rhs: CostTuple) -> CostTuple {
        CostTuple {
            online_bits: self.online_bits.saturating_add(rhs.online_bits),
            online_rounds: self.online_rounds.saturating_add(rhs.online_rounds),
            offline_bits: self.offline_bits.saturating_add(rhs.offline_bits),
            offline_rounds: self.offline_rounds.saturating_add(rhs.offline_rounds),
        }
    }
}

impl AddAssign for CostTuple {
    fn add_assign(&mut self, rhs: CostTuple) {
        *self = *self + rhs;
    }
}

impl fmt::Display for CostTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.online_bits, self.online_rounds, self.offline_bits, self.offline_rounds
        )
    }
}

// Reports serialize every entry as the bare array [ob, or, fb, fr].
impl Serialize for CostTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        for v in self.as_array() {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CostTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CostTuple;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of four non-negative integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<CostTuple, A::Error> {
                let mut vals = [0u64; 4];
                for (i, v) in vals.iter_mut().enumerate() {
                    *v = seq
                        .next_element()?
                        .ok_or_else(|| de::Error::invalid_length(i, &self))?;
                }
                if seq.next_element::<u64>()?.is_some() {
                    return Err(de::Error::invalid_length(5, &self));
                }
                Ok(CostTuple::new(vals[0], vals[1], vals[2], vals[3]))
            }
        }
        deserializer.deserialize_seq(V)
    }
}

/// Security parameters every cost formula may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityParams {
    /// Ring/field bit length.
    pub k: u64,
    /// Statistical security parameter.
    pub kappa_s: u64,
    /// Computational security parameter.
    pub kappa: u64,
    /// Fractional-part bit length of fixed-point values.
    pub f: u64,
    /// Number of parties.
    pub m: u64,
}

impl SecurityParams {
    pub fn new(k: u64, kappa_s: u64, kappa: u64, f: u64, m: u64) -> Result<Self> {
        let p = SecurityParams { k, kappa_s, kappa, f, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < self.f {
            return Err(Error::InvalidParams(format!(
                "bit length k = {} must be at least the fractional length f = {}",
                self.k, self.f
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidParams("bit length k must be positive".into()));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams(format!(
                "party count m = {} must be at least 2",
                self.m
            )));
        }
        if self.kappa < self.kappa_s {
            return Err(Error::InvalidParams(format!(
                "computational security kappa = {} must be at least statistical security kappa_s = {}",
                self.kappa, self.kappa_s
            )));
        }
        Ok(())
    }

    /// Experiment defaults: k = 64, kappa_s = 40, kappa = 128, f = 16.
    pub fn with_parties(m: u64) -> Self {
        SecurityParams { k: 64, kappa_s: 40, kappa: 128, f: 16, m }
    }
}

impl Default for SecurityParams {
    fn default() -> Self {
        SecurityParams::with_parties(2)
    }
}

/// Convolution geometry passed to frameworks that price `conv2d` directly.
/// Channel counts are per group when the emitting layer is grouped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvDims {
    pub batch: u64,
    pub in_channel: u64,
    pub out_channel: u64,
    pub inw: u64,
    pub inh: u64,
    pub outw: u64,
    pub outh: u64,
    pub kw: u64,
    pub kh: u64,
}

/// Extra parameters some operations take on top of [`SecurityParams`].
///
/// `size` is the number of parallel instances of the operation; it scales the
/// bits components and leaves rounds untouched. A missing `size` means 1 and
/// `size = 0` short-circuits evaluation to the zero tuple.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpExtras {
    pub size: Option<u64>,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub r: Option<u64>,
    /// HE polynomial degree (power of two).
    pub deg: Option<u64>,
    /// HE coefficient-modulus bit widths.
    pub modulus: Option<Vec<u64>>,
    pub knownmsb: Option<bool>,
    pub conv: Option<ConvDims>,
    /// Local-compute price (ciphertext-count search only).
    pub lp: Option<f64>,
    /// Bandwidth price (ciphertext-count search only).
    pub bp: Option<f64>,
}

pub const DEFAULT_LP: f64 = 1.0;
pub const DEFAULT_BP: f64 = 1000.0;

impl OpExtras {
    pub fn size(n: u64) -> Self {
        OpExtras { size: Some(n), ..Default::default() }
    }

    pub fn matmul(p: u64, q: u64, r: u64) -> Self {
        OpExtras { p: Some(p), q: Some(q), r: Some(r), ..Default::default() }
    }

    pub fn with_size(mut self, n: u64) -> Self {
        self.size = Some(n);
        self
    }

    pub fn with_knownmsb(mut self, b: bool) -> Self {
        self.knownmsb = Some(b);
        self
    }

    pub fn with_he(mut self, deg: u64, modulus: &[u64]) -> Self {
        self.deg = Some(deg);
        self.modulus = Some(modulus.to_vec());
        self
    }

    pub fn with_conv(mut self, conv: ConvDims) -> Self {
        self.conv = Some(conv);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(deg) = self.deg {
            if deg == 0 || !deg.is_power_of_two() {
                return Err(Error::InvalidParams(format!(
                    "HE degree {deg} must be a power of two"
                )));
            }
        }
        Ok(())
    }

    /// Fills holes from `other` without touching fields already set.
    pub fn merged_with(&self, other: &OpExtras) -> OpExtras {
        OpExtras {
            size: self.size.or(other.size),
            p: self.p.or(other.p),
            q: self.q.or(other.q),
            r: self.r.or(other.r),
            deg: self.deg.or(other.deg),
            modulus: self.modulus.clone().or_else(|| other.modulus.clone()),
            knownmsb: self.knownmsb.or(other.knownmsb),
            conv: self.conv.or(other.conv),
            lp: self.lp.or(other.lp),
            bp: self.bp.or(other.bp),
        }
    }
}

/// Resolved view of one evaluation: security parameters plus merged extras.
/// Accessors for optional extras fail with the parameter name, which is the
/// error the cost-formula contract requires.
pub struct EvalScope<'a> {
    pub params: &'a SecurityParams,
    pub extras: &'a OpExtras,
}

impl<'a> EvalScope<'a> {
    pub fn new(params: &'a SecurityParams, extras: &'a OpExtras) -> Self {
        EvalScope { params, extras }
    }

    pub fn k(&self) -> u64 {
        self.params.k
    }
    pub fn kappa_s(&self) -> u64 {
        self.params.kappa_s
    }
    pub fn kappa(&self) -> u64 {
        self.params.kappa
    }
    pub fn f(&self) -> u64 {
        self.params.f
    }
    pub fn m(&self) -> u64 {
        self.params.m
    }
    pub fn size(&self) -> u64 {
        self.extras.size.unwrap_or(1)
    }
    pub fn knownmsb(&self) -> bool {
        self.extras.knownmsb.unwrap_or(false)
    }
    pub fn p(&self) -> Result<u64> {
        self.extras.p.ok_or_else(|| Error::MissingParameter("p".into()))
    }
    pub fn q(&self) -> Result<u64> {
        self.extras.q.ok_or_else(|| Error::MissingParameter("q".into()))
    }
    pub fn r(&self) -> Result<u64> {
        self.extras.r.ok_or_else(|| Error::MissingParameter("r".into()))
    }
    pub fn deg(&self) -> Result<u64> {
        self.extras.deg.ok_or_else(|| Error::MissingParameter("deg".into()))
    }
    pub fn modulus(&self) -> Result<&[u64]> {
        match &self.extras.modulus {
            Some(m) if !m.is_empty() => Ok(m),
            _ => Err(Error::MissingParameter("mod".into())),
        }
    }
    pub fn conv(&self) -> Result<&ConvDims> {
        self.extras.conv.as_ref().ok_or_else(|| Error::MissingParameter("conv".into()))
    }
    pub fn lp(&self) -> f64 {
        self.extras.lp.unwrap_or(DEFAULT_LP)
    }
    pub fn bp(&self) -> f64 {
        self.extras.bp.unwrap_or(DEFAULT_BP)
    }
}

/// Ceiling division on wide integers.
pub fn cdiv(a: u128, b: u128) -> u128 {
    debug_assert!(b > 0);
    a.div_ceil(b)
}

/// Smallest n >= 0 with 2^n >= x. Errors on x = 0 so formulas that take a
/// logarithm of a derived quantity surface bad inputs instead of panicking.
pub fn clog2(x: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::Log2NonPositive);
    }
    Ok(u64::from(64 - (x - 1).leading_zeros()))
}

/// Sum of `modulus[start .. end']` where an `end <= 0` counts back from the
/// end of the list (0 means the whole tail) and a positive `end` is an
/// absolute index clamped to the length.
pub fn slice_sum(modulus: &[u64], start: i64, end: i64) -> u128 {
    let len = modulus.len() as i64;
    let e = if end <= 0 { len + end } else { end.min(len) };
    let s = start.max(0);
    if s >= e {
        return 0;
    }
    modulus[s as usize..e as usize].iter().map(|&x| x as u128).sum()
}
