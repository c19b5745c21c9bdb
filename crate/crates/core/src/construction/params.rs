use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("ε must lie in (0, 1/2), got {0}")]
    Epsilon(String),
    #[error("δ must be positive, got {0}")]
    Delta(String),
    #[error("ℓ must be a positive integer")]
    Ell,
    #[error("parameters too large to evaluate exactly: {0}")]
    TooLarge(String),
}

/// Construction parameters, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    pub epsilon: BigRational,
    pub delta: BigRational,
    pub ell: u32,
    pub d: u64,
    pub gamma: BigRational,
    pub m: u64,
    pub r: BigUint,
    pub q: BigUint,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(e: u64) -> BigRational {
    BigRational::from_integer(BigInt::one() << e as usize)
}

/// `2^{2ℓ−1} + 2^{ℓ−1}`.
pub(crate) fn soundness_denominator(ell: u32) -> BigRational {
    pow2(2 * ell as u64 - 1) + pow2(ell as u64 - 1)
}

/// d, γ, m and r from ε, δ and ℓ:
///
/// * d = 2^ℓ + 1
/// * γ = 1 − (1/D + δ/2^ℓ) / (1/D + δ) with D = 2^{2ℓ−1} + 2^{ℓ−1}
/// * m = ⌈1/δ + (2/(δd) + 1)ℓ − (2/(δd)) log₂ ε⌉
/// * r = ⌈2^{mℓ+1}(d^{m−ℓ} − 1) / (γε)⌉ + 1
///
/// The logarithm is never rounded: the ceiling for m is settled by comparing
/// integer powers.
pub fn derive_params(
    epsilon: &BigRational,
    delta: &BigRational,
    ell: u32,
) -> Result<ConstructionParams, ParamsError> {
    if !epsilon.is_positive() || epsilon >= &rat(1, 2) {
        return Err(ParamsError::Epsilon(epsilon.to_string()));
    }
    if !delta.is_positive() {
        return Err(ParamsError::Delta(delta.to_string()));
    }
    if ell == 0 {
        return Err(ParamsError::Ell);
    }
    if ell > 60 {
        return Err(ParamsError::TooLarge(format!("ℓ = {ell}")));
    }
    let d = (1u64 << ell) + 1;
    let dd = BigRational::from_integer(BigInt::from(d));
    let inv_den = soundness_denominator(ell).recip();
    let gamma = BigRational::one() - (&inv_den + delta / pow2(ell as u64)) / (&inv_den + delta);

    let b = BigRational::from_integer(BigInt::from(2)) / (delta * &dd);
    let a =
        delta.recip() + (&b + BigRational::one()) * BigRational::from_integer(BigInt::from(ell));
    let m = ceil_a_plus_b_log2_inv(&a, &b, &epsilon.recip())?;

    if m.saturating_mul(ell as u64) > 1 << 20 {
        return Err(ParamsError::TooLarge(format!(
            "m·ℓ = {}",
            m as u128 * ell as u128
        )));
    }
    let two_pow = BigUint::one() << (m * ell as u64 + 1) as usize;
    let d_pow = num_traits::pow::pow(BigUint::from(d), (m - ell as u64) as usize);
    let numer = BigRational::from_integer(BigInt::from(two_pow * (d_pow - BigUint::one())));
    let r_rat = numer / (&gamma * epsilon);
    let r = r_rat.ceil().to_integer().to_biguint().expect("positive") + BigUint::one();
    let q = BigUint::one() << m as usize;
    Ok(ConstructionParams {
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        ell,
        d,
        gamma,
        m,
        r,
        q,
    })
}

/// ⌈a + b·log₂(x)⌉ for rational a, b > 0 and x > 1.
fn ceil_a_plus_b_log2_inv(
    a: &BigRational,
    b: &BigRational,
    x: &BigRational,
) -> Result<u64, ParamsError> {
    let approx = a.to_f64().unwrap_or(f64::MAX)
        + b.to_f64().unwrap_or(f64::MAX) * x.to_f64().unwrap_or(f64::MAX).log2();
    if !approx.is_finite() || approx > 1e9 {
        return Err(ParamsError::TooLarge(format!("m ≈ {approx}")));
    }
    // M ≥ a + b·log₂x  ⟺  (M − a)/b ≥ log₂x  ⟺  2^p ≥ x^s where (M − a)/b = p/s
    let at_least = |cand: i64| -> Result<bool, ParamsError> {
        let t = (BigRational::from_integer(BigInt::from(cand)) - a) / b;
        if !t.is_positive() {
            return Ok(false);
        }
        let (p, s) = (t.numer().clone(), t.denom().clone());
        let (p, s) = match (p.to_u64(), s.to_u64()) {
            (Some(p), Some(s)) if p <= 1 << 16 && s <= 1 << 16 => (p, s),
            _ => return Err(ParamsError::TooLarge(format!("exponent {t}"))),
        };
        let lhs = pow2(p);
        let rhs = num_traits::pow::pow(x.clone(), s as usize);
        Ok(lhs >= rhs)
    };
    let mut m = approx.ceil() as i64;
    while !at_least(m)? {
        m += 1;
    }
    while at_least(m - 1)? {
        m -= 1;
    }
    Ok(m as u64)
}

impl ConstructionParams {
    /// Small enough to lift and search at desk scale.
    pub fn desk_feasible(&self) -> bool {
        self.m <= 12 && self.r <= BigUint::from(64u32)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "epsilon": self.epsilon.to_string(),
            "delta": self.delta.to_string(),
            "ell": self.ell,
            "d": self.d,
            "gamma": self.gamma.to_string(),
            "m": self.m,
            "q": self.q.to_string(),
            "r": self.r.to_string(),
            "desk_feasible": self.desk_feasible(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let p = derive_params(&rat(1, 4), &rat(1, 3), 1).unwrap();
        assert_eq!(p.d, 3);
        assert_eq!(p.gamma, rat(1, 4));
        assert_eq!(p.m, 10);
        assert_eq!(p.r, BigUint::from(644_939_777u64));
        assert_eq!(derive_params(&rat(1, 4), &rat(1, 3), 2).unwrap().d, 5);
    }

    #[test]
    fn ceiling_on_an_exact_integer() {
        // 2 + 1.8·2 + 0.8·3 = 8 with no rounding
        let p = derive_params(&rat(1, 8), &rat(1, 2), 2).unwrap();
        assert_eq!(p.m, 8);
    }

    #[test]
    fn domain() {
        assert!(derive_params(&rat(1, 2), &rat(1, 3), 1).is_err());
        assert!(derive_params(&rat(1, 4), &rat(0, 1), 1).is_err());
        assert!(derive_params(&rat(1, 4), &rat(1, 3), 0).is_err());
    }
}
