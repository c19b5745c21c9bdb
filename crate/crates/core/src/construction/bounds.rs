use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::json;
use thiserror::Error;

use super::params::soundness_denominator;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("need d ≥ 3 and n ≥ 1, got d = {d}, n = {n}")]
    Domain { d: u64, n: u32 },
    #[error("α must lie in (0, 1], got {0}")]
    Alpha(String),
    #[error("no ℓ ≤ {0} reaches the requested ratio")]
    Unreachable(u32),
}

fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `(dⁿ−1)/(d−1) − [(dⁿ−dⁿ⁻¹)/(d−1)ⁿ + dⁿ⁻¹ − 1]`, which is never negative.
pub fn lemma53_gap(d: u64, n: u32) -> Result<BigRational, BoundsError> {
    if d < 3 || n < 1 {
        return Err(BoundsError::Domain { d, n });
    }
    let dn = num_traits::pow::pow(int(d), n as usize);
    let dn1 = num_traits::pow::pow(int(d), n as usize - 1);
    let rhs = (&dn - BigRational::one()) / int(d - 1);
    let lhs =
        (&dn - &dn1) / num_traits::pow::pow(int(d - 1), n as usize) + &dn1 - BigRational::one();
    Ok(rhs - lhs)
}

/// Gap parameters for a target approximation ratio α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapParams {
    pub alpha: BigRational,
    /// Least ℓ with s/c ≤ α.
    pub ell: u32,
    pub delta: BigRational,
    pub c: BigRational,
    pub s: BigRational,
    pub ratio: BigRational,
    /// ⌈(2 − log₂α)/2⌉, the closed form that is supposed to give s/c ≤ α.
    pub ell_closed_form: u32,
    pub ratio_at_closed_form: BigRational,
}

impl GapParams {
    /// Whether the closed-form ℓ actually achieves s/c ≤ α.
    pub fn closed_form_sufficient(&self) -> bool {
        self.ratio_at_closed_form <= self.alpha
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let discrepancy = (!self.closed_form_sufficient()).then(|| {
            format!(
                "closed-form ell = {} gives s/c = {} > alpha = {}; the chain step 2^(l+1)/2^(2l-1) = 2^(2-2l) should read 2^(2-l)",
                self.ell_closed_form, self.ratio_at_closed_form, self.alpha
            )
        });
        json!({
            "alpha": self.alpha.to_string(),
            "ell": self.ell,
            "delta": self.delta.to_string(),
            "c": self.c.to_string(),
            "s": self.s.to_string(),
            "ratio": self.ratio.to_string(),
            "ell_closed_form": self.ell_closed_form,
            "ratio_at_closed_form": self.ratio_at_closed_form.to_string(),
            "closed_form_sufficient": self.closed_form_sufficient(),
            "discrepancy": discrepancy,
        })
    }
}

const MAX_ELL: u32 = 4096;

/// s/c = 2^{ℓ+1} / (2^{2ℓ−1} + 2^{ℓ−1}).
fn ratio(ell: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << (ell as usize + 1)) / soundness_denominator(ell)
}

/// δ = 1/D, c = 2^{−ℓ}, s = 2/D for the least ℓ with s/c ≤ α, evaluated
/// exactly; the closed-form choice of ℓ is reported alongside.
pub fn approx_gap_params(alpha: &BigRational) -> Result<GapParams, BoundsError> {
    if !alpha.is_positive() || alpha > &BigRational::one() {
        return Err(BoundsError::Alpha(alpha.to_string()));
    }
    let ell = (1..=MAX_ELL)
        .find(|&l| &ratio(l) <= alpha)
        .ok_or(BoundsError::Unreachable(MAX_ELL))?;
    // least L with α·4^{L−1} ≥ 1
    let ell_closed_form = (1..=MAX_ELL)
        .find(|&l| {
            alpha * BigRational::from_integer(BigInt::one() << (2 * (l as usize - 1)))
                >= BigRational::one()
        })
        .ok_or(BoundsError::Unreachable(MAX_ELL))?;
    let delta = soundness_denominator(ell).recip();
    let c = BigRational::from_integer(BigInt::one() << ell as usize).recip();
    let s = &delta + &delta;
    Ok(GapParams {
        alpha: alpha.clone(),
        ell,
        ratio: &s / &c,
        delta,
        c,
        s,
        ell_closed_form,
        ratio_at_closed_form: ratio(ell_closed_form),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_gaps() {
        assert_eq!(lemma53_gap(3, 1).unwrap(), rat(0, 1));
        assert_eq!(lemma53_gap(3, 2).unwrap(), rat(1, 2));
        assert!(lemma53_gap(2, 1).is_err());
    }

    #[test]
    fn alpha_one() {
        let p = approx_gap_params(&rat(1, 1)).unwrap();
        assert_eq!(p.ell, 2);
        assert_eq!(p.ratio, rat(4, 5));
        assert_eq!(p.ell_closed_form, 1);
        assert_eq!(p.ratio_at_closed_form, rat(4, 3));
        assert!(!p.closed_form_sufficient());
        assert!(p.s <= &p.c * &p.alpha);
    }
}
