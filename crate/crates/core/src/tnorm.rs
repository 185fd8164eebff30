//! Aczel-Alsina t-norm kernel.
//!
//! For `lambda > 0` the family is
//! `T(a, x) = exp(-[(-ln a)^lambda + (-ln x)^lambda]^(1/lambda))`, with
//! `T(a, x) = 0` whenever either argument is zero. `lambda = 1` gives the
//! product, `lambda -> inf` tends to the minimum and `lambda -> 0` to the
//! drastic product. Only finite positive exponents are evaluated here.
//!
//! Both the t-norm and its residual work on the logarithmic scale so that
//! raising `-ln a` to a large `lambda` never overflows: the power sum is a
//! log-sum-exp of `lambda * ln(-ln a)` and `lambda * ln(-ln x)`, and the
//! power difference in the residual is a log-difference evaluated with
//! `expm1`.

use crate::error::{FreError, Result};
use serde::{Deserialize, Serialize};

/// The exponent `lambda` selecting a member of the Aczel-Alsina family.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TNormParam(f64);

impl TNormParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(TNormParam(lambda))
        } else {
            Err(FreError::Domain(format!(
                "lambda must be finite and positive, got {lambda}"
            )))
        }
    }

    pub fn lambda(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TNormParam {
    type Error = FreError;

    fn try_from(v: f64) -> Result<Self> {
        TNormParam::new(v)
    }
}

impl From<TNormParam> for f64 {
    fn from(p: TNormParam) -> f64 {
        p.0
    }
}

/// A membership degree in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct UnitValue(f64);

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue(0.0);
    pub const ONE: UnitValue = UnitValue(1.0);

    pub fn new(v: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&v) {
            Ok(UnitValue(v))
        } else {
            Err(FreError::Domain(format!("{v} is outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitValue {
    type Error = FreError;

    fn try_from(v: f64) -> Result<Self> {
        UnitValue::new(v)
    }
}

impl From<UnitValue> for f64 {
    fn from(u: UnitValue) -> f64 {
        u.0
    }
}

/// `T(a, x)` for `a, x` in `[0, 1]`.
///
/// Zero is an exact annihilator and one an exact neutral element. The result
/// is symmetric in its arguments bit for bit and clamped to `[0, min(a, x)]`.
pub fn tnorm_eval(a: f64, x: f64, p: TNormParam) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&x));
    if a == 0.0 || x == 0.0 {
        return 0.0;
    }
    if a == 1.0 {
        return x;
    }
    if x == 1.0 {
        return a;
    }
    let lambda = p.lambda();
    let (la, lx) = (-a.ln(), -x.ln());
    let (hi, lo) = if la >= lx { (la, lx) } else { (lx, la) };
    // log-sum-exp of u = lambda*ln(hi) and v = lambda*ln(lo), divided by
    // lambda and exponentiated: hi * (1 + (lo/hi)^lambda)^(1/lambda).
    let gap = lambda * (lo / hi).ln();
    let power_sum_root = hi * (gap.exp().ln_1p() / lambda).exp();
    (-power_sum_root).exp().clamp(0.0, a.min(x))
}

/// The unique `x` with `T(a, x) = b`, for `a >= b > 0`.
///
/// Returns exactly 1 when `a == b` and exactly `b` when `a == 1`.
pub fn tnorm_residual(a: f64, b: f64, p: TNormParam) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(FreError::Domain(format!(
            "residual arguments must lie in [0, 1], got a={a}, b={b}"
        )));
    }
    if b == 0.0 {
        return Err(FreError::Domain(
            "residual is undefined for b = 0".to_string(),
        ));
    }
    if b > a {
        return Err(FreError::Domain(format!(
            "no x satisfies T({a}, x) = {b} because b > a"
        )));
    }
    if a == b {
        return Ok(1.0);
    }
    if a == 1.0 {
        return Ok(b);
    }
    let lambda = p.lambda();
    let (la, lb) = (-a.ln(), -b.ln());
    // (lb^lambda - la^lambda)^(1/lambda) = lb * (1 - (la/lb)^lambda)^(1/lambda),
    // with ln(la/lb) taken as ln1p of the relative gap.
    let log_ratio = ((la - lb) / lb).ln_1p();
    let shrink = -(lambda * log_ratio).exp_m1();
    let diff_root = lb * (shrink.ln() / lambda).exp();
    Ok((-diff_root).exp().clamp(0.0, 1.0))
}

/// `max_j T(row_j, x_j)`.
pub fn max_compose(row: &[f64], x: &[f64], p: TNormParam) -> Result<f64> {
    if row.len() != x.len() {
        return Err(FreError::Dimension {
            expected: row.len(),
            got: x.len(),
        });
    }
    Ok(row
        .iter()
        .zip(x)
        .map(|(&a, &xj)| tnorm_eval(a, xj, p))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: f64) -> TNormParam {
        TNormParam::new(v).unwrap()
    }

    #[test]
    fn param_rejects_non_positive_and_non_finite() {
        assert!(TNormParam::new(0.0).is_err());
        assert!(TNormParam::new(-1.0).is_err());
        assert!(TNormParam::new(f64::INFINITY).is_err());
        assert!(TNormParam::new(f64::NAN).is_err());
        assert!(TNormParam::new(1e-3).is_ok());
    }

    #[test]
    fn unit_value_range() {
        assert!(UnitValue::new(-0.0).is_ok());
        assert!(UnitValue::new(1.0).is_ok());
        assert!(UnitValue::new(1.0 + 1e-12).is_err());
        assert!(UnitValue::new(f64::NAN).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(tnorm_eval(0.7, 0.0, lam(2.0)), 0.0);
        assert!((tnorm_eval(0.5, 0.4, lam(1.0)) - 0.2).abs() < 1e-15);
        assert!((tnorm_eval(0.8606, 0.4513, lam(3.0)) - 0.4505).abs() < 1e-3);
    }

    #[test]
    fn eval_extreme_lambda_stays_finite() {
        for &l in &[1e-3, 0.05, 50.0, 1e4, 1e8] {
            for &(a, x) in &[(1e-300, 0.5), (0.999_999, 1e-200), (1e-12, 1e-12)] {
                let t = tnorm_eval(a, x, lam(l));
                assert!(
                    t.is_finite() && (0.0..=a.min(x)).contains(&t),
                    "{l} {a} {x} {t}"
                );
            }
        }
    }

    #[test]
    fn residual_examples() {
        assert_eq!(tnorm_residual(0.6, 0.6, lam(7.0)).unwrap(), 1.0);
        assert!((tnorm_residual(0.8606, 0.4505, lam(3.0)).unwrap() - 0.4513).abs() < 1e-4);
        assert!((tnorm_residual(0.6430, 0.5723, lam(3.0)).unwrap() - 0.6413).abs() < 1e-4);
    }

    #[test]
    fn residual_errors() {
        assert!(matches!(
            tnorm_residual(0.3, 0.4, lam(2.0)),
            Err(FreError::Domain(_))
        ));
        assert!(matches!(
            tnorm_residual(0.3, 0.0, lam(2.0)),
            Err(FreError::Domain(_))
        ));
    }

    #[test]
    fn residual_of_one_is_identity() {
        assert_eq!(tnorm_residual(1.0, 0.37, lam(4.0)).unwrap(), 0.37);
    }

    #[test]
    fn product_residual_is_quotient() {
        let r = tnorm_residual(0.9, 0.5, lam(1.0)).unwrap();
        assert!((r - 5.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn max_compose_examples() {
        let p = lam(3.0);
        assert_eq!(
            max_compose(&[0.0; 4], &[0.3, 0.9, 1.0, 0.2], p).unwrap(),
            0.0
        );
        let x = [0.3, 0.9, 0.1];
        assert_eq!(max_compose(&[1.0; 3], &x, p).unwrap(), 0.9);
        assert_eq!(
            max_compose(&[0.5, 0.5], &[0.1], p),
            Err(FreError::Dimension {
                expected: 2,
                got: 1
            })
        );
    }
}
