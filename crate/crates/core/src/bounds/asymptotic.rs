use serde::Serialize;

use super::{BoundKind, BoundValue};
use crate::error::{domain, Result};
use crate::specfun::{binary_entropy, mixture_entropy_g, QuadratureSpec, LOG2_E};

/// Limiting row ratios `m_b/p -> rho_b`, `m_e/p -> rho_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRatios {
    rho_b: f64,
    rho_e: f64,
}

impl AsymptoticRatios {
    /// Requires `0 < rho_b <= 1/2` and `0 <= rho_e <= rho_b`.
    pub fn new(rho_b: f64, rho_e: f64) -> Result<Self> {
        if !(rho_b > 0.0 && rho_b <= 0.5) {
            return domain(format!("rho_b must lie in (0, 1/2], got {rho_b}"));
        }
        if !(rho_e >= 0.0 && rho_e <= rho_b) {
            return domain(format!("rho_e must lie in [0, rho_b = {rho_b}], got {rho_e}"));
        }
        Ok(Self { rho_b, rho_e })
    }

    pub fn rho_b(&self) -> f64 {
        self.rho_b
    }

    pub fn rho_e(&self) -> f64 {
        self.rho_e
    }
}

/// `x log2(1/x)`-style term `a log2(a/b)` written to stay accurate near 0.
fn xlog2_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).log2()
    }
}

/// Asymptotic secrecy lower bound
/// `H2(rho_b) - 1/2 [(1-rho_e) log2(1/(1-rho_e)) - (rho_b-rho_e) log2(rho_b/(rho_b-rho_e))]`.
///
/// `rho_e = 0` returns `H2(rho_b)` exactly. Errors when `rho_e >= rho_b`,
/// where the second log diverges; see [`lb3_left_limit`] for the finite
/// limit there.
pub fn lb3(r: &AsymptoticRatios) -> Result<BoundValue> {
    let (rb, re) = (r.rho_b, r.rho_e);
    if re >= rb {
        return domain(format!("lb3 requires rho_e < rho_b, got rho_e = {re}, rho_b = {rb}"));
    }
    let h = binary_entropy(rb)?;
    if re == 0.0 {
        return Ok(BoundValue::exact(BoundKind::Lb3, h));
    }
    // (1-re) log2(1/(1-re)) = -(1-re) log2(1-re)
    let eve_term = -(1.0 - re) * (-re).ln_1p() * LOG2_E;
    // (rb-re) log2(rb/(rb-re)) = -(rb-re) log2(1 - re/rb)
    let gap = rb - re;
    let bob_term = -xlog2_ratio(gap, rb);
    Ok(BoundValue::exact(BoundKind::Lb3, h - 0.5 * (eve_term - bob_term)))
}

/// Limit of [`lb3`] as `rho_e -> rho_b` from below:
/// `H2(rho_b) - 1/2 (1-rho_b) log2(1/(1-rho_b))`.
pub fn lb3_left_limit(rho_b: f64) -> Result<f64> {
    let r = AsymptoticRatios::new(rho_b, rho_b)?;
    let h = binary_entropy(r.rho_b)?;
    Ok(h + 0.5 * (1.0 - rho_b) * (-rho_b).ln_1p() * LOG2_E)
}

/// Asymptotic capacity of the main channel: `H2(rho_b)`.
pub fn ub2(r: &AsymptoticRatios) -> Result<BoundValue> {
    Ok(BoundValue::exact(BoundKind::Ub2, binary_entropy(r.rho_b)?))
}

/// Upper bound for codes inducing a symmetric input distribution:
/// `g(rho_b, rho_e)`.
///
/// At `rho_e = 0` the bound degenerates to [`ub2`]; that value is returned
/// with `meta["degenerate"] = "true"`.
pub fn ub3(r: &AsymptoticRatios, quad: &QuadratureSpec) -> Result<BoundValue> {
    if r.rho_e == 0.0 {
        quad.validate()?;
        let mut v = ub2(r)?.with_meta("degenerate", true);
        v.kind = BoundKind::Ub3;
        return Ok(v);
    }
    let g = mixture_entropy_g(r.rho_b, r.rho_e, quad)?;
    Ok(BoundValue::exact(BoundKind::Ub3, g).with_meta("abs_tolerance", quad.abs_tolerance))
}

/// Both branches of the final maximum in the symmetric-code bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ub3BranchCheck {
    pub g_value: f64,
    /// `rho_b log2 e`, the branch the derivation arrives at.
    pub linear_branch: f64,
    /// `g_value >= linear_branch`.
    pub g_attains_max: bool,
    /// `rho_b` alone, the branch as it is usually displayed.
    pub plain_branch: f64,
    /// `g_value >= plain_branch`.
    pub g_attains_max_plain: bool,
}

/// Evaluates `g(rho_b, rho_e)` against the linear branch. Requires
/// `rho_e > 0`.
pub fn ub3_branch_check(r: &AsymptoticRatios, quad: &QuadratureSpec) -> Result<Ub3BranchCheck> {
    if r.rho_e == 0.0 {
        return domain("ub3_branch_check requires rho_e > 0");
    }
    let g_value = mixture_entropy_g(r.rho_b, r.rho_e, quad)?;
    let linear_branch = r.rho_b * LOG2_E;
    let plain_branch = r.rho_b;
    Ok(Ub3BranchCheck {
        g_value,
        linear_branch,
        g_attains_max: g_value >= linear_branch,
        plain_branch,
        g_attains_max_plain: g_value >= plain_branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ratios(b: f64, e: f64) -> AsymptoticRatios {
        AsymptoticRatios::new(b, e).unwrap()
    }

    #[test]
    fn ratio_validation() {
        assert!(AsymptoticRatios::new(0.0, 0.0).is_err());
        assert!(AsymptoticRatios::new(0.6, 0.1).is_err());
        assert!(AsymptoticRatios::new(0.2, 0.3).is_err());
        assert!(AsymptoticRatios::new(0.2, -0.1).is_err());
        assert!(AsymptoticRatios::new(0.5, 0.5).is_ok());
    }

    #[test]
    fn lb3_reference_points() {
        let h = lb3(&ratios(0.2, 0.0)).unwrap().bits_per_dim;
        assert_eq!(h, binary_entropy(0.2).unwrap());
        assert_abs_diff_eq!(h, 0.721_928_094_887_362_3, epsilon = 1e-12);
        let v = lb3(&ratios(0.2, 0.1)).unwrap().bits_per_dim;
        assert_abs_diff_eq!(v, 0.703_526_702_837, epsilon = 1e-10);
        assert!(lb3(&ratios(0.2, 0.2)).is_err());
    }

    #[test]
    fn lb3_left_limit_is_approached() {
        let lim = lb3_left_limit(0.2).unwrap();
        // 0.7219281 - 0.4 log2(1.25)
        assert_abs_diff_eq!(lim, 0.593_156_857, epsilon = 1e-9);
        let near = lb3(&ratios(0.2, 0.2 - 1e-8)).unwrap().bits_per_dim;
        assert!((near - lim).abs() < 1e-6);
    }

    #[test]
    fn ub2_values() {
        assert_abs_diff_eq!(ub2(&ratios(0.5, 0.0)).unwrap().bits_per_dim, 1.0, epsilon = 1e-15);
        assert!(ub2(&ratios(1e-12, 0.0)).unwrap().bits_per_dim < 1e-10);
    }

    #[test]
    fn ub3_degenerates_to_ub2() {
        let q = QuadratureSpec::default();
        let v = ub3(&ratios(0.2, 0.0), &q).unwrap();
        assert_eq!(v.kind, BoundKind::Ub3);
        assert_eq!(v.meta["degenerate"], "true");
        assert_eq!(v.bits_per_dim, ub2(&ratios(0.2, 0.0)).unwrap().bits_per_dim);
        assert!(ub3_branch_check(&ratios(0.2, 0.0), &q).is_err());
    }

    #[test]
    fn ub3_reference_values() {
        let q = QuadratureSpec::default();
        assert_abs_diff_eq!(ub3(&ratios(0.2, 0.2), &q).unwrap().bits_per_dim, 0.692_873_320_188_337, epsilon = 1e-8);
        assert_abs_diff_eq!(ub3(&ratios(0.2, 0.1), &q).unwrap().bits_per_dim, 0.711_941_110_631_538, epsilon = 1e-8);
    }

    #[test]
    fn branch_check_reports_both_readings() {
        let c = ub3_branch_check(&ratios(0.3, 0.3), &QuadratureSpec::default()).unwrap();
        assert!(c.g_attains_max && c.g_attains_max_plain);
        assert_abs_diff_eq!(c.linear_branch, 0.3 * LOG2_E, epsilon = 1e-15);
        assert_eq!(c.plain_branch, 0.3);
    }
}
