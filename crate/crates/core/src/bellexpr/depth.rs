use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BellExpression, KnownBound, Provenance, Term};
use crate::error::{Error, Result};

/// Default margin by which a value must exceed a bound to count.
pub const DEFAULT_EXCEED_MARGIN: f64 = 1e-7;

/// Pads every term with ∅ for parties `expr.n() + 1 ..= n_target`; each new
/// party gets `new_settings` settings.
pub fn lift(expr: &BellExpression, n_target: usize, new_settings: usize) -> Result<BellExpression> {
    if n_target < expr.n() {
        return Err(Error::InvalidParameter(format!(
            "cannot lift {} parties down to {n_target}",
            expr.n()
        )));
    }
    if n_target == expr.n() {
        return Ok(expr.clone());
    }
    let mut spp = expr.settings_per_party().to_vec();
    spp.resize(n_target, new_settings.max(1));
    let terms = expr
        .terms()
        .iter()
        .map(|t| Term::new(t.coeff, t.settings.padded(n_target)))
        .collect();
    let mut lifted = BellExpression::new(format!("{}^{n_target}", expr.name()), spp, terms)?;
    lifted.known_bounds_mut().local = expr.known_bounds().local;
    Ok(lifted)
}

/// Every k-producible state of `n` parties is `⌈n/k⌉`-separable.
pub fn producible_to_separable(n: usize, k: usize) -> Result<usize> {
    check_range(n, k, "k")?;
    Ok(n.div_ceil(k))
}

/// Every m-separable state of `n` parties is `⌈n/m⌉`-producible.
pub fn separable_to_producible(n: usize, m: usize) -> Result<usize> {
    check_range(n, m, "m")?;
    Ok(n.div_ceil(m))
}

fn check_range(n: usize, v: usize, what: &str) -> Result<()> {
    if v == 0 || v > n {
        return Err(Error::InvalidParameter(format!("{what} = {v} outside 1..={n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthCertificate {
    pub expression: String,
    pub value: f64,
    /// Largest k whose k-producible bound is exceeded.
    pub exceeded_k: Option<usize>,
    pub depth_lower_bound: usize,
    pub provenance: Option<Provenance>,
}

/// Certifies entanglement depth from `value` against k-producible bounds.
pub fn certify_depth(
    expr: &BellExpression,
    value: f64,
    bounds: &BTreeMap<usize, KnownBound>,
    margin: f64,
) -> Result<DepthCertificate> {
    if bounds.is_empty() {
        return Err(Error::InvalidParameter("no producibility bounds given".into()));
    }
    if let Some((&k, _)) = bounds.iter().find(|(&k, _)| k == 0 || k > expr.n()) {
        return Err(Error::InvalidParameter(format!("bound for k = {k} outside 1..={}", expr.n())));
    }
    if bounds.values().zip(bounds.values().skip(1)).any(|(a, b)| b.value < a.value) {
        return Err(Error::Precondition("producibility bounds must be nondecreasing in k".into()));
    }
    let exceeded = bounds.iter().rfind(|(_, b)| value > b.value + margin);
    Ok(DepthCertificate {
        expression: expr.name().to_string(),
        value,
        exceeded_k: exceeded.map(|(&k, _)| k),
        depth_lower_bound: exceeded.map_or(1, |(&k, _)| (k + 1).min(expr.n())),
        provenance: exceeded.map(|(_, b)| b.provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellexpr::local_bound;

    fn bounds(values: &[(usize, f64)]) -> BTreeMap<usize, KnownBound> {
        values
            .iter()
            .map(|&(k, v)| (k, KnownBound::new(v, Provenance::Analytic)))
            .collect()
    }

    #[test]
    fn lifting_keeps_local_bound() {
        let chsh = BellExpression::parse_terms("CHSH", vec![2, 2], "0.5E(1,1)+0.5E(1,2)+0.5E(2,1)-0.5E(2,2)").unwrap();
        let l = lift(&chsh, 3, 2).unwrap();
        assert_eq!(l.n(), 3);
        assert_eq!(l.terms()[0].settings.entries(), &[1, 1, 0]);
        assert_eq!(local_bound(&l).unwrap().value, 1.0);
        assert_eq!(lift(&chsh, 2, 2).unwrap(), chsh);
        assert!(lift(&chsh, 1, 2).is_err());
    }

    #[test]
    fn conversions() {
        assert_eq!(producible_to_separable(6, 2).unwrap(), 3);
        assert_eq!(separable_to_producible(4, 2).unwrap(), 2);
        for n in 3..=8 {
            assert_eq!(producible_to_separable(n, n - 1).unwrap(), 2);
            assert_eq!(separable_to_producible(n, 2).unwrap(), n.div_ceil(2));
        }
        assert!(producible_to_separable(3, 0).is_err());
        assert!(separable_to_producible(3, 4).is_err());
    }

    #[test]
    fn certificate_from_gamma_bounds() {
        let e = BellExpression::parse_terms("S", vec![2, 2, 2], "E(1,1,1)").unwrap();
        let c = certify_depth(&e, 5.0 / 3.0, &bounds(&[(1, 1.0), (2, 2f64.sqrt())]), DEFAULT_EXCEED_MARGIN).unwrap();
        assert_eq!(c.exceeded_k, Some(2));
        assert_eq!(c.depth_lower_bound, 3);
    }

    #[test]
    fn equality_does_not_exceed() {
        let e = BellExpression::parse_terms("S", vec![2, 2, 2], "E(1,1,1)").unwrap();
        let b = bounds(&[(1, 1.0), (2, 2f64.sqrt())]);
        let c = certify_depth(&e, 2f64.sqrt(), &b, DEFAULT_EXCEED_MARGIN).unwrap();
        assert_eq!(c.depth_lower_bound, 2);
        let c = certify_depth(&e, 0.5, &b, DEFAULT_EXCEED_MARGIN).unwrap();
        assert_eq!((c.exceeded_k, c.depth_lower_bound), (None, 1));
    }

    #[test]
    fn certificate_errors() {
        let e = BellExpression::parse_terms("S", vec![2, 2], "E(1,1)").unwrap();
        assert!(certify_depth(&e, 1.0, &BTreeMap::new(), 0.0).is_err());
        assert!(certify_depth(&e, 1.0, &bounds(&[(1, 2.0), (2, 1.0)]), 0.0).is_err());
        assert!(certify_depth(&e, 1.0, &bounds(&[(3, 1.0)]), 0.0).is_err());
    }
}
