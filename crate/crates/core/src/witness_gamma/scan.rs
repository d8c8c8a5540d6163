use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use serde::Serialize;

use super::{build_expression, find_dmin, find_dmin_optimized, k_producible_bound, GammaWitness};
use crate::bellexpr::{certify_depth, BellExpression, DEFAULT_EXCEED_MARGIN};
use crate::error::{Error, Result};
use crate::qcore::{make_ghz_theta, make_w, HermitianOperator, ObservableAssignment, StateVector};
use crate::seesaw::{optimize_observables, SeesawConfig};

/// `a, a+step, …` up to `b`, clipped to `(0, π/4]`.
pub fn theta_grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(a > 0.0) || !(b >= a) || a > FRAC_PI_4 {
        return Err(Error::InvalidParameter(format!("bad theta grid {a}:{b}:{step}")));
    }
    let end = b.min(FRAC_PI_4);
    let count = ((end - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * step).filter(|&t| t <= FRAC_PI_4).collect())
}

/// A three-party strategy violating `S_{3,2}` with a barely entangled state.
pub struct UnbalancedExample {
    pub theta: f64,
    pub state: StateVector,
    pub observables: ObservableAssignment,
    pub expression: BellExpression,
}

impl UnbalancedExample {
    pub fn value(&self) -> Result<f64> {
        self.expression.quantum_value(&self.state, &self.observables)
    }
}

/// `θ = 0.07`, first settings along fixed Bloch directions and second
/// settings `σ_z`, `I`, `−σ_z`.
pub fn unbalanced_ghz_example() -> Result<UnbalancedExample> {
    let theta = 0.07;
    let first = [(0.7734, 0.6767), (0.7457, 0.1533), (0.2295, 0.8300)];
    let second = [
        HermitianOperator::pauli_z(),
        HermitianOperator::identity(2),
        HermitianOperator::pauli_z().scaled(-1.0),
    ];
    let ops = first
        .iter()
        .zip(second)
        .map(|(&(polar, azimuth), b)| vec![HermitianOperator::unit_vector(polar * PI, azimuth * PI), b])
        .collect();
    Ok(UnbalancedExample {
        theta,
        state: make_ghz_theta(3, theta)?,
        observables: ObservableAssignment::new(ops)?,
        expression: build_expression(GammaWitness::new(3, 2.0)?)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaScanRow {
    pub n: usize,
    pub gamma: f64,
    pub theta: f64,
    pub value: f64,
    /// Value minus the (n−1)-producible bound.
    pub gme_margin: f64,
    /// Value minus the local bound 1.
    pub nonlocality_margin: f64,
}

/// Best value of `S_{n,γ}` on `cos θ|0…0⟩ + sin θ|1…1⟩` over qubit
/// observables (trivial ones allowed), per θ.
pub fn unbalanced_ghz_scan(n: usize, thetas: &[f64], gamma: f64, config: &SeesawConfig) -> Result<Vec<ThetaScanRow>> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidParameter(format!("unbalanced GHZ scan supports n in 2..=5, got {n}")));
    }
    let expr = build_expression(GammaWitness::new(n, gamma)?)?;
    let gme_bound = k_producible_bound(n - 1, gamma)?;
    let config = SeesawConfig { allow_trivial: true, ..*config };
    thetas
        .iter()
        .map(|&theta| {
            let r = optimize_observables(&make_ghz_theta(n, theta)?, &expr, &config)?;
            Ok(ThetaScanRow {
                n,
                gamma,
                theta,
                value: r.value,
                gme_margin: r.value - gme_bound,
                nonlocality_margin: r.value - 1.0,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WScanRow {
    pub n: usize,
    pub gamma: f64,
    pub value: f64,
    /// Value minus the 2-producible bound.
    pub margin: f64,
    /// Depth certified by the value against the k-producible bounds.
    pub depth: usize,
}

/// Best value of `S_{n,γ}` on the W state per γ, with the certified depth.
pub fn w_state_scan(n: usize, gammas: &[f64], config: &SeesawConfig) -> Result<Vec<WScanRow>> {
    let state = make_w(n)?;
    gammas
        .iter()
        .map(|&gamma| {
            let expr = build_expression(GammaWitness::new(n, gamma)?)?;
            let r = optimize_observables(&state, &expr, config)?;
            let cert = certify_depth(&expr, r.value, &expr.known_bounds().producible, DEFAULT_EXCEED_MARGIN)?;
            Ok(WScanRow {
                n,
                gamma,
                value: r.value,
                margin: r.value - k_producible_bound(2, gamma)?,
                depth: cert.depth_lower_bound,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DminRow {
    pub n: usize,
    pub dmin_gamma2: Option<usize>,
    pub dmin_optimized: Option<usize>,
    pub gamma_star: f64,
}

/// Smallest odd qudit dimension certifying GME of the qudit GHZ state, at
/// γ = 2 and at the best γ on the grid.
pub fn fig3_rows(ns: impl IntoIterator<Item = usize>, step: f64) -> Result<Vec<DminRow>> {
    ns.into_iter()
        .map(|n| {
            let opt = find_dmin_optimized(n, step)?;
            Ok(DminRow {
                n,
                dmin_gamma2: find_dmin(n, 2.0)?,
                dmin_optimized: opt.d,
                gamma_star: opt.gamma,
            })
        })
        .collect()
}

fn opt(d: Option<usize>) -> String {
    d.map_or_else(|| "none".into(), |d| d.to_string())
}

/// Columns `n,gamma,value_minus_2prod_bound`.
pub fn fig1_csv(rows: &[WScanRow]) -> String {
    let mut out = String::from("n,gamma,value_minus_2prod_bound\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.n, r.gamma, r.margin);
    }
    out
}

/// Columns `n,gamma,theta,value,gme_margin,nonlocality_margin`.
pub fn fig2_csv(rows: &[ThetaScanRow]) -> String {
    let mut out = String::from("n,gamma,theta,value,gme_margin,nonlocality_margin\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.gamma, r.theta, r.value, r.gme_margin, r.nonlocality_margin
        );
    }
    out
}

/// Columns `n,dmin_gamma2,dmin_optimized,gamma_star`.
pub fn fig3_csv(rows: &[DminRow]) -> String {
    let mut out = String::from("n,dmin_gamma2,dmin_optimized,gamma_star\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, opt(r.dmin_gamma2), opt(r.dmin_optimized), r.gamma_star);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_violates_local_bound() {
        let ex = unbalanced_ghz_example().unwrap();
        let v = ex.value().unwrap();
        assert!(v > 1.0, "{v}");
    }

    #[test]
    fn grid_endpoints() {
        let g = theta_grid(0.01, 0.785, 0.01).unwrap();
        assert_eq!(g.len(), 78);
        assert!((g[77] - 0.78).abs() < 1e-12);
        assert!(theta_grid(0.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn csv_headers() {
        let rows = fig3_rows([3, 4], 0.5).unwrap();
        let csv = fig3_csv(&rows);
        assert!(csv.starts_with("n,dmin_gamma2,dmin_optimized,gamma_star\n3,3,"));
    }
}
