//! The one-parameter family `S_{n,γ}`: γ times the average of all `2^n`
//! two-setting full correlators, minus the all-second-settings correlator.
//! Its local bound is 1 and its k-producible bound is the k-party quantum
//! maximum, so it witnesses entanglement depth.

mod scan;

pub use scan::{
    fig1_csv, fig2_csv, fig3_csv, fig3_rows, theta_grid, unbalanced_ghz_example, unbalanced_ghz_scan, w_state_scan,
    DminRow, ThetaScanRow, WScanRow,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bellexpr::{BellExpression, KnownBound, Provenance, SettingVector, Term};
use crate::error::{Error, Result};
use crate::qcore::{HermitianOperator, ObservableAssignment};

/// Largest `n` for which the ansatz value is registered as a k-producible
/// bound. Beyond it the ansatz is only known to give a lower bound on the
/// quantum maximum.
pub const MAX_CERTIFIED_K: usize = 6;

/// Largest odd dimension tried by [`find_dmin`].
pub const DMIN_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaWitness {
    n: usize,
    gamma: f64,
}

impl GammaWitness {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        check_gamma(gamma)?;
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside (0, 2]")));
    }
    Ok(())
}

/// Rotation angle `φ` of the equatorial ansatz; the first setting sits at
/// `α = −(n−1)φ/(2n)` and the second at `φ + α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub n: usize,
    pub phi: f64,
}

impl AnsatzParams {
    pub fn new(n: usize, phi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need n >= 1".into()));
        }
        if !(phi.abs() <= PI + 1e-12) {
            return Err(Error::InvalidParameter(format!("phi {phi} outside [-pi, pi]")));
        }
        Ok(Self { n, phi })
    }

    pub fn alpha(&self) -> f64 {
        -((self.n - 1) as f64) * self.phi / (2.0 * self.n as f64)
    }
}

/// Builds `S_{n,γ}` with its local, k-producible and quantum bounds attached.
pub fn build_expression(w: GammaWitness) -> Result<BellExpression> {
    let GammaWitness { n, gamma } = w;
    let c = gamma / (1u64 << n) as f64;
    let mut terms: Vec<Term> = (0..1usize << n)
        .map(|bits| {
            let s: Vec<u8> = (0..n).map(|p| 1 + (bits >> (n - 1 - p) & 1) as u8).collect();
            Term::new(c, SettingVector::new(s))
        })
        .collect();
    terms.push(Term::new(-1.0, SettingVector::constant(n, 2)));
    let mut expr = BellExpression::new(format!("S{n}(gamma={gamma})"), vec![2; n], terms)?;
    let kb = expr.known_bounds_mut();
    kb.local = Some(KnownBound::new(1.0, Provenance::Analytic));
    for k in 1..n.min(MAX_CERTIFIED_K + 1) {
        kb.producible.insert(k, KnownBound::new(k_producible_bound(k, gamma)?, Provenance::Analytic));
    }
    if n <= MAX_CERTIFIED_K {
        kb.tsirelson = Some(KnownBound::new(optimal_quantum_bound(n, gamma)?.value, Provenance::Analytic));
    }
    Ok(expr)
}

/// Same observables for every party: setting 1 along `α`, setting 2 along
/// `φ + α` on the equator.
pub fn ansatz_observables(p: AnsatzParams) -> Result<ObservableAssignment> {
    ObservableAssignment::uniform(p.n, qubit_pair(p))
}

fn qubit_pair(p: AnsatzParams) -> Vec<HermitianOperator> {
    let a = p.alpha();
    vec![HermitianOperator::equatorial(a), HermitianOperator::equatorial(p.phi + a)]
}

/// `γ cos^{n+1}(φ/2) − cos((n+1)φ/2)`: the ansatz value on the GHZ state.
pub fn quantum_value_formula(n: usize, gamma: f64, phi: f64) -> f64 {
    let m = (n + 1) as f64;
    gamma * (phi / 2.0).cos().powi(n as i32 + 1) - (m * phi / 2.0).cos()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuantumBound {
    pub phi: f64,
    pub value: f64,
}

/// Optimal ansatz angle and value: closed forms for `n ≤ 5`, numeric 1-D
/// maximization beyond.
pub fn optimal_quantum_bound(n: usize, gamma: f64) -> Result<QuantumBound> {
    match closed_form_bound(n, gamma)? {
        Some(b) => Ok(b),
        None => numeric_quantum_bound(n, gamma),
    }
}

/// The `n ≤ 5` closed forms; `None` for larger `n`.
pub fn closed_form_bound(n: usize, gamma: f64) -> Result<Option<QuantumBound>> {
    check_gamma(gamma)?;
    let g = gamma;
    let b = match n {
        0 | 1 => return Err(Error::InvalidParameter(format!("need n >= 2, got {n}"))),
        2 => QuantumBound {
            phi: 2.0 * (-(3.0 - g).sqrt()).atan(),
            value: 2.0 / (4.0 - g).sqrt(),
        },
        3 => QuantumBound {
            phi: (4.0 * (4.0 - g).sqrt() / g).atan(),
            value: (8.0 + g) / (8.0 - g),
        },
        4 => {
            let s = (20.0 + g).sqrt();
            let t = -(10.0 - g - s).sqrt() / (6.0 + s).sqrt();
            QuantumBound {
                phi: 2.0 * t.atan(),
                value: g * (1.0 / (6.0 - s)).powf(2.5) - (5.0 * t.atan()).cos(),
            }
        }
        5 => {
            let r = (64.0 + 6.0 * g).sqrt();
            QuantumBound {
                phi: 2.0 * ((16.0 - g - r).sqrt() / -(16.0 + r).sqrt()).atan(),
                value: (128.0 * r + g * (224.0 + g + 12.0 * r)) / (g - 32.0).powi(2),
            }
        }
        _ => return Ok(None),
    };
    if !b.value.is_finite() || !b.phi.is_finite() {
        return Err(Error::Numerical(format!("closed form for n={n}, gamma={gamma} is not finite")));
    }
    Ok(Some(b))
}

const GRID_POINTS: usize = 4096;
const GOLDEN_TOL: f64 = 1e-13;
const GOLDEN_MAX_ITER: usize = 200;

/// Maximizes [`quantum_value_formula`] over `φ ∈ [0, π]` (the formula is
/// even in φ) by a dense grid followed by golden-section refinement.
pub fn numeric_quantum_bound(n: usize, gamma: f64) -> Result<QuantumBound> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    check_gamma(gamma)?;
    let f = |phi: f64| quantum_value_formula(n, gamma, phi);
    let h = PI / GRID_POINTS as f64;
    let best = (0..=GRID_POINTS)
        .map(|i| i as f64 * h)
        .fold((0.0, f(0.0)), |acc, x| if f(x) > acc.1 { (x, f(x)) } else { acc });
    let (mut a, mut b) = ((best.0 - h).max(0.0), (best.0 + h).min(PI));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut iter = 0;
    while b - a > GOLDEN_TOL {
        iter += 1;
        if iter > GOLDEN_MAX_ITER {
            return Err(Error::Numerical(format!("golden-section search did not converge for n={n}")));
        }
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    let phi = 0.5 * (a + b);
    let (phi, value) = if f(phi) >= best.1 { (phi, f(phi)) } else { best };
    Ok(QuantumBound { phi, value })
}

/// The k-party quantum maximum, which bounds `S_{n,γ}` on k-producible
/// states. `k = 1` gives the local bound 1.
pub fn k_producible_bound(k: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    match k {
        0 => Err(Error::InvalidParameter("k must be at least 1".into())),
        1 => Ok(1.0),
        _ => Ok(optimal_quantum_bound(k, gamma)?.value),
    }
}

/// Which party and setting get the −1 tail for odd qudit dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParityRole {
    /// Last party's second setting gets the −1 tail.
    #[default]
    LastPartyFlipped,
    /// Every tail is +1.
    AllPositive,
}

/// Block-diagonal qudit observables: `⌊d/2⌋` copies of the qubit ansatz,
/// and for odd `d` a one-dimensional tail.
pub fn qudit_observables(d: usize, n: usize, phi: f64, role: ParityRole) -> Result<ObservableAssignment> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension must be >= 2, got {d}")));
    }
    let pair = qubit_pair(AnsatzParams::new(n, phi)?);
    let ops = (0..n)
        .map(|party| {
            pair.iter()
                .enumerate()
                .map(|(x, op)| {
                    let mut blocks = vec![op.clone(); d / 2];
                    if d % 2 == 1 {
                        let flip = role == ParityRole::LastPartyFlipped && party == n - 1 && x == 1;
                        blocks.push(HermitianOperator::diagonal(&[if flip { -1.0 } else { 1.0 }]));
                    }
                    HermitianOperator::direct_sum(&blocks)
                })
                .collect()
        })
        .collect();
    ObservableAssignment::new(ops)
}

/// Value of the block observables on the d-dimensional GHZ state.
pub fn qudit_value(n: usize, d: usize, gamma: f64) -> Result<f64> {
    let s = optimal_quantum_bound(n, gamma)?.value;
    Ok(if d.is_multiple_of(2) { s } else { ((d - 1) as f64 * s + 1.0) / d as f64 })
}

/// For odd `d`, whether the block strategy on the d-dimensional GHZ state
/// beats the (n−1)-producible bound: `(d−1)·S_n − d·S_{n−1} > −1`.
pub fn gme_criterion_odd_d(n: usize, d: usize, gamma: f64) -> Result<bool> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("d must be odd and >= 3, got {d}")));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    let sn = optimal_quantum_bound(n, gamma)?.value;
    let sm = k_producible_bound(n - 1, gamma)?;
    Ok((d - 1) as f64 * sn - d as f64 * sm > -1.0)
}

/// Smallest odd `d` passing [`gme_criterion_odd_d`], or `None` below
/// [`DMIN_CAP`].
pub fn find_dmin(n: usize, gamma: f64) -> Result<Option<usize>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    let sn = optimal_quantum_bound(n, gamma)?.value;
    let sm = k_producible_bound(n - 1, gamma)?;
    // Equivalent to d·(S_n − S_{n−1}) > S_n − 1, monotone in d.
    Ok((3..=DMIN_CAP).step_by(2).find(|&d| (d - 1) as f64 * sn - d as f64 * sm > -1.0))
}

/// Grid `step, 2·step, …, 2` (the last point is exactly 2).
pub fn gamma_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 2.0) {
        return Err(Error::InvalidParameter(format!("gamma step {step} outside (0, 2]")));
    }
    let count = (2.0 / step - 1e-9).ceil() as usize;
    let mut grid: Vec<f64> = (1..count).map(|i| i as f64 * step).collect();
    grid.push(2.0);
    Ok(grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizedDmin {
    pub gamma: f64,
    pub d: Option<usize>,
}

/// Minimizes [`find_dmin`] over the γ grid; ties go to the largest γ.
pub fn find_dmin_optimized(n: usize, step: f64) -> Result<OptimizedDmin> {
    let mut best = OptimizedDmin { gamma: 2.0, d: find_dmin(n, 2.0)? };
    for gamma in gamma_grid(step)?.into_iter().rev() {
        let d = find_dmin(n, gamma)?;
        let better = match (d, best.d) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        if better {
            best = OptimizedDmin { gamma, d };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellexpr::{bell_value, local_bound};
    use crate::qcore::make_ghz;

    #[test]
    fn expression_shape() {
        let e = build_expression(GammaWitness::new(3, 2.0).unwrap()).unwrap();
        assert_eq!(e.terms().len(), 8);
        let last = e.terms().iter().find(|t| t.settings == SettingVector::constant(3, 2)).unwrap();
        assert!((last.coeff - (0.25 - 1.0)).abs() < 1e-15);
        assert_eq!(local_bound(&e).unwrap().value, 1.0);
        assert!(GammaWitness::new(3, 0.0).is_err());
        assert!(GammaWitness::new(3, 2.1).is_err());
    }

    #[test]
    fn formula_matches_ghz_expectation() {
        for (n, gamma, phi) in [(2, 2.0, -PI / 2.0), (3, 1.3, 0.7), (4, 0.4, -2.1), (5, 2.0, 3.0)] {
            let e = build_expression(GammaWitness::new(n, gamma).unwrap()).unwrap();
            let obs = ansatz_observables(AnsatzParams::new(n, phi).unwrap()).unwrap();
            let v = bell_value(&e, &make_ghz(n).unwrap(), &obs).unwrap();
            assert!((v - quantum_value_formula(n, gamma, phi)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_agree_with_search() {
        for n in 2..=5 {
            for gamma in [0.05, 0.5, 1.0, 1.7, 2.0] {
                let c = closed_form_bound(n, gamma).unwrap().unwrap();
                let m = numeric_quantum_bound(n, gamma).unwrap();
                assert!((c.value - m.value).abs() < 1e-10, "n={n} gamma={gamma}");
                assert!((quantum_value_formula(n, gamma, c.phi) - c.value).abs() < 1e-10);
                assert!((c.phi.abs() - m.phi).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dmin_small_cases() {
        assert_eq!(find_dmin(3, 2.0).unwrap(), Some(3));
        assert_eq!(find_dmin(4, 2.0).unwrap(), Some(5));
        assert!(gme_criterion_odd_d(3, 3, 2.0).unwrap());
        assert!(!gme_criterion_odd_d(4, 3, 2.0).unwrap());
        assert!(gme_criterion_odd_d(4, 4, 2.0).is_err());
        let g = gamma_grid(0.01).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(*g.last().unwrap(), 2.0);
    }
}
