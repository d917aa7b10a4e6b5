//! Reaction models: the cooperative Lotka-Volterra pair, the scalar Fisher
//! equation and the cubic (Hadeler-Rothe type) nonlinearity.
//!
//! Everything here is a pure function of its inputs. Densities above the
//! a-priori box are not clamped; that is left to the solver.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Real parts within this distance of zero are reported as marginal.
pub const STABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("cooperation coefficients must satisfy b1*b2 < 1, got b1={b1}, b2={b2} (product {})", b1 * b2)]
    CooperationTooStrong { b1: f64, b2: f64 },
    #[error("cubic coefficient nu must exceed -1, got {0}")]
    CubicCoefficient(f64),
    #[error("densities must be non-negative, got {0:?}")]
    NegativeDensity(Vec<f64>),
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

fn non_negative(u: &[f64]) -> Result<(), ModelError> {
    if u.iter().all(|&v| v >= 0.0) {
        Ok(())
    } else {
        Err(ModelError::NegativeDensity(u.to_vec()))
    }
}

/// Parameters of the cooperative two-species system.
///
/// `u1_t = d1 u1_xx + r1 u1 (1 - u1 + b1 u2)` and symmetrically for `u2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoopParams {
    pub d1: f64,
    pub d2: f64,
    pub r1: f64,
    pub r2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl CoopParams {
    pub fn new(d1: f64, d2: f64, r1: f64, r2: f64, b1: f64, b2: f64) -> Result<Self, ModelError> {
        let p = Self { d1, d2, r1, r2, b1, b2 };
        p.validate()?;
        Ok(p)
    }

    /// Checks the positivity of all six parameters and `b1*b2 < 1`.
    ///
    /// Zero cooperation (`b1 = b2 = 0`) is accepted as the decoupled limit.
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("d1", self.d1)?;
        positive("d2", self.d2)?;
        positive("r1", self.r1)?;
        positive("r2", self.r2)?;
        for (name, b) in [("b1", self.b1), ("b2", self.b2)] {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(ModelError::NonPositive { name, value: b });
            }
        }
        if self.b1 * self.b2 >= 1.0 {
            return Err(ModelError::CooperationTooStrong { b1: self.b1, b2: self.b2 });
        }
        Ok(())
    }

    /// The coexistence state `K = (k1, k2)`.
    pub fn coexistence(&self) -> (f64, f64) {
        let denom = 1.0 - self.b1 * self.b2;
        ((1.0 + self.b1) / denom, (1.0 + self.b2) / denom)
    }

    #[inline]
    pub(crate) fn rates(&self, u1: f64, u2: f64) -> (f64, f64) {
        (
            self.r1 * u1 * (1.0 - u1 + self.b1 * u2),
            self.r2 * u2 * (1.0 - u2 + self.b2 * u1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherParams {
    pub d: f64,
    pub r: f64,
    /// Carrying capacity.
    pub k: f64,
}

impl FisherParams {
    pub fn new(d: f64, r: f64, k: f64) -> Result<Self, ModelError> {
        let p = Self { d, r, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("d", self.d)?;
        positive("r", self.r)?;
        positive("k", self.k)
    }
}

/// `u_t = d u_xx + u (1 - u)(1 + nu u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicParams {
    pub d: f64,
    pub nu: f64,
}

impl CubicParams {
    pub fn new(d: f64, nu: f64) -> Result<Self, ModelError> {
        let p = Self { d, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("d", self.d)?;
        if self.nu > -1.0 && self.nu.is_finite() {
            Ok(())
        } else {
            Err(ModelError::CubicCoefficient(self.nu))
        }
    }
}

pub fn coop_reaction(p: &CoopParams, u1: f64, u2: f64) -> Result<(f64, f64), ModelError> {
    non_negative(&[u1, u2])?;
    Ok(p.rates(u1, u2))
}

pub fn fisher_reaction(p: &FisherParams, z: f64) -> Result<f64, ModelError> {
    non_negative(&[z])?;
    Ok(p.r * z * (1.0 - z / p.k))
}

pub fn cubic_reaction(p: &CubicParams, u: f64) -> Result<f64, ModelError> {
    non_negative(&[u])?;
    Ok(u * (1.0 - u) * (1.0 + p.nu * u))
}

/// Linearization of the cooperative kinetics at `(u1, u2)`.
pub fn jacobian_at(p: &CoopParams, u1: f64, u2: f64) -> [[f64; 2]; 2] {
    [
        [p.r1 * (1.0 - 2.0 * u1 + p.b1 * u2), p.r1 * p.b1 * u1],
        [p.r2 * p.b2 * u2, p.r2 * (1.0 - 2.0 * u2 + p.b2 * u1)],
    ]
}

/// Real parts of the two eigenvalues of a 2x2 matrix, ascending.
pub fn eigen_real_parts(m: &[[f64; 2]; 2]) -> [f64; 2] {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_tr * half_tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [half_tr - s, half_tr + s]
    } else {
        [half_tr, half_tr]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

pub fn classify_stability(m: &[[f64; 2]; 2]) -> Stability {
    let re = eigen_real_parts(m);
    if re[1] > STABILITY_TOL {
        Stability::Unstable
    } else if re[1] < -STABILITY_TOL {
        Stability::Stable
    } else {
        Stability::Marginal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: (f64, f64),
    pub stability: Stability,
}

/// Spatially homogeneous steady states in the order `(0,0)`, `(1,0)`,
/// `(0,1)`, `(k1,k2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub points: Vec<Equilibrium>,
}

impl EquilibriumSet {
    pub fn coexistence(&self) -> (f64, f64) {
        self.points[3].point
    }
}

pub fn coop_equilibria(p: &CoopParams) -> EquilibriumSet {
    let (k1, k2) = p.coexistence();
    let points = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (k1, k2)]
        .into_iter()
        .map(|(a, b)| Equilibrium {
            point: (a, b),
            stability: classify_stability(&jacobian_at(p, a, b)),
        })
        .collect();
    EquilibriumSet { points }
}

/// Per-species upper bounds that the solution never leaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionBox {
    pub e1: f64,
    pub e2: f64,
}

/// Constant upper solution built from the suprema of the initial data.
pub fn solution_box(p: &CoopParams, sup1: f64, sup2: f64) -> Result<SolutionBox, ModelError> {
    positive("sup1", sup1)?;
    positive("sup2", sup2)?;
    let (k1, k2) = p.coexistence();
    Ok(SolutionBox {
        e1: sup1.max(k1).max(k1 / k2 * sup2),
        e2: sup2.max(k2).max(k2 / k1 * sup1),
    })
}

/// A reaction model selected at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Coop(CoopParams),
    Fisher(FisherParams),
    Cubic(CubicParams),
}

impl Model {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            Model::Coop(p) => p.validate(),
            Model::Fisher(p) => p.validate(),
            Model::Cubic(p) => p.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Coop(_) => "coop",
            Model::Fisher(_) => "fisher",
            Model::Cubic(_) => "cubic",
        }
    }

    pub fn species(&self) -> usize {
        match self {
            Model::Coop(_) => 2,
            Model::Fisher(_) | Model::Cubic(_) => 1,
        }
    }

    pub fn diffusion(&self) -> Vec<f64> {
        match self {
            Model::Coop(p) => vec![p.d1, p.d2],
            Model::Fisher(p) => vec![p.d],
            Model::Cubic(p) => vec![p.d],
        }
    }

    pub fn max_diffusion(&self) -> f64 {
        self.diffusion().into_iter().fold(0.0, f64::max)
    }

    /// The stable state that invading fronts connect to.
    pub fn target(&self) -> Vec<f64> {
        match self {
            Model::Coop(p) => {
                let (k1, k2) = p.coexistence();
                vec![k1, k2]
            }
            Model::Fisher(p) => vec![p.k],
            Model::Cubic(_) => vec![1.0],
        }
    }

    /// Invariant upper bounds per species given the suprema of the data.
    pub fn upper_box(&self, sups: &[f64]) -> Result<Vec<f64>, ModelError> {
        match self {
            Model::Coop(p) => {
                let b = solution_box(p, sups[0], sups[1])?;
                Ok(vec![b.e1, b.e2])
            }
            Model::Fisher(p) => Ok(vec![sups[0].max(p.k)]),
            Model::Cubic(_) => Ok(vec![sups[0].max(1.0)]),
        }
    }

    /// Evaluates the kinetics at one node. No sign checks.
    #[inline]
    pub fn react(&self, u: &[f64], out: &mut [f64]) {
        match self {
            Model::Coop(p) => {
                let (a, b) = p.rates(u[0], u[1]);
                out[0] = a;
                out[1] = b;
            }
            Model::Fisher(p) => out[0] = p.r * u[0] * (1.0 - u[0] / p.k),
            Model::Cubic(p) => out[0] = u[0] * (1.0 - u[0]) * (1.0 + p.nu * u[0]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coop(r1: f64, r2: f64, b1: f64, b2: f64) -> CoopParams {
        CoopParams::new(1.0, 1.0, r1, r2, b1, b2).unwrap()
    }

    #[test]
    fn coop_reaction_examples() {
        let p = coop(1.0, 1.0, 0.5, 0.5);
        assert_eq!(coop_reaction(&p, 0.0, 0.0).unwrap(), (0.0, 0.0));
        let (k1, k2) = p.coexistence();
        assert_eq!((k1, k2), (2.0, 2.0));
        assert_eq!(coop_reaction(&p, k1, k2).unwrap(), (0.0, 0.0));
        assert_eq!(coop_reaction(&p, 1.0, 1.0).unwrap(), (0.5, 0.5));
        assert!(matches!(
            coop_reaction(&p, -0.1, 1.0),
            Err(ModelError::NegativeDensity(_))
        ));
    }

    #[test]
    fn scalar_reaction_examples() {
        let f = FisherParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(fisher_reaction(&f, 0.0).unwrap(), 0.0);
        assert_eq!(fisher_reaction(&f, 1.0).unwrap(), 0.0);
        let f = FisherParams::new(1.0, 2.0, 4.0).unwrap();
        assert_eq!(fisher_reaction(&f, 2.0).unwrap(), 2.0);
        assert!(fisher_reaction(&f, -1.0).is_err());

        let c = CubicParams::new(1.0, 4.0).unwrap();
        assert_eq!(cubic_reaction(&c, 0.0).unwrap(), 0.0);
        assert_eq!(cubic_reaction(&c, 1.0).unwrap(), 0.0);
        assert_eq!(cubic_reaction(&c, 0.5).unwrap(), 0.75);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            CoopParams::new(1.0, 1.0, 1.0, 1.0, 1.2, 1.0),
            Err(ModelError::CooperationTooStrong { .. })
        ));
        assert!(matches!(
            CoopParams::new(0.0, 1.0, 1.0, 1.0, 0.1, 0.1),
            Err(ModelError::NonPositive { name: "d1", .. })
        ));
        assert!(FisherParams::new(1.0, -1.0, 1.0).is_err());
        assert!(CubicParams::new(1.0, -1.0).is_err());
        assert!(CubicParams::new(1.0, -0.99).is_ok());
    }

    #[test]
    fn equilibria_closed_form() {
        let k = coop_equilibria(&coop(1.0, 1.0, 0.0, 0.0)).coexistence();
        assert_eq!(k, (1.0, 1.0));
        let k = coop_equilibria(&coop(1.0, 1.0, 0.5, 0.5)).coexistence();
        assert_eq!(k, (2.0, 2.0));
        let (k1, k2) = coop_equilibria(&coop(1.0, 1.0, 0.2, 0.5)).coexistence();
        assert!((k1 - 4.0 / 3.0).abs() < 1e-15);
        assert!((k2 - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_stability_tags() {
        let eq = coop_equilibria(&coop(1.0, 0.8, 0.2, 0.5));
        let tags: Vec<_> = eq.points.iter().map(|e| e.stability).collect();
        assert_eq!(
            tags,
            vec![Stability::Unstable, Stability::Unstable, Stability::Unstable, Stability::Stable]
        );
        assert_eq!(classify_stability(&[[0.0, 0.0], [0.0, -1.0]]), Stability::Marginal);
    }

    #[test]
    fn jacobian_examples() {
        let p = CoopParams::new(1.0, 1.0, 1.0, 3.0, 0.5, 0.5).unwrap();
        let j = jacobian_at(&p, 0.0, 0.0);
        assert_eq!(j, [[1.0, 0.0], [0.0, 3.0]]);
        let p = coop(1.0, 1.0, 0.5, 0.5);
        assert_eq!(jacobian_at(&p, 2.0, 2.0), [[-2.0, 1.0], [1.0, -2.0]]);
    }

    #[test]
    fn jacobian_matches_central_difference_at_unit_point() {
        let p = CoopParams::new(1.3, 0.7, 1.1, 0.9, 0.3, 0.6).unwrap();
        let h = 1e-6;
        let j = jacobian_at(&p, 1.0, 1.0);
        let f = |a: f64, b: f64| p.rates(a, b);
        let d_u1 = (f(1.0 + h, 1.0).0 - f(1.0 - h, 1.0).0) / (2.0 * h);
        let d_u2 = (f(1.0, 1.0 + h).0 - f(1.0, 1.0 - h).0) / (2.0 * h);
        let e_u1 = (f(1.0 + h, 1.0).1 - f(1.0 - h, 1.0).1) / (2.0 * h);
        let e_u2 = (f(1.0, 1.0 + h).1 - f(1.0, 1.0 - h).1) / (2.0 * h);
        for (exact, fd) in [(j[0][0], d_u1), (j[0][1], d_u2), (j[1][0], e_u1), (j[1][1], e_u2)] {
            assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn solution_box_examples() {
        let p = coop(1.0, 1.0, 0.5, 0.5);
        assert_eq!(solution_box(&p, 0.5, 0.5).unwrap(), SolutionBox { e1: 2.0, e2: 2.0 });
        assert_eq!(solution_box(&p, 10.0, 0.5).unwrap(), SolutionBox { e1: 10.0, e2: 10.0 });
        let p = coop(1.0, 1.0, 0.0, 0.0);
        assert_eq!(solution_box(&p, 1.0, 1.0).unwrap(), SolutionBox { e1: 1.0, e2: 1.0 });
        assert!(solution_box(&p, 0.0, 1.0).is_err());
    }

    #[test]
    fn box_is_an_upper_solution() {
        let p = coop(1.0, 0.8, 0.2, 0.5);
        for sups in [(0.5, 0.5), (3.0, 0.1), (0.2, 7.0)] {
            let b = solution_box(&p, sups.0, sups.1).unwrap();
            let (f1, f2) = p.rates(b.e1, b.e2);
            assert!(f1 <= 1e-12 && f2 <= 1e-12);
        }
    }
}
