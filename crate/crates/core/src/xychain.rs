//! Infinite XY chain `H = 1/2 sum_i (1+g) S^x_i S^x_{i+1} + (1-g) S^y_i S^y_{i+1}`
//! at zero field.
//!
//! Nearest-neighbour correlators come from the free-fermion solution. With
//! `L(k) = sqrt(cos^2 k + g^2 sin^2 k)` and
//!
//! ```text
//! G(+1) = (2/pi) int_0^{pi/2} (cos^2 k + g sin^2 k) / L(k) dk
//! G(-1) = (2/pi) int_0^{pi/2} (cos^2 k - g sin^2 k) / L(k) dk
//! ```
//!
//! the antiferromagnetic sign gives `<XX> = -G(+1)`, `<YY> = -G(-1)` and
//! `<ZZ> = -G(+1) G(-1)`. The two-site state of the symmetric ground state is
//! `(I + sum_mu <mu mu> sigma^mu sigma^mu) / 4`.

use rayon::prelude::*;

use crate::eigen::{ground_space, DensityMatrix, DEFAULT_DEGENERACY_TOL};
use crate::error::{validation, Error, Result};
use crate::metrics::epsilon_d;
use crate::model::{local_term, Bond, Pauli};
use crate::{csv_float, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Maximum bisection depth when the error estimate is above `abs_tol`.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, max_depth: 24 }
    }
}

/// Nearest-neighbour Pauli correlators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlators {
    pub sxx: f64,
    pub syy: f64,
    pub szz: f64,
    /// `<Z>`; zero without a field.
    pub sz: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(validation(format!("anisotropy {gamma} outside [0, 1]")));
    }
    Ok(())
}

fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let out = quadrature::integrate(f, a, b, tol);
    if out.error_estimate <= tol {
        return Ok(out.integral);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "quadrature on [{a}, {b}] stalled at error estimate {:e}",
            out.error_estimate
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(integrate(f, a, mid, 0.5 * tol, depth - 1)? + integrate(f, mid, b, 0.5 * tol, depth - 1)?)
}

/// `G(+1)` and `G(-1)` by adaptive quadrature.
fn g_pair(gamma: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let term = move |k: f64, sign: f64| {
        let (s, c) = k.sin_cos();
        let lambda = (c * c + gamma * gamma * s * s).sqrt();
        if lambda == 0.0 {
            0.0
        } else {
            (c * c + sign * gamma * s * s) / lambda
        }
    };
    // The scaled tolerance keeps the final correlators within abs_tol.
    let tol = 0.25 * cfg.abs_tol;
    let scale = 2.0 / std::f64::consts::PI;
    let plus = integrate(move |k| term(k, 1.0), 0.0, half_pi, tol, cfg.max_depth)?;
    let minus = integrate(move |k| term(k, -1.0), 0.0, half_pi, tol, cfg.max_depth)?;
    Ok((scale * plus, scale * minus))
}

pub fn correlators(gamma: f64, cfg: &QuadratureConfig) -> Result<Correlators> {
    check_gamma(gamma)?;
    let (gp, gm) = g_pair(gamma, cfg)?;
    Ok(Correlators { sxx: -gp, syy: -gm, szz: -gp * gm, sz: 0.0 })
}

/// The pair term of the chain as a [`Bond`] on sites `0, 1`.
pub fn pair_bond(gamma: f64) -> Bond {
    Bond::new(0, 1, [-(1.0 + gamma) / 2.0, -(1.0 - gamma) / 2.0, 0.0])
}

/// `(I + sum_mu t_mu sigma^mu sigma^mu) / 4`.
fn two_site_state(c: &Correlators) -> DensityMatrix {
    let mut m = CMatrix::identity(4, 4);
    for (p, t) in [(Pauli::X, c.sxx), (Pauli::Y, c.syy), (Pauli::Z, c.szz)] {
        let s = p.matrix();
        m += s.kronecker(&s) * C64::new(t, 0.0);
    }
    DensityMatrix::new_unchecked(m * C64::new(0.25, 0.0))
}

#[derive(Clone, Debug)]
pub struct XYPoint {
    pub gamma: f64,
    pub correlators: Correlators,
    pub rho2: DensityMatrix,
    pub f_s: f64,
    /// `eps_d` at `d = d_local`.
    pub epsilon: f64,
    pub d_local: usize,
}

impl XYPoint {
    pub const CSV_HEADER: &'static str = "gamma,sxx,syy,szz,f_S,epsilon,d_local";

    pub fn csv_row(&self) -> String {
        let c = &self.correlators;
        format!(
            "{},{},{},{},{},{},{}",
            csv_float(self.gamma),
            csv_float(c.sxx),
            csv_float(c.syy),
            csv_float(c.szz),
            csv_float(self.f_s),
            csv_float(self.epsilon),
            self.d_local
        )
    }
}

pub fn point(gamma: f64) -> Result<XYPoint> {
    point_with(gamma, &QuadratureConfig::default())
}

pub fn point_with(gamma: f64, cfg: &QuadratureConfig) -> Result<XYPoint> {
    let correlators = correlators(gamma, cfg)?;
    let rho2 = two_site_state(&correlators);
    let local = ground_space(&local_term(&pair_bond(gamma)), DEFAULT_DEGENERACY_TOL)?;
    let f_s = 1.0 - rho2.expectation(local.projector().matrix());
    let epsilon = epsilon_d(&rho2, local.degeneracy)?;
    Ok(XYPoint { gamma, correlators, rho2, f_s, epsilon, d_local: local.degeneracy })
}

/// Uniform grid of `steps` intervals from `from` to `to`, endpoints exact.
/// A degenerate range yields the single point `from`.
pub fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    check_gamma(from)?;
    check_gamma(to)?;
    if from > to {
        return Err(validation(format!("inverted range {from} > {to}")));
    }
    if steps == 0 {
        return Err(validation("a scan needs at least one step"));
    }
    if from == to {
        return Ok(vec![from]);
    }
    let h = (to - from) / steps as f64;
    Ok((0..=steps).map(|k| if k == steps { to } else { from + h * k as f64 }).collect())
}

pub fn scan(from: f64, to: f64, steps: usize) -> Result<Vec<XYPoint>> {
    grid(from, to, steps)?.into_par_iter().map(point).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn isotropic_limit() {
        // At g = 0 both integrands reduce to |cos k|.
        let c = correlators(0.0, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(c.sxx, -2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(c.syy, -2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(c.szz, -4.0 / (PI * PI), epsilon = 1e-12);
    }

    #[test]
    fn ising_limit() {
        let p = point(1.0).unwrap();
        assert_abs_diff_eq!(p.correlators.sxx, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.correlators.syy, 0.0, epsilon = 1e-12);
        assert_eq!(p.d_local, 2);
        assert!(p.f_s.abs() < 1e-10 && p.epsilon.abs() < 1e-10);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(grid(0.0, 1.0, 2).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(1.0, 1.0, 1).unwrap(), vec![1.0]);
        let g = grid(0.02, 0.98, 49).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(*g.last().unwrap(), 0.98);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(grid(0.6, 0.4, 3).is_err());
        assert!(grid(0.0, 1.5, 3).is_err());
        assert!(grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn two_site_state_is_valid() {
        for g in [0.0, 0.3, 0.7, 1.0] {
            let p = point(g).unwrap();
            let ev = p.rho2.eigenvalues();
            assert!(ev.iter().all(|&l| (-1e-10..=1.0 + 1e-10).contains(&l)), "{ev:?}");
            assert_abs_diff_eq!(p.rho2.matrix().trace().re, 1.0, epsilon = 1e-12);
            assert!(p.f_s >= p.epsilon - 1e-12);
        }
    }
}
