//! Benchmark problems: manufactured solutions on the L-shape and the slit
//! domain, and the square well device with trapezoidal boundary data.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fespace::{ExactSolution, VectorFn};
use crate::mesh::{DomainShape, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Lshape,
    Slit,
    Device,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Lshape => "lshape",
            ProblemKind::Slit => "slit",
            ProblemKind::Device => "device",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lshape" | "l-shape" => Ok(ProblemKind::Lshape),
            "slit" => Ok(ProblemKind::Slit),
            "device" => Ok(ProblemKind::Device),
            other => Err(Error::Config(format!("unknown problem {other:?}"))),
        }
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub shape: DomainShape,
    pub epsilon: f64,
    pub g: VectorFn,
    pub f: Option<VectorFn>,
    pub exact: Option<ExactSolution>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kind", &self.kind)
            .field("shape", &self.shape)
            .field("epsilon", &self.epsilon)
            .field("has_source", &self.f.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn boundary(&self) -> &dyn Fn(Point) -> [f64; 2] {
        &*self.g
    }

    pub fn source(&self) -> Option<&dyn Fn(Point) -> [f64; 2]> {
        self.f.as_deref().map(|f| f as &dyn Fn(Point) -> [f64; 2])
    }
}

pub fn problem(kind: ProblemKind, epsilon: f64) -> Result<ProblemSpec> {
    match kind {
        ProblemKind::Lshape => lshape_problem(epsilon),
        ProblemKind::Slit => slit_problem(epsilon),
        ProblemKind::Device => device_problem(epsilon),
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")))
    }
}

/// Polar coordinates about the origin with the angle in `[0, 2 pi)`.
pub fn polar(p: Point) -> (f64, f64) {
    let r = p[0].hypot(p[1]);
    let mut theta = p[1].atan2(p[0]);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    (r, theta)
}

/// `r^a sin(a theta)` and its Cartesian gradient.
fn singular_mode(a: f64, r: f64, theta: f64) -> (f64, [f64; 2]) {
    if r == 0.0 {
        return (0.0, [f64::INFINITY, f64::INFINITY]);
    }
    let value = r.powf(a) * (a * theta).sin();
    let s = a * r.powf(a - 1.0);
    (value, [s * ((a - 1.0) * theta).sin(), s * ((a - 1.0) * theta).cos()])
}

/// `-2 eps^-2 (1 - |psi|^2) psi`.
fn nonlinear_part(psi: [f64; 2], epsilon: f64) -> [f64; 2] {
    let k = -2.0 / (epsilon * epsilon) * (1.0 - psi[0] * psi[0] - psi[1] * psi[1]);
    [k * psi[0], k * psi[1]]
}

fn lshape_value(p: Point) -> [f64; 2] {
    let (r, t) = polar(p);
    [singular_mode(2.0 / 3.0, r, t).0, singular_mode(0.5, r, t).0]
}

fn slit_value(p: Point) -> [f64; 2] {
    let (r, t) = polar(p);
    let w = singular_mode(0.5, r, t).0 - 0.5 * p[1] * p[1];
    [w, w]
}

/// `u = r^(2/3) sin(2 theta / 3)`, `v = r^(1/2) sin(theta / 2)` about the
/// re-entrant corner; both components are harmonic.
pub fn lshape_problem(epsilon: f64) -> Result<ProblemSpec> {
    check_epsilon(epsilon)?;
    let exact = ExactSolution {
        value: Arc::new(lshape_value),
        gradient: Arc::new(|p| {
            let (r, t) = polar(p);
            [singular_mode(2.0 / 3.0, r, t).1, singular_mode(0.5, r, t).1]
        }),
    };
    Ok(ProblemSpec {
        kind: ProblemKind::Lshape,
        shape: DomainShape::LShape,
        epsilon,
        g: Arc::new(lshape_value),
        f: Some(Arc::new(move |p| nonlinear_part(lshape_value(p), epsilon))),
        exact: Some(exact),
    })
}

/// `u = v = r^(1/2) sin(theta / 2) - y^2 / 2` about the slit tip, so
/// `-Laplace(u) = 1`.
pub fn slit_problem(epsilon: f64) -> Result<ProblemSpec> {
    check_epsilon(epsilon)?;
    let exact = ExactSolution {
        value: Arc::new(slit_value),
        gradient: Arc::new(|p| {
            let (r, t) = polar(p);
            let g = singular_mode(0.5, r, t).1;
            let g = [g[0], g[1] - p[1]];
            [g, g]
        }),
    };
    Ok(ProblemSpec {
        kind: ProblemKind::Slit,
        shape: DomainShape::SlitSquare,
        epsilon,
        g: Arc::new(slit_value),
        f: Some(Arc::new(move |p| {
            let n = nonlinear_part(slit_value(p), epsilon);
            [1.0 + n[0], 1.0 + n[1]]
        })),
        exact: Some(exact),
    })
}

/// Trapezoid on `[0, 1]`: ramps linearly over `[0, d]` and `[1 - d, 1]`,
/// equals one in between.
pub fn trapezoid(t: f64, d: f64) -> f64 {
    if t <= d {
        t / d
    } else if t >= 1.0 - d {
        (1.0 - t) / d
    } else {
        1.0
    }
}

/// Square well: `g = (T_d(x), 0)` on the horizontal sides and
/// `(-T_d(y), 0)` on the vertical sides with `d = 3 eps`; no source.
pub fn device_problem(epsilon: f64) -> Result<ProblemSpec> {
    check_epsilon(epsilon)?;
    let d = 3.0 * epsilon;
    if d >= 0.5 {
        return Err(Error::Parameter(format!("ramp width d = 3 eps = {d} must be below 1/2")));
    }
    Ok(ProblemSpec {
        kind: ProblemKind::Device,
        shape: DomainShape::UnitSquare,
        epsilon,
        g: Arc::new(move |p| device_boundary(p, d)),
        f: None,
        exact: None,
    })
}

/// Boundary data of the side nearest to `p`.
fn device_boundary(p: Point, d: f64) -> [f64; 2] {
    let [x, y] = p;
    let horizontal = y.min(1.0 - y);
    let vertical = x.min(1.0 - x);
    if horizontal <= vertical {
        [trapezoid(x, d), 0.0]
    } else {
        [-trapezoid(y, d), 0.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQ3_2: f64 = 0.866_025_403_784_438_6;
    const SQ2_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn lshape_point_values() {
        let p = lshape_problem(0.4).unwrap();
        let v = (p.exact.as_ref().unwrap().value)([0.0, 1.0]);
        assert!((v[0] - SQ3_2).abs() < 1e-15);
        assert!((v[1] - SQ2_2).abs() < 1e-15);
        // both vanish on the leg theta = 0; u also on theta = 3 pi / 2
        let on_leg = (p.g)([0.5, 0.0]);
        assert_eq!(on_leg, [0.0, 0.0]);
        let lower = (p.g)([0.0, -0.5]);
        assert!(lower[0].abs() < 1e-15);
    }

    #[test]
    fn slit_point_values_and_faces() {
        let p = slit_problem(0.6).unwrap();
        let v = (p.g)([-1.0, 0.0]);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert!((p.g)([0.5, 0.0])[0].abs() < 1e-15);
        let grad = p.exact.as_ref().unwrap().gradient.clone();
        let above = grad([0.5, 1e-12]);
        let below = grad([0.5, -1e-12]);
        assert!((above[0][1] - below[0][1]).abs() > 1.0);
    }

    #[test]
    fn trapezoid_values() {
        assert!((trapezoid(0.03, 0.06) - 0.5).abs() < 1e-15);
        assert_eq!(trapezoid(0.5, 0.06), 1.0);
        assert_eq!(trapezoid(0.0, 0.06), 0.0);
        assert!(trapezoid(1.0, 0.06).abs() < 1e-15);
    }

    #[test]
    fn device_boundary_values() {
        let p = device_problem(0.02).unwrap();
        assert_eq!((p.g)([0.0, 0.5]), [-1.0, 0.0]);
        assert_eq!((p.g)([0.5, 1.0]), [1.0, 0.0]);
        assert_eq!((p.g)([0.0, 0.0]), [0.0, 0.0]);
        assert!(p.f.is_none() && p.exact.is_none());
        assert!(matches!(device_problem(0.2), Err(Error::Parameter(_))));
        assert!(matches!(lshape_problem(0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn names_round_trip() {
        for k in [ProblemKind::Lshape, ProblemKind::Slit, ProblemKind::Device] {
            assert_eq!(k.as_str().parse::<ProblemKind>().unwrap(), k);
        }
        assert!("square".parse::<ProblemKind>().is_err());
    }
}
