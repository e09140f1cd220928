use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linops::{SpdOperator, StateVector};
use crate::math::{cos, exp, sin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::Ex1,
        ProblemId::Ex2,
        ProblemId::Ex3,
        ProblemId::Ex4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Ex1 => "ex1",
            ProblemId::Ex2 => "ex2",
            ProblemId::Ex3 => "ex3",
            ProblemId::Ex4 => "ex4",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ex1" | "1" => Ok(ProblemId::Ex1),
            "ex2" | "2" => Ok(ProblemId::Ex2),
            "ex3" | "3" => Ok(ProblemId::Ex3),
            "ex4" | "4" => Ok(ProblemId::Ex4),
            _ => Err(Error::Empty("unknown problem id (expected ex1..ex4)")),
        }
    }
}

/// A separable manufactured solution `u(x, t) = phi(x) a(t)` of
/// `u_tt = c u_xx + f` with homogeneous Dirichlet data, where `phi` is a
/// Dirichlet eigenfunction with `-phi'' = kappa^2 phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub x_lo: f64,
    pub x_hi: f64,
    /// Coefficient of `u_xx`.
    pub c: f64,
    pub final_time: f64,
    kappa: f64,
}

impl ProblemSpec {
    pub fn new(id: ProblemId) -> Self {
        match id {
            ProblemId::Ex1 => Self {
                id,
                x_lo: 0.0,
                x_hi: 1.0,
                c: 1.0,
                final_time: 1.0,
                kappa: PI,
            },
            ProblemId::Ex2 => Self {
                id,
                x_lo: -1.0,
                x_hi: 1.0,
                c: 1.0,
                final_time: 1.0,
                kappa: PI / 2.0,
            },
            ProblemId::Ex3 => Self {
                id,
                x_lo: 0.0,
                x_hi: 1.0,
                c: 2.0,
                final_time: 1.0,
                kappa: PI,
            },
            ProblemId::Ex4 => Self {
                id,
                x_lo: 0.0,
                x_hi: 1.0,
                c: 2.0,
                final_time: 10.0,
                kappa: PI,
            },
        }
    }

    /// Spatial shape `phi(x)`.
    pub fn profile(&self, x: f64) -> f64 {
        match self.id {
            ProblemId::Ex2 => cos(PI * x / 2.0),
            _ => sin(PI * x),
        }
    }

    /// `c kappa^2`, the eigenvalue of `-c d^2/dx^2` belonging to the profile.
    pub fn spatial_eigenvalue(&self) -> f64 {
        self.c * self.kappa * self.kappa
    }

    /// Temporal factor and its first two derivatives `(a, a', a'')`.
    pub fn amplitude(&self, t: f64) -> (f64, f64, f64) {
        match self.id {
            ProblemId::Ex1 => {
                let e = exp(t);
                (e, e, e)
            }
            ProblemId::Ex2 => {
                let e = exp(-10.0 * t);
                (e, -10.0 * e, 100.0 * e)
            }
            ProblemId::Ex3 => {
                let tau = t - 0.5;
                let h = exp(-1.0e4 * tau * tau);
                (
                    0.1 * (1.0 - h),
                    2.0e3 * tau * h,
                    (2.0e3 - 4.0e7 * tau * tau) * h,
                )
            }
            ProblemId::Ex4 => {
                let (s, c) = (sin(PI * t / 2.0), cos(PI * t / 2.0));
                let s1 = PI / 2.0 * c;
                let s2 = -PI * PI / 4.0 * s;
                let w = s - 1.0;
                let g = exp(-800.0 * w * w);
                let g1 = -1600.0 * w * s1 * g;
                let g2 = (-1600.0 * (s1 * s1 + w * s2) + (1600.0 * w * s1) * (1600.0 * w * s1)) * g;
                let (sn, cs) = (sin(4.0 * PI * t), cos(4.0 * PI * t));
                (
                    g * sn,
                    g1 * sn + 4.0 * PI * g * cs,
                    g2 * sn + 8.0 * PI * g1 * cs - 16.0 * PI * PI * g * sn,
                )
            }
        }
    }

    /// Temporal factor of the forcing, `a'' + c kappa^2 a`.
    pub fn forcing_amplitude(&self, t: f64) -> f64 {
        let (a, _, a2) = self.amplitude(t);
        a2 + self.spatial_eigenvalue() * a
    }

    pub fn exact_u(&self, x: f64, t: f64) -> f64 {
        self.profile(x) * self.amplitude(t).0
    }

    pub fn exact_ut(&self, x: f64, t: f64) -> f64 {
        self.profile(x) * self.amplitude(t).1
    }

    /// `f = u_tt - c u_xx`.
    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        match self.id {
            ProblemId::Ex1 => (1.0 + PI * PI) * sin(PI * x) * exp(t),
            ProblemId::Ex2 => (100.0 + PI * PI / 4.0) * cos(PI * x / 2.0) * exp(-10.0 * t),
            ProblemId::Ex3 | ProblemId::Ex4 => self.profile(x) * self.forcing_amplitude(t),
        }
    }

    /// Default `theta`: the value giving the constant 5 for Example 1, `1/4` otherwise.
    pub fn default_theta(&self) -> f64 {
        match self.id {
            ProblemId::Ex1 => (5.0 - crate::math::sqrt(21.0)) / 20.0,
            _ => 0.25,
        }
    }

    /// Interior grid size of the original experiments
    /// (`dx = 1/2500, 1/800, 1/500, 1/500`).
    pub fn reference_mesh(&self) -> usize {
        match self.id {
            ProblemId::Ex1 => 2499,
            ProblemId::Ex2 => 1599,
            ProblemId::Ex3 | ProblemId::Ex4 => 499,
        }
    }
}

/// The spatially discretized system `U'' + A U = F(t)` on the interior grid.
#[derive(Clone, Debug)]
pub struct DiscreteSystem {
    pub spec: ProblemSpec,
    pub dx: f64,
    pub grid: Vec<f64>,
    /// `c/dx^2 tridiag(-1, 2, -1)` with the `dx`-weighted inner product.
    pub op: SpdOperator,
}

impl DiscreteSystem {
    pub fn new(spec: ProblemSpec, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("grid size m must be at least 1"));
        }
        let dx = (spec.x_hi - spec.x_lo) / (m as f64 + 1.0);
        let grid = (1..=m).map(|i| spec.x_lo + i as f64 * dx).collect();
        let op = SpdOperator::dirichlet_laplacian(m, spec.c, dx)?.with_inner_weight(dx)?;
        Ok(Self { spec, dx, grid, op })
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn forcing_grid(&self, t: f64) -> Vec<f64> {
        self.grid.iter().map(|&x| self.spec.forcing(x, t)).collect()
    }

    /// The manufactured solution sampled on the grid.
    pub fn sampled_state(&self, t: f64) -> StateVector {
        StateVector {
            u: self.grid.iter().map(|&x| self.spec.exact_u(x, t)).collect(),
            v: self
                .grid
                .iter()
                .map(|&x| self.spec.exact_ut(x, t))
                .collect(),
        }
    }

    pub fn initial_state(&self) -> StateVector {
        self.sampled_state(0.0)
    }

    pub fn profile_grid(&self) -> Vec<f64> {
        self.grid.iter().map(|&x| self.spec.profile(x)).collect()
    }
}

pub fn build_problem(id: ProblemId, m: usize) -> Result<(ProblemSpec, DiscreteSystem)> {
    let spec = ProblemSpec::new(id);
    let sys = DiscreteSystem::new(spec.clone(), m)?;
    Ok((spec, sys))
}
