use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use super::problems::DiscreteSystem;
use crate::error::{Error, Result};
use crate::linops::StateVector;
use crate::math::{abs, ceil, cos, sin, sqrt};

/// What the numerical solution is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reference {
    /// Exact solution of the spatially discrete system `U'' + A U = F(t)`.
    #[default]
    SemiDiscrete,
    /// The continuous solution sampled at the grid points; includes the spatial error.
    Sampled,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Reference::SemiDiscrete => "semi-discrete",
            Reference::Sampled => "sampled",
        }
    }
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "semi-discrete" | "semidiscrete" | "discrete" => Ok(Reference::SemiDiscrete),
            "sampled" | "pde" => Ok(Reference::Sampled),
            _ => Err(Error::Empty(
                "unknown reference (expected semi-discrete or sampled)",
            )),
        }
    }
}

/// Ten-point Gauss–Legendre rule on `[-1, 1]`, by Newton iteration on `P_10`.
fn gauss_legendre_10() -> ([f64; 10], [f64; 10]) {
    const N: usize = 10;
    let mut x = [0.0; N];
    let mut w = [0.0; N];
    for i in 0..N {
        let mut z = cos(core::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for n in 2..=N {
                let p2 = ((2 * n - 1) as f64 * z * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = N as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if abs(dz) < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

const PANEL: f64 = 1e-3;

/// One eigenmode `s_j` present in the profile, with its Duhamel integrals
/// `C = int_0^t cos(w s) a(s) ds`, `S = int_0^t sin(w s) a(s) ds`.
#[derive(Clone, Debug)]
struct Mode {
    index: usize,
    coeff: f64,
    omega: f64,
    /// `c kappa^2 - lambda_j`
    delta: f64,
    cos_int: f64,
    sin_int: f64,
}

/// Reference states at increasing times.
///
/// For [`Reference::SemiDiscrete`] the exact discrete solution is
/// `U = phi_h a(t) + sum_j c_j d_j(t) s_j` where `phi_h = sum_j c_j s_j` is the
/// sampled profile and `d_j'' + lambda_j d_j = (c kappa^2 - lambda_j) a`,
/// `d_j(0) = d_j'(0) = 0`. The Duhamel integrals are accumulated panel by panel,
/// so querying times in increasing order costs work proportional to the span.
#[derive(Clone, Debug)]
pub struct ReferenceSolution<'s> {
    sys: &'s DiscreteSystem,
    kind: Reference,
    modes: Vec<Mode>,
    profile: Vec<f64>,
    t_done: f64,
    rule: ([f64; 10], [f64; 10]),
}

impl<'s> ReferenceSolution<'s> {
    pub fn new(sys: &'s DiscreteSystem, kind: Reference) -> Result<Self> {
        let profile = sys.profile_grid();
        let mut modes = Vec::new();
        if kind == Reference::SemiDiscrete {
            let eig = sys.op.eigen().ok_or(Error::MissingEigenstructure)?;
            let coeffs = eig.to_modal(&profile);
            let largest = coeffs.iter().fold(0.0f64, |m, c| m.max(abs(*c)));
            let target = sys.spec.spatial_eigenvalue();
            for (j, (&c, &lambda)) in coeffs.iter().zip(eig.values()).enumerate() {
                if abs(c) > 1e-12 * largest {
                    modes.push(Mode {
                        index: j,
                        coeff: c,
                        omega: sqrt(lambda),
                        delta: target - lambda,
                        cos_int: 0.0,
                        sin_int: 0.0,
                    });
                }
            }
        }
        Ok(Self {
            sys,
            kind,
            modes,
            profile,
            t_done: 0.0,
            rule: gauss_legendre_10(),
        })
    }

    pub fn kind(&self) -> Reference {
        self.kind
    }

    /// Number of eigenmodes carried by the correction term.
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn advance(&mut self, t: f64) {
        if t < self.t_done {
            for m in &mut self.modes {
                m.cos_int = 0.0;
                m.sin_int = 0.0;
            }
            self.t_done = 0.0;
        }
        let span = t - self.t_done;
        if span <= 0.0 {
            return;
        }
        let panels = ceil(span / PANEL).max(1.0) as usize;
        let h = span / panels as f64;
        let (nodes, weights) = &self.rule;
        for p in 0..panels {
            let a = self.t_done + p as f64 * h;
            let mid = a + 0.5 * h;
            for (x, w) in nodes.iter().zip(weights) {
                let s = mid + 0.5 * h * x;
                let amp = self.sys.spec.amplitude(s).0 * 0.5 * h * w;
                for m in &mut self.modes {
                    m.cos_int += cos(m.omega * s) * amp;
                    m.sin_int += sin(m.omega * s) * amp;
                }
            }
        }
        self.t_done = t;
    }

    /// The reference state at `t >= 0`.
    pub fn state_at(&mut self, t: f64) -> Result<StateVector> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument {
                name: "t",
                value: t,
            });
        }
        if self.kind == Reference::Sampled {
            return Ok(self.sys.sampled_state(t));
        }
        self.advance(t);
        let (a, a1, _) = self.sys.spec.amplitude(t);
        let mut u: Vec<f64> = self.profile.iter().map(|p| p * a).collect();
        let mut v: Vec<f64> = self.profile.iter().map(|p| p * a1).collect();
        let eig = self.sys.op.eigen().ok_or(Error::MissingEigenstructure)?;
        let mut du = vec![0.0; u.len()];
        let mut dv = vec![0.0; u.len()];
        for m in &self.modes {
            let (s, c) = (sin(m.omega * t), cos(m.omega * t));
            du[m.index] = m.coeff * m.delta / m.omega * (s * m.cos_int - c * m.sin_int);
            dv[m.index] = m.coeff * m.delta * (c * m.cos_int + s * m.sin_int);
        }
        if !self.modes.is_empty() {
            for (x, y) in u.iter_mut().zip(eig.from_modal(&du)) {
                *x += y;
            }
            for (x, y) in v.iter_mut().zip(eig.from_modal(&dv)) {
                *x += y;
            }
        }
        Ok(StateVector { u, v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{build_problem, ProblemId};

    #[test]
    fn gauss_rule_integrates_degree_19() {
        let (x, w) = gauss_legendre_10();
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((q - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn initial_state_matches_sampled_data() {
        let (_, sys) = build_problem(ProblemId::Ex3, 20).unwrap();
        let mut r = ReferenceSolution::new(&sys, Reference::SemiDiscrete).unwrap();
        assert_eq!(r.mode_count(), 1);
        let z = r.state_at(0.0).unwrap();
        assert!((&z - &sys.initial_state()).max_abs() < 1e-15);
    }

    #[test]
    fn backwards_query_restarts() {
        let (_, sys) = build_problem(ProblemId::Ex1, 9).unwrap();
        let mut r = ReferenceSolution::new(&sys, Reference::SemiDiscrete).unwrap();
        let early = r.state_at(0.3).unwrap();
        let _ = r.state_at(0.9).unwrap();
        let again = r.state_at(0.3).unwrap();
        assert!((&early - &again).max_abs() < 1e-14);
        assert!(r.state_at(-1.0).is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!("sampled".parse::<Reference>().unwrap(), Reference::Sampled);
        assert_eq!(
            "semi-discrete".parse::<Reference>().unwrap(),
            Reference::SemiDiscrete
        );
        assert!("x".parse::<Reference>().is_err());
    }
}
