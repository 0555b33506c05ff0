//! Physical coefficients of the two strings and the coupled system
//! configuration.
//!
//! The left string occupies `[-1, 0]`, the right one `[0, 1]`. Each side
//! carries a density `rho`, a tension `sigma` and a nonnegative potential `q`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, CubicSpline};

/// Number of points of the fixed positivity-validation grid.
pub const VALIDATION_POINTS: usize = 10_000;

const OPTICAL_RTOL: f64 = 1e-10;
const OPTICAL_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Endpoints of the side interval, in increasing order.
    pub fn interval(self) -> (f64, f64) {
        match self {
            Side::Left => (-1.0, 0.0),
            Side::Right => (0.0, 1.0),
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Which physical coefficient a profile describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    Rho,
    Sigma,
    Q,
}

impl Coefficient {
    fn name(self) -> &'static str {
        match self {
            Coefficient::Rho => "rho",
            Coefficient::Sigma => "sigma",
            Coefficient::Q => "q",
        }
    }
}

/// Serialized description of one coefficient, as found in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSpec {
    Constant { value: f64 },
    /// Ascending-degree coefficients in the spatial variable `x`.
    Poly { coeffs: Vec<f64> },
    Samples { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
enum ProfileKind {
    Constant(f64),
    Polynomial(Vec<f64>),
    Sampled(CubicSpline),
}

/// One coefficient on one side, evaluable together with its first spatial
/// derivative anywhere on the side interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    side: Side,
    kind: ProfileKind,
}

impl CoefficientProfile {
    /// Builds and validates a profile. `rho` and `sigma` must be positive on
    /// the validation grid, `q` nonnegative.
    pub fn build(side: Side, role: Coefficient, spec: &ProfileSpec) -> Result<Self> {
        let kind = match spec {
            ProfileSpec::Constant { value } => ProfileKind::Constant(*value),
            ProfileSpec::Poly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidConfig("empty polynomial coefficient list".into()));
                }
                ProfileKind::Polynomial(coeffs.clone())
            }
            ProfileSpec::Samples { x, y } => {
                let (a, b) = side.interval();
                let slack = 1e-12;
                if x.len() < 2 || x[0] > a + slack || x[x.len() - 1] < b - slack {
                    return Err(Error::DomainMismatch {
                        side,
                        detail: format!(
                            "need >= 2 samples spanning [{a}, {b}], got {} samples over [{}, {}]",
                            x.len(),
                            x.first().copied().unwrap_or(f64::NAN),
                            x.last().copied().unwrap_or(f64::NAN)
                        ),
                    });
                }
                ProfileKind::Sampled(CubicSpline::new(x.clone(), y.clone())?)
            }
        };
        let profile = Self { side, kind };
        profile.validate(role)?;
        Ok(profile)
    }

    pub fn constant(side: Side, value: f64) -> Self {
        Self { side, kind: ProfileKind::Constant(value) }
    }

    pub fn polynomial(side: Side, coeffs: Vec<f64>) -> Self {
        Self { side, kind: ProfileKind::Polynomial(coeffs) }
    }

    fn validate(&self, role: Coefficient) -> Result<()> {
        let min = self.grid_min();
        if !min.is_finite() {
            return Err(Error::InvalidConfig(format!("{} is not finite", role.name())));
        }
        match role {
            Coefficient::Rho | Coefficient::Sigma if min <= 0.0 => {
                Err(Error::NonPositiveCoefficient { what: format!("{}({:?})", role.name(), self.side), min })
            }
            Coefficient::Q if min < 0.0 => {
                Err(Error::NegativePotential { what: format!("q({:?})", self.side), min })
            }
            _ => Ok(()),
        }
    }

    /// Minimum over the fixed validation grid.
    pub fn grid_min(&self) -> f64 {
        let (a, b) = self.side.interval();
        let h = (b - a) / (VALIDATION_POINTS - 1) as f64;
        (0..VALIDATION_POINTS)
            .map(|i| self.value(a + i as f64 * h))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant(c) => *c,
            ProfileKind::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            ProfileKind::Sampled(s) => s.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant(_) => 0.0,
            ProfileKind::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck),
            ProfileKind::Sampled(s) => s.derivative(x),
        }
    }

    /// The profile seen through `s = -x`, moved to the opposite side.
    pub fn reflected(&self) -> Self {
        let kind = match &self.kind {
            ProfileKind::Constant(c) => ProfileKind::Constant(*c),
            ProfileKind::Polynomial(c) => ProfileKind::Polynomial(
                c.iter()
                    .enumerate()
                    .map(|(k, &ck)| if k % 2 == 1 { -ck } else { ck })
                    .collect(),
            ),
            ProfileKind::Sampled(s) => {
                let x: Vec<f64> = s.knots().iter().rev().map(|v| -v).collect();
                let y: Vec<f64> = s.values().iter().rev().copied().collect();
                ProfileKind::Sampled(CubicSpline::new(x, y).expect("reflected knots stay increasing"))
            }
        };
        Self { side: self.side.opposite(), kind }
    }

    /// Dense samples on `points` uniform abscissae of the side interval.
    pub fn dense_samples(&self, points: usize) -> ProfileSpec {
        let (a, b) = self.side.interval();
        let h = (b - a) / (points - 1) as f64;
        let x: Vec<f64> = (0..points).map(|i| if i + 1 == points { b } else { a + i as f64 * h }).collect();
        let y = x.iter().map(|&t| self.value(t)).collect();
        ProfileSpec::Samples { x, y }
    }
}

/// `∫ sqrt(rho/sigma) dx` over the common side interval.
pub fn optical_length(rho: &CoefficientProfile, sigma: &CoefficientProfile) -> Result<f64> {
    if rho.side() != sigma.side() {
        return Err(Error::InvalidConfig("rho and sigma live on different sides".into()));
    }
    let (a, b) = rho.side().interval();
    adaptive_simpson(|x| (rho.value(x) / sigma.value(x)).sqrt(), a, b, OPTICAL_RTOL, OPTICAL_BUDGET)
}

/// The three coefficients of one string.
#[derive(Debug, Clone, PartialEq)]
pub struct SideCoefficients {
    pub rho: CoefficientProfile,
    pub sigma: CoefficientProfile,
    pub q: CoefficientProfile,
}

impl SideCoefficients {
    pub fn side(&self) -> Side {
        self.rho.side()
    }

    pub fn uniform(side: Side, rho: f64, sigma: f64, q: f64) -> Self {
        Self {
            rho: CoefficientProfile::constant(side, rho),
            sigma: CoefficientProfile::constant(side, sigma),
            q: CoefficientProfile::constant(side, q),
        }
    }

    fn reflected(&self) -> Self {
        Self { rho: self.rho.reflected(), sigma: self.sigma.reflected(), q: self.q.reflected() }
    }
}

/// Complete description of the string-mass-string system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    left: SideCoefficients,
    right: SideCoefficients,
    mass: f64,
    gamma1: f64,
    gamma2: f64,
}

impl SystemConfig {
    pub fn new(left: SideCoefficients, right: SideCoefficients, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidConfig(format!("mass must be positive, got {mass}")));
        }
        Self::with_mass_unchecked(left, right, mass)
    }

    /// Same as [`SystemConfig::new`] but admits `mass = 0` (the regular
    /// problem without the point mass).
    pub fn with_mass_unchecked(left: SideCoefficients, right: SideCoefficients, mass: f64) -> Result<Self> {
        if left.side() != Side::Left || right.side() != Side::Right {
            return Err(Error::InvalidConfig("side coefficient sets are swapped".into()));
        }
        for (set, _) in [(&left, Side::Left), (&right, Side::Right)] {
            set.rho.validate(Coefficient::Rho)?;
            set.sigma.validate(Coefficient::Sigma)?;
            set.q.validate(Coefficient::Q)?;
        }
        let gamma1 = optical_length(&left.rho, &left.sigma)?;
        let gamma2 = optical_length(&right.rho, &right.sigma)?;
        Ok(Self { left, right, mass, gamma1, gamma2 })
    }

    /// Constant coefficients `rho = sigma = 1`, `q = 0` on both sides.
    pub fn unit(mass: f64) -> Self {
        Self::new(
            SideCoefficients::uniform(Side::Left, 1.0, 1.0, 0.0),
            SideCoefficients::uniform(Side::Right, 1.0, 1.0, 0.0),
            mass,
        )
        .expect("unit configuration is admissible")
    }

    pub fn from_file_spec(file: &ConfigFile) -> Result<Self> {
        let side = |s: Side, spec: &SideSpec| -> Result<SideCoefficients> {
            Ok(SideCoefficients {
                rho: CoefficientProfile::build(s, Coefficient::Rho, &spec.rho)?,
                sigma: CoefficientProfile::build(s, Coefficient::Sigma, &spec.sigma)?,
                q: CoefficientProfile::build(s, Coefficient::Q, &spec.q)?,
            })
        };
        Self::new(side(Side::Left, &file.left)?, side(Side::Right, &file.right)?, file.mass)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Self::from_file_spec(&file)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn side(&self, side: Side) -> &SideCoefficients {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn left(&self) -> &SideCoefficients {
        &self.left
    }

    pub fn right(&self) -> &SideCoefficients {
        &self.right
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn gamma(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.gamma1,
            Side::Right => self.gamma2,
        }
    }

    /// `2(γ₁+γ₂)`, the critical control time.
    pub fn critical_time(&self) -> f64 {
        2.0 * (self.gamma1 + self.gamma2)
    }

    /// Same coefficients with a different mass (zero allowed).
    pub fn with_mass(&self, mass: f64) -> Self {
        Self { mass, ..self.clone() }
    }

    /// Mirror image under `x -> -x`: the strings swap sides.
    pub fn reflected(&self) -> Self {
        Self {
            left: self.right.reflected(),
            right: self.left.reflected(),
            mass: self.mass,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
        }
    }

    /// WKB amplitude constants fixed by the seed slopes at the far ends:
    /// `a₁ = (ρ₁(-1)^{1/4} σ₁(-1)^{-3/4})^{-1}`, likewise `a₂` at `x = 1`.
    pub fn wkb_constants(&self) -> (f64, f64) {
        let a = |s: &SideCoefficients, x: f64| 1.0 / (s.rho.value(x).powf(0.25) * s.sigma.value(x).powf(-0.75));
        (a(&self.left, -1.0), a(&self.right, 1.0))
    }
}

/// On-disk configuration schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub mass: f64,
    pub left: SideSpec,
    pub right: SideSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSpec {
    pub rho: ProfileSpec,
    pub sigma: ProfileSpec,
    #[serde(default = "zero_potential")]
    pub q: ProfileSpec,
}

fn zero_potential() -> ProfileSpec {
    ProfileSpec::Constant { value: 0.0 }
}

/// The shipped default configuration: variable, non-symmetric coefficients
/// with `rho = sigma` on each side (so `γ₁ = γ₂ = 1`, which makes vanishing
/// spectral gaps recur) and a potential on the right string.
pub fn default_config_file() -> ConfigFile {
    ConfigFile {
        mass: 1.0,
        left: SideSpec {
            rho: ProfileSpec::Poly { coeffs: vec![1.5, 0.5] },
            sigma: ProfileSpec::Poly { coeffs: vec![1.5, 0.5] },
            q: ProfileSpec::Constant { value: 0.0 },
        },
        right: SideSpec {
            rho: ProfileSpec::Poly { coeffs: vec![1.0, 0.0, 0.5] },
            sigma: ProfileSpec::Poly { coeffs: vec![1.0, 0.0, 0.5] },
            q: ProfileSpec::Constant { value: 2.0 },
        },
    }
}

pub fn default_config() -> SystemConfig {
    SystemConfig::from_file_spec(&default_config_file()).expect("default configuration is admissible")
}
