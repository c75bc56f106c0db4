//! Closed-form initial profiles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{Domain, GridFn};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Constant {
        value: f64,
    },
    /// `offset + amplitude · sin(2π · mode · x)`.
    Sine {
        amplitude: f64,
        offset: f64,
        mode: f64,
    },
    /// `(4/3) e^{-|x - center|/2}`.
    Peakon {
        center: f64,
    },
    /// `-β x e^{-x²/2}`.
    GaussianDerivative {
        beta: f64,
    },
    /// `height` on `[left, right]`, zero elsewhere.
    Step {
        height: f64,
        left: f64,
        right: f64,
    },
    /// Line kernel `e^{-|x|}/2`.
    Kernel,
    /// `amplitude · ψ((x - center)/radius)` with the standard smooth bump ψ.
    Bump {
        amplitude: f64,
        center: f64,
        radius: f64,
    },
    /// Smoothed Riemann datum from `left` to `right` over `width`, cut off
    /// smoothly beyond `|x| ≈ extent`.
    Riemann {
        left: f64,
        right: f64,
        width: f64,
        extent: f64,
    },
    /// `amplitude · e^{-(x - center)²/width²}`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

/// `exp(-1/(1 - z²))` on `|z| < 1`, zero elsewhere.
pub fn bump(z: f64) -> f64 {
    if z.abs() < 1.0 {
        (-1.0 / (1.0 - z * z)).exp()
    } else {
        0.0
    }
}

/// Derivative of [`bump`].
pub fn bump_prime(z: f64) -> f64 {
    if z.abs() < 1.0 {
        let q = 1.0 - z * z;
        -2.0 * z / (q * q) * (-1.0 / q).exp()
    } else {
        0.0
    }
}

impl Profile {
    pub const NAMES: [&'static str; 10] =
        ["zero", "constant", "sine", "peakon", "gaussian_derivative", "step", "kernel", "bump", "riemann", "gaussian"];

    /// Builds a profile from its name and optional parameters. Missing
    /// parameters take their defaults.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| -> Result<f64> {
            let v = params.get(key).copied().unwrap_or(default);
            ensure_finite(key, v)
        };
        let p = match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "zero" => Profile::Zero,
            "constant" => Profile::Constant { value: get("value", 1.0)? },
            "sine" => Profile::Sine {
                amplitude: get("amplitude", 0.2)?,
                offset: get("offset", 0.5)?,
                mode: get("mode", 1.0)?,
            },
            "peakon" => Profile::Peakon { center: get("center", 0.0)? },
            "gaussian_derivative" | "gauss_deriv" => Profile::GaussianDerivative { beta: get("beta", 2.0)? },
            "step" | "box" => {
                Profile::Step { height: get("height", 1.0)?, left: get("left", -1.0)?, right: get("right", 1.0)? }
            }
            "kernel" => Profile::Kernel,
            "bump" => Profile::Bump {
                amplitude: get("amplitude", 1.0)?,
                center: get("center", 0.0)?,
                radius: get("radius", 1.0)?,
            },
            "riemann" => Profile::Riemann {
                left: get("left", 1.0)?,
                right: get("right", -1.0)?,
                width: get("width", 0.05)?,
                extent: get("extent", 3.0)?,
            },
            "gaussian" => Profile::Gaussian {
                amplitude: get("amplitude", 0.5)?,
                center: get("center", 0.0)?,
                width: get("width", 1.0)?,
            },
            other => return Err(Error::UnknownProfile(other.to_string())),
        };
        p.validate()?;
        Ok(p)
    }

    /// Named parameters with their current values.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Profile::Zero | Profile::Kernel => vec![],
            Profile::Constant { value } => vec![("value", value)],
            Profile::Sine { amplitude, offset, mode } => {
                vec![("amplitude", amplitude), ("offset", offset), ("mode", mode)]
            }
            Profile::Peakon { center } => vec![("center", center)],
            Profile::GaussianDerivative { beta } => vec![("beta", beta)],
            Profile::Step { height, left, right } => {
                vec![("height", height), ("left", left), ("right", right)]
            }
            Profile::Bump { amplitude, center, radius } => {
                vec![("amplitude", amplitude), ("center", center), ("radius", radius)]
            }
            Profile::Riemann { left, right, width, extent } => {
                vec![("left", left), ("right", right), ("width", width), ("extent", extent)]
            }
            Profile::Gaussian { amplitude, center, width } => {
                vec![("amplitude", amplitude), ("center", center), ("width", width)]
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.params() {
            ensure_finite(name, v)?;
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            Profile::Bump { radius, .. } => positive("radius", radius),
            Profile::Gaussian { width, .. } => positive("width", width),
            Profile::Riemann { width, extent, .. } => {
                positive("width", width)?;
                positive("extent", extent)
            }
            Profile::Step { left, right, .. } if right <= left => {
                Err(Error::InvalidParameter(format!("step needs left < right, got [{left}, {right}]")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            Profile::Sine { amplitude, offset, mode } => offset + amplitude * (2.0 * PI * mode * x).sin(),
            Profile::Peakon { center } => 4.0 / 3.0 * (-(x - center).abs() / 2.0).exp(),
            Profile::GaussianDerivative { beta } => -beta * x * (-x * x / 2.0).exp(),
            Profile::Step { height, left, right } => {
                if x >= left && x <= right {
                    height
                } else {
                    0.0
                }
            }
            Profile::Kernel => 0.5 * (-x.abs()).exp(),
            Profile::Bump { amplitude, center, radius } => amplitude * bump((x - center) / radius),
            Profile::Riemann { left, right, width, extent } => {
                let mid = 0.5 * (left + right);
                let half = 0.5 * (left - right);
                (mid - half * (x / width).tanh()) * (-(x / extent).powi(8)).exp()
            }
            Profile::Gaussian { amplitude, center, width } => amplitude * (-((x - center) / width).powi(2)).exp(),
        }
    }
}

/// Cell-centre samples of `profile` on `domain`.
pub fn sample(profile: &Profile, domain: Domain, n: usize) -> Result<GridFn> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need n >= 4 cells, got {n}")));
    }
    profile.validate()?;
    GridFn::from_fn(domain, n, |x| profile.eval(x))
}
