//! Wall-loss estimates: skin depth, surface resistance, the geometric
//! `V / (delta A)` quality proxy and photon lifetimes.

use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use crate::consts::MU_0;
use crate::error::{Error, Result};
use crate::mode::Geometry;

/// Quality factors tabulated in every [`QualityReport`].
pub const LIFETIME_Q_VALUES: [f64; 3] = [1e6, 1e9, 1e11];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    /// Conductivity, S/m.
    pub sigma: f64,
    /// Permeability, H/m.
    pub mu: f64,
    /// Relative permittivity of the cavity filling.
    pub eps_r: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, sigma: f64, mu: f64, eps_r: f64) -> Result<Self> {
        let name = name.into();
        if !(sigma > 0.0 && sigma.is_finite()) || !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parse(format!(
                "material {name}: sigma and mu must be positive"
            )));
        }
        if !(eps_r >= 1.0 && eps_r.is_finite()) {
            return Err(Error::Parse(format!(
                "material {name}: eps_r must be at least 1"
            )));
        }
        Ok(Self {
            name,
            sigma,
            mu,
            eps_r,
        })
    }

    pub fn aluminium() -> Self {
        Self {
            name: "aluminium".into(),
            sigma: 3.77e7,
            mu: MU_0,
            eps_r: 1.0,
        }
    }

    pub fn copper() -> Self {
        Self {
            name: "copper".into(),
            sigma: 5.8e7,
            mu: MU_0,
            eps_r: 1.0,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "aluminium" | "aluminum" | "al" => Some(Self::aluminium()),
            "copper" | "cu" => Some(Self::copper()),
            _ => None,
        }
    }

    /// Parses `name, sigma_s_per_m, mu_h_per_m, eps_r` lines. Blank lines and
    /// `#` comments are skipped.
    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "material line {}: expected 4 fields",
                    i + 1
                )));
            }
            let num = |s: &str| crate::io::parse_f64(s, i + 1);
            out.push(Self::new(
                fields[0],
                num(fields[1])?,
                num(fields[2])?,
                num(fields[3])?,
            )?);
        }
        Ok(out)
    }

    /// A preset name, or the first material listed in a file.
    pub fn resolve(spec: &str) -> Result<Self> {
        if let Some(m) = Self::preset(spec) {
            return Ok(m);
        }
        let path = Path::new(spec);
        if !path.exists() {
            return Err(Error::Parse(format!("unknown material `{spec}`")));
        }
        Self::parse_list(&std::fs::read_to_string(path)?)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Parse(format!("material file {spec} is empty")))
    }
}

/// `sqrt(2 / (omega mu sigma))`, metres.
pub fn skin_depth(f: f64, material: &Material) -> f64 {
    (2.0 / (2.0 * PI * f * material.mu * material.sigma)).sqrt()
}

/// `sqrt(omega mu / (2 sigma))`, ohms.
pub fn surface_resistance(f: f64, material: &Material) -> f64 {
    (2.0 * PI * f * material.mu / (2.0 * material.sigma)).sqrt()
}

/// `V / (delta A)` for a given penetration length `delta`.
pub fn q_ratio_for_depth(geometry: &Geometry, delta: f64) -> f64 {
    geometry.volume() / (delta * geometry.area())
}

/// Geometric quality proxy `V / (delta A)` with `delta` the skin depth at `f`.
pub fn q_ratio(geometry: &Geometry, f: f64, material: &Material) -> f64 {
    q_ratio_for_depth(geometry, skin_depth(f, material))
}

/// `Q / (2 pi f)`, seconds.
pub fn photon_lifetime(q: f64, f: f64) -> f64 {
    q / (2.0 * PI * f)
}

/// `c0 n / (2 pi eps_r R)`: the `n`-th ring resonance of radius `R`.
pub fn ring_mode_frequency(n: u32, radius: f64, eps_r: f64, c0: f64) -> f64 {
    c0 * f64::from(n) / (2.0 * PI * eps_r * radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeRow {
    pub q: f64,
    pub tau_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub geometry: Geometry,
    pub frequency: f64,
    pub skin_depth: f64,
    pub surface_resistance: f64,
    pub q_ratio: f64,
    pub lifetimes: Vec<LifetimeRow>,
}

pub fn quality_report(geometry: &Geometry, f: f64, material: &Material) -> Result<QualityReport> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {f}"
        )));
    }
    let delta = skin_depth(f, material);
    Ok(QualityReport {
        geometry: *geometry,
        frequency: f,
        skin_depth: delta,
        surface_resistance: surface_resistance(f, material),
        q_ratio: q_ratio_for_depth(geometry, delta),
        lifetimes: LIFETIME_Q_VALUES
            .iter()
            .map(|&q| LifetimeRow {
                q,
                tau_s: photon_lifetime(q, f),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRatio {
    pub family: &'static str,
    pub q_ratio: f64,
}

/// Proxy for four cavity families at a common characteristic radius `r`
/// and depth `delta`: cube of side `2r`, cylinder `d = h = 2r`, sphere of
/// radius `r` and a torus of minor radius `r` (any `R >= r`).
pub fn family_comparison(r: f64, major: f64, delta: f64) -> Result<Vec<FamilyRatio>> {
    let shapes = [
        ("torus", Geometry::torus(r, major)?),
        ("cuboid", Geometry::cuboid(2.0 * r, 2.0 * r, 2.0 * r)?),
        ("cylinder", Geometry::cylinder(2.0 * r, 2.0 * r)?),
        ("spheroid", Geometry::spheroid(r, r)?),
    ];
    Ok(shapes
        .iter()
        .map(|(family, g)| FamilyRatio {
            family,
            q_ratio: q_ratio_for_depth(g, delta),
        })
        .collect())
}
