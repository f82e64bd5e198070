//! Mode labels, cavity geometries and the dimensionless mode functions
//! `F(eps) = f * d / c`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::special::{scaled_prime_zero, scaled_zero, MAX_ZERO_INDEX, MAX_ZERO_ORDER};

/// Aspect ratio at which a nodal torus (`r = R`) is actually evaluated.
pub const NODAL_EPSILON: f64 = 0.999;

/// Above this aspect ratio the O(eps^2) torus law is flagged as extrapolated.
pub const PERTURBATIVE_LIMIT: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    TE,
    TM,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TE => "TE",
            Family::TM => "TM",
        })
    }
}

/// Poloidal parity of a toroidal TE mode. Declaration order is the
/// spectrum tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
            Parity::None => 0,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            0 => Ok(Parity::None),
            other => Err(Error::Parse(format!(
                "parity must be +1, -1 or 0, got {other}"
            ))),
        }
    }
}

/// Complete label of a resonance. Field order is the tie-break order used
/// when two modes share a frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub family: Family,
    pub parity: Parity,
    /// Poloidal (torus) or azimuthal (cylinder) index.
    pub k: u32,
    /// Radial index, starting at 1.
    pub n: u32,
    /// Toroidal (torus) or axial (cylinder) index, `|m|`.
    pub m: u32,
}

impl ModeId {
    /// Toroidal `TE^P_{knm}`.
    pub fn te(parity: Parity, k: u32, n: u32, m: u32) -> Self {
        Self {
            family: Family::TE,
            parity,
            k,
            n,
            m,
        }
    }

    /// `TM_{knm}`, toroidal or cylindrical.
    pub fn tm(k: u32, n: u32, m: u32) -> Self {
        Self {
            family: Family::TM,
            parity: Parity::None,
            k,
            n,
            m,
        }
    }

    /// Cylindrical `TE_{knm}` (no parity label).
    pub fn cylinder_te(k: u32, n: u32, m: u32) -> Self {
        Self::te(Parity::None, k, n, m)
    }

    /// `+m` and `-m` share a frequency, so every `m >= 1` level is doubly
    /// degenerate.
    pub fn multiplicity(&self) -> u8 {
        if self.m == 0 {
            1
        } else {
            2
        }
    }

    /// Dark modes are the toroidal `TM_{k10}`.
    pub fn is_dark(&self) -> bool {
        self.family == Family::TM && self.n == 1 && self.m == 0
    }

    fn invalid(&self, reason: &str) -> Error {
        Error::Classification {
            mode: *self,
            reason: reason.to_owned(),
        }
    }

    pub fn validate(&self, kind: CavityKind) -> Result<()> {
        if self.n == 0 {
            return Err(self.invalid("radial index n starts at 1"));
        }
        match (kind, self.family) {
            (CavityKind::Torus, Family::TE) => {
                if self.k == 0 {
                    return Err(self.invalid("toroidal TE modes need k >= 1"));
                }
                if self.parity == Parity::None {
                    return Err(self.invalid("toroidal TE modes carry parity +1 or -1"));
                }
            }
            (CavityKind::Torus, Family::TM) => {
                if self.parity != Parity::None {
                    return Err(self.invalid("TM modes are not parity eigenmodes"));
                }
            }
            (CavityKind::Cylinder, family) => {
                if self.parity != Parity::None {
                    return Err(self.invalid("cylindrical modes carry no parity"));
                }
                if family == Family::TE && (self.k == 0 || self.m == 0) {
                    return Err(self.invalid("cylindrical TE modes need k >= 1 and m >= 1"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.parity {
            Parity::Even => "+",
            Parity::Odd => "-",
            Parity::None => "",
        };
        if self.k < 10 && self.n < 10 && self.m < 10 {
            write!(f, "{}{}{}{}{}", self.family, sign, self.k, self.n, self.m)
        } else {
            write!(
                f,
                "{}{}({},{},{})",
                self.family, sign, self.k, self.n, self.m
            )
        }
    }
}

/// Parses `TE+:1:1:0`, `TE-:1:1:0`, `TE:1:1:1` (cylinder) or `TM:0:1:0`.
impl FromStr for ModeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("mode `{s}` is not FAMILY:k:n:m")));
        }
        let (family, parity) = match parts[0].to_ascii_uppercase().as_str() {
            "TE+" => (Family::TE, Parity::Even),
            "TE-" => (Family::TE, Parity::Odd),
            "TE" => (Family::TE, Parity::None),
            "TM" => (Family::TM, Parity::None),
            other => return Err(Error::Parse(format!("unknown mode family `{other}`"))),
        };
        let index = |i: usize| {
            parts[i]
                .trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("mode `{s}`: {e}")))
        };
        Ok(ModeId {
            family,
            parity,
            k: index(1)?,
            n: index(2)?,
            m: index(3)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CavityKind {
    Cylinder,
    Torus,
}

impl FromStr for CavityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(CavityKind::Cylinder),
            "torus" => Ok(CavityKind::Torus),
            other => Err(Error::Parse(format!("unknown cavity kind `{other}`"))),
        }
    }
}

/// Cavity shape; all lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Cuboid {
        a: f64,
        b: f64,
        c: f64,
    },
    Cylinder {
        diameter: f64,
        height: f64,
    },
    /// Spheroid with equatorial radius `a` and polar radius `c`.
    Spheroid {
        a: f64,
        c: f64,
    },
    Torus {
        minor: f64,
        major: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Geometry(format!(
            "{name} must be a positive length, got {v}"
        )))
    }
}

impl Geometry {
    pub fn cuboid(a: f64, b: f64, c: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        positive("c", c)?;
        Ok(Geometry::Cuboid { a, b, c })
    }

    pub fn cylinder(diameter: f64, height: f64) -> Result<Self> {
        positive("diameter", diameter)?;
        positive("height", height)?;
        Ok(Geometry::Cylinder { diameter, height })
    }

    pub fn spheroid(a: f64, c: f64) -> Result<Self> {
        positive("a", a)?;
        positive("c", c)?;
        Ok(Geometry::Spheroid { a, c })
    }

    /// Torus with minor radius `minor` and major radius `major`; `minor > major`
    /// is the forbidden region.
    pub fn torus(minor: f64, major: f64) -> Result<Self> {
        positive("minor radius", minor)?;
        positive("major radius", major)?;
        if minor > major {
            return Err(Error::Forbidden { r: minor, major });
        }
        Ok(Geometry::Torus { minor, major })
    }

    pub fn kind(&self) -> Option<CavityKind> {
        match self {
            Geometry::Cylinder { .. } => Some(CavityKind::Cylinder),
            Geometry::Torus { .. } => Some(CavityKind::Torus),
            _ => None,
        }
    }

    /// Torus `r/R`, cylinder `d/h`, cuboid smallest/largest side, spheroid `c/a`.
    pub fn aspect_ratio(&self) -> f64 {
        match *self {
            Geometry::Cuboid { a, b, c } => a.min(b).min(c) / a.max(b).max(c),
            Geometry::Cylinder { diameter, height } => diameter / height,
            Geometry::Spheroid { a, c } => c / a,
            Geometry::Torus { minor, major } => minor / major,
        }
    }

    /// Aspect ratio at which mode functions are evaluated: a nodal torus is
    /// pulled in to [`NODAL_EPSILON`].
    pub fn evaluation_aspect_ratio(&self) -> f64 {
        let eps = self.aspect_ratio();
        match self {
            Geometry::Torus { .. } if eps >= 1.0 => NODAL_EPSILON,
            _ => eps,
        }
    }

    pub fn is_nodal(&self) -> bool {
        matches!(self, Geometry::Torus { minor, major } if minor >= major)
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Geometry::Cuboid { a, b, c } => a * b * c,
            Geometry::Cylinder { diameter, height } => PI * diameter * diameter * height / 4.0,
            Geometry::Spheroid { a, c } => 4.0 * PI * a * a * c / 3.0,
            Geometry::Torus { minor, major } => 2.0 * PI * PI * minor * minor * major,
        }
    }

    /// Wall area. The spheroid uses Thomsen's approximation (within 1.1 %).
    pub fn area(&self) -> f64 {
        match *self {
            Geometry::Cuboid { a, b, c } => 2.0 * (a * b + b * c + c * a),
            Geometry::Cylinder { diameter, height } => {
                PI * diameter * diameter / 2.0 + PI * diameter * height
            }
            Geometry::Spheroid { a, c } => {
                const P: f64 = 1.6075;
                let ap = a.powf(P);
                let cp = c.powf(P);
                4.0 * PI * ((ap * ap + 2.0 * ap * cp) / 3.0).powf(1.0 / P)
            }
            Geometry::Torus { minor, major } => 4.0 * PI * PI * minor * major,
        }
    }

    /// The length `d` that turns `F` into a frequency: torus `2r`, cylinder `d`.
    pub fn minor_diameter(&self) -> Option<f64> {
        match *self {
            Geometry::Cylinder { diameter, .. } => Some(diameter),
            Geometry::Torus { minor, .. } => Some(2.0 * minor),
            _ => None,
        }
    }
}

/// Coefficient or sample table for the fitted torus model.
#[derive(Debug, Clone, PartialEq)]
pub enum FitTable {
    /// `F^2 = c0 + c2 eps^2 + c4 eps^4` per mode.
    Polynomial(BTreeMap<ModeId, [f64; 3]>),
    /// Sampled `(eps, F)` curves per mode, interpolated monotonically.
    Sampled(BTreeMap<ModeId, MonotoneCubic>),
}

impl FitTable {
    pub fn polynomial(rows: impl IntoIterator<Item = (ModeId, [f64; 3])>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mode, coeffs) in rows {
            mode.validate(CavityKind::Torus)?;
            if !(coeffs[0] > 0.0) || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parse(format!(
                    "mode {mode}: c0 must be positive and finite"
                )));
            }
            if map.insert(mode, coeffs).is_some() {
                return Err(Error::Parse(format!("mode {mode} listed twice")));
            }
        }
        Ok(FitTable::Polynomial(map))
    }

    /// Points may arrive in any mode order but must be increasing in `eps`
    /// within each mode.
    pub fn sampled(points: impl IntoIterator<Item = (ModeId, f64, f64)>) -> Result<Self> {
        let mut grouped: BTreeMap<ModeId, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for (mode, eps, f) in points {
            mode.validate(CavityKind::Torus)?;
            if !(f > 0.0) {
                return Err(Error::Parse(format!(
                    "mode {mode}: F must be positive, got {f}"
                )));
            }
            let entry = grouped.entry(mode).or_default();
            if entry.0.last().is_some_and(|&last| eps <= last) {
                return Err(Error::Parse(format!(
                    "mode {mode}: eps must be strictly increasing ({eps} after {})",
                    entry.0.last().unwrap()
                )));
            }
            entry.0.push(eps);
            entry.1.push(f);
        }
        let mut map = BTreeMap::new();
        for (mode, (xs, ys)) in grouped {
            let curve = MonotoneCubic::new(xs, ys).ok_or_else(|| {
                Error::Parse(format!("mode {mode}: need at least two finite samples"))
            })?;
            map.insert(mode, curve);
        }
        Ok(FitTable::Sampled(map))
    }

    pub fn modes(&self) -> Vec<ModeId> {
        match self {
            FitTable::Polynomial(m) => m.keys().copied().collect(),
            FitTable::Sampled(m) => m.keys().copied().collect(),
        }
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        match self {
            FitTable::Polynomial(m) => m.contains_key(mode),
            FitTable::Sampled(m) => m.contains_key(mode),
        }
    }

    fn eval(&self, mode: &ModeId, eps: f64) -> Result<ModeValue> {
        match self {
            FitTable::Polynomial(m) => {
                let [c0, c2, c4] = *m.get(mode).ok_or(Error::MissingMode(*mode))?;
                let e2 = eps * eps;
                let sq = c0 + c2 * e2 + c4 * e2 * e2;
                if !(sq > 0.0) {
                    return Err(Error::Domain(format!(
                        "fitted F^2 for {mode} is not positive at eps = {eps}"
                    )));
                }
                Ok(ModeValue {
                    f: sq.sqrt(),
                    extrapolated: false,
                })
            }
            FitTable::Sampled(m) => {
                let curve = m.get(mode).ok_or(Error::MissingMode(*mode))?;
                let f = curve.eval(eps);
                if !(f > 0.0) {
                    return Err(Error::Domain(format!(
                        "sampled F for {mode} is not positive at eps = {eps}"
                    )));
                }
                Ok(ModeValue {
                    f,
                    extrapolated: !curve.contains(eps),
                })
            }
        }
    }

    /// Reads either CSV layout: `family,parity,k,n,m,c0,c2,c4` or
    /// `family,parity,k,n,m,eps,F`.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let head: Vec<&str> = headers.iter().map(String::as_str).collect();
        const POLY: [&str; 8] = ["family", "parity", "k", "n", "m", "c0", "c2", "c4"];
        const SAMPLED: [&str; 7] = ["family", "parity", "k", "n", "m", "eps", "F"];
        let polynomial = if head == POLY {
            true
        } else if head == SAMPLED {
            false
        } else {
            return Err(Error::Parse(format!(
                "unrecognised fit table header {head:?}"
            )));
        };
        let mut poly_rows = Vec::new();
        let mut sampled_rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let mode = crate::io::parse_mode_fields(&record, line + 2)?
                .ok_or_else(|| Error::Parse(format!("line {}: fit rows need a mode", line + 2)))?;
            let num = |i: usize| crate::io::parse_f64(&record[i], line + 2);
            if polynomial {
                poly_rows.push((mode, [num(5)?, num(6)?, num(7)?]));
            } else {
                sampled_rows.push((mode, num(5)?, num(6)?));
            }
        }
        if polynomial {
            Self::polynomial(poly_rows)
        } else {
            Self::sampled(sampled_rows)
        }
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

/// Frequency law used to evaluate `F(eps)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralModel {
    CylinderExact,
    TorusPerturbative,
    TorusFitted(FitTable),
}

impl SpectralModel {
    pub fn kind(&self) -> CavityKind {
        match self {
            SpectralModel::CylinderExact => CavityKind::Cylinder,
            _ => CavityKind::Torus,
        }
    }

    /// Default law for a cavity kind.
    pub fn default_for(kind: CavityKind) -> Self {
        match kind {
            CavityKind::Cylinder => SpectralModel::CylinderExact,
            CavityKind::Torus => SpectralModel::TorusPerturbative,
        }
    }
}

/// A dimensionless frequency together with its validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeValue {
    pub f: f64,
    pub extrapolated: bool,
}

fn bessel_constant(mode: &ModeId) -> Result<f64> {
    match mode.family {
        Family::TE => scaled_prime_zero(mode.k, mode.n),
        Family::TM => scaled_zero(mode.k, mode.n),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "aspect ratio must be positive, got {eps}"
        )))
    }
}

/// Exact cylinder mode function, `eps = d/h`.
pub fn cylinder_f(mode: &ModeId, eps: f64) -> Result<f64> {
    mode.validate(CavityKind::Cylinder)?;
    check_eps(eps)?;
    let z = bessel_constant(mode)?;
    let m = f64::from(mode.m);
    Ok((z * z + m * m * (0.5 * eps).powi(2)).sqrt())
}

/// O(eps^2) coefficient of a torus mode: `m^2 - P/4` for TE, `m^2 + 3/4` for TM.
pub fn perturbative_coefficient(mode: &ModeId) -> f64 {
    let m2 = f64::from(mode.m).powi(2);
    match mode.family {
        Family::TE => m2 - 0.25 * f64::from(mode.parity.sign()),
        Family::TM => m2 + 0.75,
    }
}

fn torus_eps(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if eps > 1.0 {
        return Err(Error::Domain(format!("torus aspect ratio {eps} exceeds 1")));
    }
    if eps == 1.0 {
        warn!("nodal torus (eps = 1) evaluated at eps = {NODAL_EPSILON}");
        return Ok(NODAL_EPSILON);
    }
    Ok(eps)
}

/// Torus mode function with its extrapolation flag.
pub fn torus_value(mode: &ModeId, eps: f64, model: &SpectralModel) -> Result<ModeValue> {
    mode.validate(CavityKind::Torus)?;
    let eps = torus_eps(eps)?;
    match model {
        SpectralModel::TorusPerturbative => {
            let z = bessel_constant(mode)?;
            let sq = z * z + perturbative_coefficient(mode) * (eps / PI).powi(2);
            Ok(ModeValue {
                f: sq.sqrt(),
                extrapolated: eps > PERTURBATIVE_LIMIT,
            })
        }
        SpectralModel::TorusFitted(table) => table.eval(mode, eps),
        SpectralModel::CylinderExact => Err(Error::Domain(
            "torus modes cannot be evaluated with the cylinder law".into(),
        )),
    }
}

/// Torus mode function `F(eps)` for `eps` in `(0, 1]`.
pub fn torus_f(mode: &ModeId, eps: f64, model: &SpectralModel) -> Result<f64> {
    torus_value(mode, eps, model).map(|v| v.f)
}

/// Evaluates `mode` under whichever law `model` names.
pub fn mode_value(mode: &ModeId, eps: f64, model: &SpectralModel) -> Result<ModeValue> {
    match model {
        SpectralModel::CylinderExact => cylinder_f(mode, eps).map(|f| ModeValue {
            f,
            extrapolated: false,
        }),
        _ => torus_value(mode, eps, model),
    }
}

/// `f = F * c / d`.
pub fn physical_frequency(f_dimensionless: f64, geometry: &Geometry, c_medium: f64) -> Result<f64> {
    let d = geometry.minor_diameter().ok_or_else(|| {
        Error::Domain("mode functions are defined for cylinders and tori only".into())
    })?;
    Ok(f_dimensionless * c_medium / d)
}

fn out_of_table(f_max: f64) -> Error {
    Error::Range(format!(
        "F_max = {f_max} needs Bessel zeros beyond k = {MAX_ZERO_ORDER}, n = {MAX_ZERO_INDEX}"
    ))
}

/// Walks `(k, n)` pairs whose Bessel constant is at most `bound`, in order.
fn for_each_radial(
    family: Family,
    k_min: u32,
    bound: f64,
    f_max: f64,
    mut visit: impl FnMut(u32, u32, f64) -> Result<()>,
) -> Result<()> {
    let zero = |k, n| match family {
        Family::TE => scaled_prime_zero(k, n),
        Family::TM => scaled_zero(k, n),
    };
    let mut k = k_min;
    loop {
        if k > MAX_ZERO_ORDER {
            return Err(out_of_table(f_max));
        }
        // zeros increase with k, so the first one decides whether to go on
        if zero(k, 1)? > bound {
            return Ok(());
        }
        for n in 1.. {
            if n > MAX_ZERO_INDEX {
                return Err(out_of_table(f_max));
            }
            let z = zero(k, n)?;
            if z > bound {
                break;
            }
            visit(k, n, z)?;
        }
        k += 1;
    }
}

/// Every legal mode of `kind` with `F <= f_max` at aspect ratio `eps`,
/// under the exact (cylinder) or perturbative (torus) law, sorted by label.
pub fn enumerate_modes(kind: CavityKind, f_max: f64, eps: f64) -> Result<Vec<ModeId>> {
    if !(f_max > 0.0) {
        return Err(Error::Domain(format!(
            "F_max must be positive, got {f_max}"
        )));
    }
    let mut out = Vec::new();
    match kind {
        CavityKind::Cylinder => {
            check_eps(eps)?;
            let axial = 0.5 * eps;
            for family in [Family::TE, Family::TM] {
                let k_min = if family == Family::TE { 1 } else { 0 };
                let m_min = if family == Family::TE { 1 } else { 0 };
                for_each_radial(family, k_min, f_max, f_max, |k, n, z| {
                    for m in m_min.. {
                        let f = (z * z + (f64::from(m) * axial).powi(2)).sqrt();
                        if f > f_max {
                            break;
                        }
                        out.push(ModeId {
                            family,
                            parity: Parity::None,
                            k,
                            n,
                            m,
                        });
                    }
                    Ok(())
                })?;
            }
        }
        CavityKind::Torus => {
            let eps = torus_eps(eps)?;
            let s = (eps / PI).powi(2);
            let f_max_sq = f_max * f_max;
            // the most negative coefficient is -1/4 (TE+, m = 0)
            let bound = (f_max_sq + 0.25 * s).sqrt();
            for_each_radial(Family::TE, 1, bound, f_max, |k, n, z| {
                for m in 0u32.. {
                    let m2 = f64::from(m).powi(2);
                    let even = z * z + (m2 - 0.25) * s;
                    if even > f_max_sq {
                        break;
                    }
                    out.push(ModeId::te(Parity::Even, k, n, m));
                    if z * z + (m2 + 0.25) * s <= f_max_sq {
                        out.push(ModeId::te(Parity::Odd, k, n, m));
                    }
                }
                Ok(())
            })?;
            for_each_radial(Family::TM, 0, f_max, f_max, |k, n, z| {
                for m in 0u32.. {
                    if z * z + (f64::from(m).powi(2) + 0.75) * s > f_max_sq {
                        break;
                    }
                    out.push(ModeId::tm(k, n, m));
                }
                Ok(())
            })?;
        }
    }
    out.sort();
    Ok(out)
}

/// Like [`enumerate_modes`] but honours a fitted table, whose rows are the
/// candidate set.
pub fn enumerate_for_model(model: &SpectralModel, f_max: f64, eps: f64) -> Result<Vec<ModeId>> {
    match model {
        SpectralModel::TorusFitted(table) => {
            let mut out = Vec::new();
            for mode in table.modes() {
                if torus_value(&mode, eps, model)?.f <= f_max {
                    out.push(mode);
                }
            }
            Ok(out)
        }
        _ => enumerate_modes(model.kind(), f_max, eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn te_p(k: u32, n: u32, m: u32) -> ModeId {
        ModeId::te(Parity::Even, k, n, m)
    }

    fn te_m(k: u32, n: u32, m: u32) -> ModeId {
        ModeId::te(Parity::Odd, k, n, m)
    }

    #[test]
    fn label_validation() {
        assert!(ModeId::te(Parity::Even, 0, 1, 0)
            .validate(CavityKind::Torus)
            .is_err());
        assert!(ModeId::te(Parity::None, 1, 1, 0)
            .validate(CavityKind::Torus)
            .is_err());
        let tm_with_parity = ModeId {
            parity: Parity::Even,
            ..ModeId::tm(0, 1, 0)
        };
        assert!(tm_with_parity.validate(CavityKind::Torus).is_err());
        assert!(ModeId::cylinder_te(1, 1, 0)
            .validate(CavityKind::Cylinder)
            .is_err());
        assert!(ModeId::cylinder_te(0, 1, 1)
            .validate(CavityKind::Cylinder)
            .is_err());
        assert!(te_p(1, 1, 1).validate(CavityKind::Cylinder).is_err());
        assert!(ModeId::tm(0, 0, 0).validate(CavityKind::Cylinder).is_err());
        assert!(ModeId::tm(0, 1, 0).validate(CavityKind::Cylinder).is_ok());
    }

    #[test]
    fn mode_parse_and_display() {
        assert_eq!("TM:0:1:0".parse::<ModeId>().unwrap(), ModeId::tm(0, 1, 0));
        assert_eq!("te-:1:1:2".parse::<ModeId>().unwrap(), te_m(1, 1, 2));
        assert_eq!(te_p(1, 1, 0).to_string(), "TE+110");
        assert_eq!(ModeId::tm(12, 1, 0).to_string(), "TM(12,1,0)");
        assert!("TEM:0:1:0".parse::<ModeId>().is_err());
        assert!("TM:0:1".parse::<ModeId>().is_err());
    }

    #[test]
    fn tie_break_order() {
        let mut v = vec![ModeId::tm(0, 1, 0), te_m(1, 1, 0), te_p(1, 1, 0)];
        v.sort();
        assert_eq!(v, vec![te_p(1, 1, 0), te_m(1, 1, 0), ModeId::tm(0, 1, 0)]);
    }

    #[test]
    fn torus_geometry_invariants() {
        let g = Geometry::torus(0.01, 0.02).unwrap();
        assert_eq!(g.volume(), 2.0 * PI * PI * 0.01 * 0.01 * 0.02);
        assert_eq!(g.area(), 4.0 * PI * PI * 0.01 * 0.02);
        assert_eq!(g.aspect_ratio(), 0.5);
        assert!(matches!(
            Geometry::torus(0.01, 0.005),
            Err(Error::Forbidden { .. })
        ));
        assert!(Geometry::torus(0.0, 0.005).is_err());
        let nodal = Geometry::torus(0.02, 0.02).unwrap();
        assert!(nodal.is_nodal());
        assert_eq!(nodal.evaluation_aspect_ratio(), NODAL_EPSILON);
    }

    #[test]
    fn spheroid_area_reduces_to_sphere() {
        let g = Geometry::spheroid(0.01, 0.01).unwrap();
        let exact = 4.0 * PI * 1e-4;
        assert!((g.area() - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn cylinder_examples() {
        let tm010 = ModeId::tm(0, 1, 0);
        for eps in [0.1, 1.0, 3.0] {
            assert!((cylinder_f(&tm010, eps).unwrap() - 0.76548).abs() < 1e-5);
        }
        let te111 = ModeId::cylinder_te(1, 1, 1);
        assert!((cylinder_f(&te111, 1e-9).unwrap() - 0.58607).abs() < 1e-5);
        assert!((cylinder_f(&te111, 0.9848).unwrap() - 0.76548).abs() < 1e-3);
        assert!(matches!(
            cylinder_f(&ModeId::cylinder_te(1, 1, 0), 1.0),
            Err(Error::Classification { .. })
        ));
    }

    #[test]
    fn cylinder_increases_with_axial_index() {
        for m in 1..6 {
            let a = cylinder_f(&ModeId::tm(1, 2, m), 0.7).unwrap();
            let b = cylinder_f(&ModeId::tm(1, 2, m + 1), 0.7).unwrap();
            assert!(b > a);
        }
    }

    #[test]
    fn torus_examples() {
        let model = SpectralModel::TorusPerturbative;
        let f = torus_f(&te_p(1, 1, 0), 0.5, &model).unwrap();
        assert!((f - 0.58064).abs() < 1e-5, "{f}");
        let tm = torus_f(&ModeId::tm(0, 1, 0), 1e-6, &model).unwrap();
        assert!((tm - 0.76548).abs() < 1e-5);
        let f_tm = physical_frequency(
            torus_f(&ModeId::tm(0, 1, 0), 0.5, &model).unwrap(),
            &Geometry::torus(0.01, 0.02).unwrap(),
            299_792_458.0,
        )
        .unwrap();
        assert!((f_tm / 1e9 - 11.659).abs() < 1e-3, "{f_tm}");
    }

    #[test]
    fn torus_errors() {
        let model = SpectralModel::TorusPerturbative;
        let bad_tm = ModeId {
            parity: Parity::Odd,
            ..ModeId::tm(0, 1, 0)
        };
        assert!(matches!(
            torus_f(&bad_tm, 0.5, &model),
            Err(Error::Classification { .. })
        ));
        assert!(torus_f(&te_p(0, 1, 0), 0.5, &model).is_err());
        assert!(torus_f(&te_p(1, 1, 0), 1.2, &model).is_err());
        let table = FitTable::polynomial([(te_p(1, 1, 0), [0.34, -0.02, 0.0])]).unwrap();
        let fitted = SpectralModel::TorusFitted(table);
        assert!(matches!(
            torus_f(&ModeId::tm(0, 1, 0), 0.5, &fitted),
            Err(Error::MissingMode(_))
        ));
        assert!(torus_f(&te_p(1, 1, 0), 0.5, &fitted).is_ok());
    }

    #[test]
    fn nodal_input_is_pulled_in() {
        let model = SpectralModel::TorusPerturbative;
        let mode = ModeId::tm(0, 1, 0);
        assert_eq!(
            torus_f(&mode, 1.0, &model).unwrap(),
            torus_f(&mode, NODAL_EPSILON, &model).unwrap()
        );
        assert!(torus_value(&mode, 0.7, &model).unwrap().extrapolated);
        assert!(!torus_value(&mode, 0.6, &model).unwrap().extrapolated);
    }

    #[test]
    fn physical_frequency_unwinds() {
        let c = 299_792_458.0;
        let g = Geometry::cylinder(c / 1e9, 1.0).unwrap();
        assert_eq!(physical_frequency(1.0, &g, c).unwrap(), 1e9);
        assert!(physical_frequency(1.0, &Geometry::cuboid(1.0, 1.0, 1.0).unwrap(), c).is_err());
    }

    #[test]
    fn enumerate_small_torus_window() {
        let got = enumerate_modes(CavityKind::Torus, 0.70, 0.9).unwrap();
        let mut want = vec![te_p(1, 1, 0), te_m(1, 1, 0), te_p(1, 1, 1), te_m(1, 1, 1)];
        want.sort();
        assert_eq!(got, want);
        let below_tm = enumerate_modes(CavityKind::Torus, 0.76548 - 0.01, 0.1).unwrap();
        assert!(below_tm.iter().all(|m| m.family == Family::TE));
    }

    #[test]
    fn enumerate_cylinder_below_tm() {
        // the TE_11m fan stays below 0.60 for several m at very small eps
        for eps in [0.05, 0.1, 0.2] {
            let got = enumerate_modes(CavityKind::Cylinder, 0.60, eps).unwrap();
            assert!(!got.is_empty());
            assert!(got
                .iter()
                .all(|m| m.family == Family::TE && m.k == 1 && m.n == 1));
        }
        let got = enumerate_modes(CavityKind::Cylinder, 0.60, 0.2).unwrap();
        assert_eq!(got, vec![ModeId::cylinder_te(1, 1, 1)]);
    }

    #[test]
    fn enumerate_rejects_huge_cutoff() {
        assert!(matches!(
            enumerate_modes(CavityKind::Torus, 50.0, 0.5),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn fitted_tables_validate() {
        assert!(FitTable::polynomial([(te_p(1, 1, 0), [0.0, 1.0, 0.0])]).is_err());
        assert!(FitTable::sampled([(te_p(1, 1, 0), 0.2, 0.5), (te_p(1, 1, 0), 0.1, 0.6)]).is_err());
        assert!(
            FitTable::sampled([(te_p(1, 1, 0), 0.2, -0.5), (te_p(1, 1, 0), 0.3, 0.6)]).is_err()
        );
        let t = FitTable::sampled([
            (te_p(1, 1, 0), 0.1, 0.585),
            (te_p(1, 1, 0), 0.5, 0.580),
            (te_p(1, 1, 0), 0.9, 0.568),
        ])
        .unwrap();
        let model = SpectralModel::TorusFitted(t);
        let inside = torus_value(&te_p(1, 1, 0), 0.5, &model).unwrap();
        assert_eq!(inside.f, 0.580);
        assert!(!inside.extrapolated);
        assert!(
            torus_value(&te_p(1, 1, 0), 0.95, &model)
                .unwrap()
                .extrapolated
        );
    }

    #[test]
    fn fit_table_csv_layouts() {
        let poly = "family,parity,k,n,m,c0,c2,c4\nTE,+1,1,1,0,0.343478,-0.0253,0\nTM,0,0,1,0,0.585973,0.076,0.001\n";
        let t = FitTable::from_csv_reader(poly.as_bytes()).unwrap();
        assert_eq!(t.modes().len(), 2);
        let sampled = "family,parity,k,n,m,eps,F\nTE,-1,1,1,0,0.1,0.587\nTE,-1,1,1,0,0.5,0.591\n";
        let t = FitTable::from_csv_reader(sampled.as_bytes()).unwrap();
        assert!(t.contains(&te_m(1, 1, 0)));
        assert!(FitTable::from_csv_reader("a,b\n1,2\n".as_bytes()).is_err());
    }
}
