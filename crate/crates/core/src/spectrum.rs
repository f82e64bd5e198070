//! Concrete spectra: sorting, ground states, dark modes, gaps, sweeps,
//! mode charts and minor-radius calibration against measured lines.

use std::cmp::Ordering;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::mode::{
    enumerate_for_model, mode_value, physical_frequency, CavityKind, Family, Geometry, ModeId,
    ModeValue, Parity, SpectralModel,
};
use crate::special::{scaled_prime_zero, scaled_zero};

/// Window for matching an unlabeled measured line to a model line.
pub const MATCH_WINDOW_HZ: f64 = 100e6;

/// Search interval for the minor-radius offset.
pub const CALIBRATION_RANGE_M: f64 = 0.5e-3;

/// Default number of levels kept per mode-chart point.
pub const DEFAULT_CHART_COUNT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub mode: ModeId,
    /// Dimensionless `F = f d / c`.
    pub f_dimensionless: f64,
    /// Physical frequency in Hz.
    pub frequency: f64,
    pub multiplicity: u8,
    pub extrapolated: bool,
}

fn spectral_order(a: &SpectrumEntry, b: &SpectrumEntry) -> Ordering {
    a.frequency
        .total_cmp(&b.frequency)
        .then_with(|| a.mode.cmp(&b.mode))
}

/// Sorted list of modes below a cutoff for one concrete cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub geometry: Geometry,
    pub model: SpectralModel,
    pub c_medium: f64,
    /// Aspect ratio the mode functions were evaluated at.
    pub eps: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, mode: &ModeId) -> Option<usize> {
        self.entries.iter().position(|e| e.mode == *mode)
    }

    pub fn get(&self, mode: &ModeId) -> Option<&SpectrumEntry> {
        self.position(mode).map(|i| &self.entries[i])
    }

    pub fn kind(&self) -> CavityKind {
        self.model.kind()
    }

    /// Frequency of `mode` in this cavity whether or not it lies below the cutoff.
    pub fn evaluate(&self, mode: &ModeId) -> Result<SpectrumEntry> {
        entry_for(mode, &self.geometry, &self.model, self.c_medium)
    }
}

fn check_model(geometry: &Geometry, model: &SpectralModel) -> Result<CavityKind> {
    let kind = geometry
        .kind()
        .ok_or_else(|| Error::Domain("spectra are available for cylinders and tori only".into()))?;
    if kind != model.kind() {
        return Err(Error::Domain(format!(
            "model {model:?} does not apply to a {kind:?} geometry"
        )));
    }
    Ok(kind)
}

fn entry_for(
    mode: &ModeId,
    geometry: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<SpectrumEntry> {
    let eps = geometry.evaluation_aspect_ratio();
    let ModeValue { f, extrapolated } = mode_value(mode, eps, model)?;
    Ok(SpectrumEntry {
        mode: *mode,
        f_dimensionless: f,
        frequency: physical_frequency(f, geometry, c_medium)?,
        multiplicity: mode.multiplicity(),
        extrapolated: extrapolated || geometry.is_nodal(),
    })
}

/// Every mode of `geometry` with frequency at most `f_max` (Hz), ascending.
pub fn build_spectrum(
    geometry: &Geometry,
    model: &SpectralModel,
    f_max: f64,
    c_medium: f64,
) -> Result<Spectrum> {
    check_model(geometry, model)?;
    if !(f_max > 0.0) || !(c_medium > 0.0) {
        return Err(Error::Domain("f_max and c_medium must be positive".into()));
    }
    let d = geometry.minor_diameter().expect("checked kind");
    let eps = geometry.evaluation_aspect_ratio();
    let cutoff = f_max * d / c_medium;
    let mut entries = Vec::new();
    for mode in enumerate_for_model(model, cutoff, eps)? {
        let entry = entry_for(&mode, geometry, model, c_medium)?;
        if entry.frequency <= f_max {
            entries.push(entry);
        }
    }
    entries.sort_by(spectral_order);
    Ok(Spectrum {
        geometry: *geometry,
        model: model.clone(),
        c_medium,
        eps,
        entries,
    })
}

/// Lowest mode of the cavity.
pub fn ground_state(geometry: &Geometry, model: &SpectralModel) -> Result<ModeId> {
    check_model(geometry, model)?;
    let eps = geometry.evaluation_aspect_ratio();
    let candidates = match model {
        SpectralModel::TorusFitted(table) => table.modes(),
        _ => {
            let mut cutoff = 1.0;
            loop {
                let modes = enumerate_for_model(model, cutoff, eps)?;
                if !modes.is_empty() {
                    break modes;
                }
                cutoff *= 2.0;
            }
        }
    };
    let mut best: Option<(f64, ModeId)> = None;
    for mode in candidates {
        let f = mode_value(&mode, eps, model)?.f;
        if best.is_none_or(|(bf, bm)| f < bf || (f == bf && mode < bm)) {
            best = Some((f, mode));
        }
    }
    best.map(|(_, m)| m)
        .ok_or_else(|| Error::Domain("fitted table is empty".into()))
}

/// Cylinder aspect ratio where `TM_010` overtakes `TE_111` as ground state:
/// `2 sqrt(z_01^2 - z'_11^2)`.
pub fn cylinder_crossover() -> f64 {
    let z01 = scaled_zero(0, 1).expect("tabulated");
    let zp11 = scaled_prime_zero(1, 1).expect("tabulated");
    2.0 * (z01 * z01 - zp11 * zp11).sqrt()
}

/// The `TM_{k10}` entries of a torus spectrum, in spectral order.
pub fn dark_modes(spectrum: &Spectrum) -> Result<Vec<SpectrumEntry>> {
    if spectrum.kind() != CavityKind::Torus {
        return Err(Error::Domain(
            "dark modes exist only in toroidal cavities".into(),
        ));
    }
    Ok(spectrum
        .entries
        .iter()
        .filter(|e| e.mode.is_dark())
        .copied()
        .collect())
}

/// 1-based position of `mode` in the sorted spectrum, each `|m|` counted once.
pub fn mode_rank(spectrum: &Spectrum, mode: &ModeId) -> Result<usize> {
    spectrum
        .position(mode)
        .map(|i| i + 1)
        .ok_or(Error::NotFound(*mode))
}

/// `f(TE^{+/-}_112) - f(TM_010)` for a torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedGaps {
    pub plus: f64,
    pub minus: f64,
    pub extrapolated: bool,
}

/// Signed distances (Hz) from a mode to its spectral neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaps {
    /// `f(lower neighbour) - f(mode)`, absent for the ground state.
    pub below: Option<f64>,
    /// `f(upper neighbour) - f(mode)`, absent for the top entry.
    pub above: Option<f64>,
    pub named: Option<NamedGaps>,
}

pub fn gaps(spectrum: &Spectrum, mode: &ModeId) -> Result<Gaps> {
    let i = spectrum.position(mode).ok_or(Error::NotFound(*mode))?;
    let f = spectrum.entries[i].frequency;
    let below = i.checked_sub(1).map(|j| spectrum.entries[j].frequency - f);
    let above = spectrum.entries.get(i + 1).map(|e| e.frequency - f);
    let named = if spectrum.kind() == CavityKind::Torus && *mode == ModeId::tm(0, 1, 0) {
        named_gaps(spectrum)
    } else {
        None
    };
    Ok(Gaps {
        below,
        above,
        named,
    })
}

fn named_gaps(spectrum: &Spectrum) -> Option<NamedGaps> {
    let dm = spectrum.evaluate(&ModeId::tm(0, 1, 0)).ok()?;
    let plus = spectrum.evaluate(&ModeId::te(Parity::Even, 1, 1, 2)).ok()?;
    let minus = spectrum.evaluate(&ModeId::te(Parity::Odd, 1, 1, 2)).ok()?;
    Some(NamedGaps {
        plus: plus.frequency - dm.frequency,
        minus: minus.frequency - dm.frequency,
        extrapolated: dm.extrapolated || plus.extrapolated || minus.extrapolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRow {
    pub mode: ModeId,
    pub eps: f64,
    pub f_dimensionless: f64,
    pub extrapolated: bool,
}

/// `F(eps)` for every mode on every grid point, mode-major.
pub fn flow_sweep(
    modes: &[ModeId],
    eps_grid: &[f64],
    model: &SpectralModel,
) -> Result<Vec<FlowRow>> {
    let mut rows = Vec::with_capacity(modes.len() * eps_grid.len());
    for mode in modes {
        for &eps in eps_grid {
            let v = mode_value(mode, eps, model)?;
            rows.push(FlowRow {
                mode: *mode,
                eps,
                f_dimensionless: v.f,
                extrapolated: v.extrapolated,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartRow {
    pub minor: f64,
    pub major: f64,
    pub eps: f64,
    pub nodal: bool,
    pub entry: SpectrumEntry,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeChart {
    pub rows: Vec<ChartRow>,
    /// Requested `(r, R)` points with `r > R`, left out of `rows`.
    pub forbidden: Vec<(f64, f64)>,
}

/// The `count` lowest entries of a cavity, widening the cutoff until enough
/// modes are found.
pub fn lowest_entries(
    geometry: &Geometry,
    model: &SpectralModel,
    count: usize,
    c_medium: f64,
) -> Result<Spectrum> {
    check_model(geometry, model)?;
    let d = geometry.minor_diameter().expect("checked kind");
    let mut cutoff = c_medium / d;
    loop {
        let mut s = build_spectrum(geometry, model, cutoff, c_medium)?;
        if s.len() >= count {
            s.entries.truncate(count);
            return Ok(s);
        }
        if let SpectralModel::TorusFitted(table) = model {
            if s.len() == table.modes().len() {
                return Ok(s);
            }
        }
        cutoff *= 1.5;
    }
}

/// Lowest `count` frequencies (capped at `f_max` when given) for every
/// `(r, R)` pair, plus the nodal point `R = r` for every `r`.
pub fn mode_chart(
    minor_radii: &[f64],
    major_radii: &[f64],
    model: &SpectralModel,
    f_max: Option<f64>,
    count: usize,
    c_medium: f64,
) -> Result<ModeChart> {
    if model.kind() != CavityKind::Torus {
        return Err(Error::Domain("mode charts are drawn for tori".into()));
    }
    let mut chart = ModeChart::default();
    for &r in minor_radii {
        let mut majors: Vec<f64> = major_radii.to_vec();
        if !majors.iter().any(|&big| (big - r).abs() <= 1e-12 * r) {
            majors.push(r);
        }
        majors.sort_by(f64::total_cmp);
        for big in majors {
            if r > big * (1.0 + 1e-12) {
                chart.forbidden.push((r, big));
                continue;
            }
            let geometry = Geometry::torus(r, big.max(r))?;
            let spectrum = match f_max {
                Some(f_max) => build_spectrum(&geometry, model, f_max, c_medium)?,
                None => lowest_entries(&geometry, model, count, c_medium)?,
            };
            for entry in spectrum.entries.iter().take(count) {
                chart.rows.push(ChartRow {
                    minor: r,
                    major: big,
                    eps: spectrum.eps,
                    nodal: geometry.is_nodal(),
                    entry: *entry,
                });
            }
        }
    }
    Ok(chart)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredLine {
    pub label: Option<ModeId>,
    /// Hz.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasuredSpectrum {
    pub lines: Vec<MeasuredLine>,
    /// Free text, e.g. instrument and temperature.
    pub source: String,
}

impl MeasuredSpectrum {
    pub fn new(lines: Vec<MeasuredLine>, source: impl Into<String>) -> Result<Self> {
        let mut last_unlabeled: Option<f64> = None;
        for line in &lines {
            if !(line.frequency > 0.0) || !line.frequency.is_finite() {
                return Err(Error::Parse(format!(
                    "measured frequency must be positive, got {}",
                    line.frequency
                )));
            }
            if line.label.is_none() {
                if last_unlabeled.is_some_and(|f| line.frequency <= f) {
                    return Err(Error::Parse(
                        "unlabeled measured lines must be strictly increasing".into(),
                    ));
                }
                last_unlabeled = Some(line.frequency);
            }
        }
        Ok(Self {
            lines,
            source: source.into(),
        })
    }

    /// Reads `family,parity,k,n,m,f_hz`; unlabeled rows leave the mode fields empty.
    pub fn from_csv_reader<R: std::io::Read>(reader: R, source: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let head: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if head != ["family", "parity", "k", "n", "m", "f_hz"] {
            return Err(Error::Parse(format!(
                "unrecognised measured-spectrum header {head:?}"
            )));
        }
        let mut lines = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let line_no = i + 2;
            if record.len() != 6 {
                return Err(Error::Parse(format!("line {line_no}: expected 6 fields")));
            }
            lines.push(MeasuredLine {
                label: crate::io::parse_mode_fields(&record, line_no)?,
                frequency: crate::io::parse_f64(&record[5], line_no)?,
            });
        }
        Self::new(lines, source)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_csv_reader(std::fs::File::open(path)?, path.display().to_string())
    }
}

/// Geometry with its minor radius moved by `delta` (m).
pub fn offset_minor_radius(geometry: &Geometry, delta: f64) -> Result<Geometry> {
    match *geometry {
        Geometry::Torus { minor, major } => Geometry::torus(minor + delta, major),
        Geometry::Cylinder { diameter, height } => {
            Geometry::cylinder(diameter + 2.0 * delta, height)
        }
        _ => Err(Error::Domain(
            "only cylinders and tori can be calibrated".into(),
        )),
    }
}

fn offset_radii(geometry: &Geometry, d_minor: f64, d_major: f64) -> Result<Geometry> {
    match *geometry {
        Geometry::Torus { minor, major } => Geometry::torus(minor + d_minor, major + d_major),
        Geometry::Cylinder { diameter, height } => {
            Geometry::cylinder(diameter + 2.0 * d_minor, height + d_major)
        }
        _ => Err(Error::Domain(
            "only cylinders and tori can be calibrated".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineResidual {
    pub mode: ModeId,
    pub measured: f64,
    /// Model frequency at the fitted geometry.
    pub model: f64,
}

impl LineResidual {
    /// `model - measured`, Hz.
    pub fn residual(&self) -> f64 {
        self.model - self.measured
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Fitted minor-radius offset, m.
    pub delta_r: f64,
    /// Fitted major-radius offset (cylinder: height offset), m. Zero for the
    /// one-parameter fit.
    pub delta_major: f64,
    pub lines: Vec<LineResidual>,
    /// Mean of `f(fitted) - f(nominal)` over the matched lines, Hz.
    pub mean_shift: f64,
}

impl Calibration {
    pub fn residuals(&self) -> Vec<f64> {
        self.lines.iter().map(LineResidual::residual).collect()
    }
}

/// Pairs each measured line with a model mode. Labels are taken as given;
/// unlabeled lines are matched greedily by nearest frequency within
/// [`MATCH_WINDOW_HZ`].
pub fn match_lines(
    measured: &MeasuredSpectrum,
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<Vec<(ModeId, f64)>> {
    let matched = quiet_match(measured, nominal, model, c_medium)?;
    let dropped = measured.lines.len() - matched.len();
    if dropped > 0 {
        warn!("{dropped} measured line(s) had no model line within {MATCH_WINDOW_HZ} Hz");
    }
    Ok(matched)
}

fn quiet_match(
    measured: &MeasuredSpectrum,
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<Vec<(ModeId, f64)>> {
    let mut matched: Vec<(ModeId, f64)> = measured
        .lines
        .iter()
        .filter_map(|l| l.label.map(|m| (m, l.frequency)))
        .collect();
    let unlabeled: Vec<f64> = measured
        .lines
        .iter()
        .filter(|l| l.label.is_none())
        .map(|l| l.frequency)
        .collect();
    if unlabeled.is_empty() {
        return Ok(matched);
    }
    let top = unlabeled.iter().copied().fold(0.0, f64::max) + 2.0 * MATCH_WINDOW_HZ;
    let spectrum = build_spectrum(nominal, model, top, c_medium)?;
    let mut pairs = Vec::new();
    for (li, &f) in unlabeled.iter().enumerate() {
        for (ei, e) in spectrum.entries.iter().enumerate() {
            let d = (e.frequency - f).abs();
            if d <= MATCH_WINDOW_HZ && !matched.iter().any(|(m, _)| *m == e.mode) {
                pairs.push((d, li, ei));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let labelled = matched.len();
    let mut line_used = vec![false; unlabeled.len()];
    let mut entry_used = vec![false; spectrum.entries.len()];
    for (_, li, ei) in pairs {
        if line_used[li] || entry_used[ei] {
            continue;
        }
        line_used[li] = true;
        entry_used[ei] = true;
        matched.push((spectrum.entries[ei].mode, unlabeled[li]));
    }
    matched[labelled..].sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(matched)
}

fn line_frequency(
    mode: &ModeId,
    geometry: &Geometry,
    model: &SpectralModel,
    c: f64,
) -> Result<f64> {
    Ok(entry_for(mode, geometry, model, c)?.frequency)
}

struct Objective<'a> {
    lines: &'a [(ModeId, f64)],
    nominal: &'a Geometry,
    model: &'a SpectralModel,
    c: f64,
}

impl Objective<'_> {
    fn frequencies(&self, geometry: &Geometry) -> Result<Vec<f64>> {
        self.lines
            .iter()
            .map(|(m, _)| line_frequency(m, geometry, self.model, self.c))
            .collect()
    }

    /// Half the derivative of the squared error with respect to `delta`.
    fn normal_equation(&self, delta: f64) -> Result<f64> {
        const H: f64 = 1e-8;
        let at = self.frequencies(&offset_minor_radius(self.nominal, delta)?)?;
        let up = self.frequencies(&offset_minor_radius(self.nominal, delta + H)?)?;
        let down = self.frequencies(&offset_minor_radius(self.nominal, delta - H)?)?;
        Ok(self
            .lines
            .iter()
            .enumerate()
            .map(|(i, (_, meas))| (at[i] - meas) * (up[i] - down[i]) / (2.0 * H))
            .sum())
    }

    fn squared_error(&self, delta: f64) -> Result<f64> {
        let at = self.frequencies(&offset_minor_radius(self.nominal, delta)?)?;
        Ok(self
            .lines
            .iter()
            .zip(at)
            .map(|((_, meas), f)| (f - meas).powi(2))
            .sum())
    }
}

fn calibration_window(nominal: &Geometry) -> Result<(f64, f64)> {
    // keep the probe points of the finite difference inside the legal region
    let margin = 1e-7;
    match *nominal {
        Geometry::Torus { minor, major } => Ok((
            -CALIBRATION_RANGE_M.min(minor - margin),
            CALIBRATION_RANGE_M.min(major - minor - margin),
        )),
        Geometry::Cylinder { diameter, .. } => Ok((
            -CALIBRATION_RANGE_M.min(0.5 * diameter - margin),
            CALIBRATION_RANGE_M,
        )),
        _ => Err(Error::Domain(
            "only cylinders and tori can be calibrated".into(),
        )),
    }
}

fn finish_calibration(
    lines: &[(ModeId, f64)],
    nominal: &Geometry,
    model: &SpectralModel,
    c: f64,
    delta_r: f64,
    delta_major: f64,
) -> Result<Calibration> {
    let fitted = offset_radii(nominal, delta_r, delta_major)?;
    let mut out = Vec::with_capacity(lines.len());
    let mut shift = 0.0;
    for (mode, meas) in lines {
        let f_fit = line_frequency(mode, &fitted, model, c)?;
        shift += f_fit - line_frequency(mode, nominal, model, c)?;
        out.push(LineResidual {
            mode: *mode,
            measured: *meas,
            model: f_fit,
        });
    }
    Ok(Calibration {
        delta_r,
        delta_major,
        lines: out,
        mean_shift: shift / lines.len() as f64,
    })
}

fn require_lines(lines: &[(ModeId, f64)]) -> Result<()> {
    if lines.len() < 3 {
        return Err(Error::Calibration(format!(
            "need at least 3 matched lines, got {}",
            lines.len()
        )));
    }
    Ok(())
}

fn fit_minor(
    lines: &[(ModeId, f64)],
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<f64> {
    let objective = Objective {
        lines,
        nominal,
        model,
        c: c_medium,
    };
    let (lo, hi) = calibration_window(nominal)?;

    // scan for a - to + sign change of the normal equation (a minimum)
    const SCAN: usize = 200;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut prev_x = lo;
    let mut prev_g = objective.normal_equation(lo)?;
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let g = objective.normal_equation(x)?;
        if prev_g <= 0.0 && g >= 0.0 {
            let s = objective.squared_error(0.5 * (prev_x + x))?;
            if best.is_none_or(|(bs, _, _)| s < bs) {
                best = Some((s, prev_x, x));
            }
        }
        prev_x = x;
        prev_g = g;
    }
    let (_, mut a, mut b) = best.ok_or_else(|| {
        Error::Numerical(format!(
            "no bracketed minimum for the minor-radius offset in [{lo:e}, {hi:e}] m"
        ))
    })?;
    let mut ga = objective.normal_equation(a)?;
    for _ in 0..200 {
        if b - a <= 1e-15 {
            break;
        }
        let mid = 0.5 * (a + b);
        let gm = objective.normal_equation(mid)?;
        if gm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    if b - a > 1e-12 {
        return Err(Error::Numerical(
            "minor-radius bisection did not converge".into(),
        ));
    }
    Ok(0.5 * (a + b))
}

/// Matched lines plus the minor-radius offset they were matched at.
/// Unlabeled lines are first aligned by a coarse scan over the offset, then
/// re-matched against each refined fit until the assignment settles.
fn matched_with_offset(
    measured: &MeasuredSpectrum,
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<(Vec<(ModeId, f64)>, f64)> {
    if measured.lines.iter().all(|l| l.label.is_some()) {
        let lines = match_lines(measured, nominal, model, c_medium)?;
        require_lines(&lines)?;
        let delta = fit_minor(&lines, nominal, model, c_medium)?;
        return Ok((lines, delta));
    }
    let (lo, hi) = calibration_window(nominal)?;
    const COARSE: usize = 100;
    let mut best: Option<(usize, f64, f64)> = None;
    for i in 0..=COARSE {
        let delta = lo + (hi - lo) * i as f64 / COARSE as f64;
        let trial = offset_minor_radius(nominal, delta)?;
        let lines = quiet_match(measured, &trial, model, c_medium)?;
        let err = lines
            .iter()
            .map(|(m, f)| Ok((line_frequency(m, &trial, model, c_medium)? - f).powi(2)))
            .sum::<Result<f64>>()?;
        let better = match best {
            None => true,
            Some((n, e, _)) => lines.len() > n || (lines.len() == n && err < e),
        };
        if better {
            best = Some((lines.len(), err, delta));
        }
    }
    let mut delta = best.map_or(0.0, |b| b.2);
    let mut lines = quiet_match(
        measured,
        &offset_minor_radius(nominal, delta)?,
        model,
        c_medium,
    )?;
    for _ in 0..10 {
        require_lines(&lines)?;
        delta = fit_minor(&lines, nominal, model, c_medium)?;
        let rematched = quiet_match(
            measured,
            &offset_minor_radius(nominal, delta)?,
            model,
            c_medium,
        )?;
        if rematched == lines {
            break;
        }
        lines = rematched;
    }
    let dropped = measured.lines.len() - lines.len();
    if dropped > 0 {
        warn!("{dropped} measured line(s) had no model line within {MATCH_WINDOW_HZ} Hz");
    }
    Ok((lines, delta))
}

/// Least-squares minor-radius offset explaining `measured` against the
/// nominal geometry. Needs at least three matched lines.
pub fn calibrate_minor_radius(
    measured: &MeasuredSpectrum,
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<Calibration> {
    check_model(nominal, model)?;
    let (lines, delta) = matched_with_offset(measured, nominal, model, c_medium)?;
    finish_calibration(&lines, nominal, model, c_medium, delta, 0.0)
}

/// Two-parameter Gauss–Newton fit of minor and major radius offsets.
pub fn calibrate_radii(
    measured: &MeasuredSpectrum,
    nominal: &Geometry,
    model: &SpectralModel,
    c_medium: f64,
) -> Result<Calibration> {
    check_model(nominal, model)?;
    let (lines, _) = matched_with_offset(measured, nominal, model, c_medium)?;
    let freqs = |dr: f64, dmaj: f64| -> Result<Vec<f64>> {
        let g = offset_radii(nominal, dr, dmaj)?;
        lines
            .iter()
            .map(|(m, _)| line_frequency(m, &g, model, c_medium))
            .collect()
    };
    const H: f64 = 1e-8;
    let (mut dr, mut dmaj) = (0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let f0 = freqs(dr, dmaj)?;
        let fr_up = freqs(dr + H, dmaj)?;
        let fr_dn = freqs(dr - H, dmaj)?;
        let fm_up = freqs(dr, dmaj + H)?;
        let fm_dn = freqs(dr, dmaj - H)?;
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..lines.len() {
            let jr = (fr_up[i] - fr_dn[i]) / (2.0 * H);
            let jm = (fm_up[i] - fm_dn[i]) / (2.0 * H);
            let res = lines[i].1 - f0[i];
            a11 += jr * jr;
            a12 += jr * jm;
            a22 += jm * jm;
            b1 += jr * res;
            b2 += jm * res;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 1e-12 * a11 * a22) {
            return Err(Error::Numerical(
                "radius offsets are not separately identifiable from these lines".into(),
            ));
        }
        let step_r = (a22 * b1 - a12 * b2) / det;
        let step_m = (a11 * b2 - a12 * b1) / det;
        dr += step_r;
        dmaj += step_m;
        if dr.abs() > CALIBRATION_RANGE_M || dmaj.abs() > CALIBRATION_RANGE_M {
            return Err(Error::Numerical(
                "radius offsets left the search range".into(),
            ));
        }
        if step_r.abs() < 1e-13 && step_m.abs() < 1e-13 {
            return finish_calibration(&lines, nominal, model, c_medium, dr, dmaj);
        }
    }
    Err(Error::Numerical(
        "two-parameter calibration did not converge".into(),
    ))
}

/// Frequency shifts caused by moving the minor radius by `delta` (m), for
/// every mode of the nominal spectrum below `f_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSummary {
    pub shifts: Vec<(ModeId, f64)>,
    pub mean: f64,
}

pub fn minor_radius_shift(
    nominal: &Geometry,
    model: &SpectralModel,
    f_max: f64,
    delta: f64,
    c_medium: f64,
) -> Result<ShiftSummary> {
    let base = build_spectrum(nominal, model, f_max, c_medium)?;
    if base.is_empty() {
        return Err(Error::Domain("no modes below the cutoff".into()));
    }
    let moved = offset_minor_radius(nominal, delta)?;
    let mut shifts = Vec::with_capacity(base.len());
    for e in &base.entries {
        shifts.push((
            e.mode,
            line_frequency(&e.mode, &moved, model, c_medium)? - e.frequency,
        ));
    }
    let mean = shifts.iter().map(|(_, s)| s).sum::<f64>() / shifts.len() as f64;
    Ok(ShiftSummary { shifts, mean })
}

/// Synthetic measurement: the model spectrum of `geometry` below `f_max`,
/// labelled or not.
pub fn synthetic_measurement(
    geometry: &Geometry,
    model: &SpectralModel,
    f_max: f64,
    c_medium: f64,
    labelled: bool,
) -> Result<MeasuredSpectrum> {
    let s = build_spectrum(geometry, model, f_max, c_medium)?;
    let lines = s
        .entries
        .iter()
        .map(|e| MeasuredLine {
            label: labelled.then_some(e.mode),
            frequency: e.frequency,
        })
        .collect();
    MeasuredSpectrum::new(lines, "synthetic")
}

/// Whether a mode is one of the `TE^+_{k10}` whose frequency grows with `R`.
pub fn is_anomalous(mode: &ModeId) -> bool {
    mode.family == Family::TE && mode.parity == Parity::Even && mode.n == 1 && mode.m == 0
}
