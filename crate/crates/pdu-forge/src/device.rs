//! Device-physics design calculator for microring DPDC and waveguide DPUC.
//!
//! Everything here is a pure formula evaluation over a [`DeviceConfig`]:
//! the intracavity three-wave interaction strength ξ, the quality factors it
//! implies (single-longitudinal-mode threshold and the Q giving unit
//! parametric down-conversion), and the sum-frequency up-conversion strength
//! κ with its pump-power requirement. Sweep helpers tabulate the same
//! formulas over ranges for plotting.
//!
//! Effective indices and mode areas are inputs, not outputs: they come from
//! the config file, optionally falling back to a Sellmeier material model for
//! the indices. Mode solving is out of scope.

use crate::constants::{
    HBAR, SPEED_OF_LIGHT, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY,
};
use crate::error::{Error, Result};

/// Sellmeier dispersion model n²(λ) = A + Σ B_k·λ²/(λ² − C_k), λ and C_k in
/// SI units (m, m²). Coefficients are config-supplied, with a free-form
/// `source` string recording where they were published.
#[derive(Clone, Debug, PartialEq)]
pub struct SellmeierCoefficients {
    pub a: f64,
    /// (B_k, C_k) pairs, C_k in m².
    pub terms: Vec<(f64, f64)>,
    /// Validity window in m.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Citation for the coefficient set.
    pub source: String,
}

/// Evaluate a Sellmeier model at `lambda` (m).
pub fn sellmeier_index(coeffs: &SellmeierCoefficients, lambda: f64) -> Result<f64> {
    if !(coeffs.lambda_min..=coeffs.lambda_max).contains(&lambda) {
        return Err(Error::SellmeierOutOfRange {
            lambda,
            min: coeffs.lambda_min,
            max: coeffs.lambda_max,
        });
    }
    let l2 = lambda * lambda;
    let n_sq: f64 = coeffs.a
        + coeffs
            .terms
            .iter()
            .map(|&(b, c)| b * l2 / (l2 - c))
            .sum::<f64>();
    if !(n_sq > 0.0) {
        return Err(Error::NonPositive {
            quantity: "sellmeier n²",
        });
    }
    Ok(n_sq.sqrt())
}

/// Measured DPUC operating point (SFG pump power P*, waveguide length l*)
/// used to pin κ empirically via [`kappa_from_calibration`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PucCalibration {
    /// SFG pump power at unit conversion, W.
    pub power: f64,
    /// Waveguide length at unit conversion, m.
    pub length: f64,
}

/// All device parameters the formulas consume, in SI units.
///
/// Indices are *effective* indices of the guided modes at band center; the
/// `0` suffix convention of dispersion expansions is dropped in field names.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceConfig {
    /// Second-order susceptibility χ⁽²⁾ of the ring process, m/V.
    pub chi2: f64,
    /// Effective nonlinear coefficient of the SFG waveguide, m/V.
    pub d_eff: f64,
    /// Microring radius, m.
    pub radius: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub lambda_i: f64,
    /// SFG laser wavelength used to up-convert the signal photon.
    pub lambda_sfg1: f64,
    /// SFG laser wavelength used to up-convert the idler photon.
    pub lambda_sfg2: f64,
    pub n_p: f64,
    pub n_s: f64,
    pub n_i: f64,
    pub n_sfg1: f64,
    pub n_sfg2: f64,
    /// Effective spatial overlap of the three ring modes, m². May be zero
    /// (no overlap, dead device).
    pub a_eff: f64,
    pub a_p: f64,
    pub a_s: f64,
    pub a_i: f64,
    pub a_sfg1: f64,
    pub a_sfg2: f64,
    /// Optional material dispersion model backing the indices.
    pub sellmeier: Option<SellmeierCoefficients>,
    /// Optional empirical DPUC operating point.
    pub puc_calibration: Option<PucCalibration>,
}

/// Non-fatal findings from [`DeviceConfig::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigWarning {
    pub message: String,
}

fn require_positive(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::ConfigInvalid {
            message: format!("{name} must be positive and finite, got {value}"),
        });
    }
    Ok(())
}

fn require_nonnegative(value: f64, name: &str) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::ConfigInvalid {
            message: format!("{name} must be non-negative and finite, got {value}"),
        });
    }
    Ok(())
}

impl DeviceConfig {
    /// Check physical invariants. Hard violations error; soft ones (energy
    /// conservation of the quoted wavelengths) come back as warnings.
    pub fn validate(&self) -> Result<Vec<ConfigWarning>> {
        require_nonnegative(self.chi2, "chi2")?;
        require_nonnegative(self.d_eff, "d_eff")?;
        require_positive(self.radius, "radius")?;
        for (value, name) in [
            (self.lambda_p, "lambda_p"),
            (self.lambda_s, "lambda_s"),
            (self.lambda_i, "lambda_i"),
            (self.lambda_sfg1, "lambda_sfg1"),
            (self.lambda_sfg2, "lambda_sfg2"),
            (self.a_p, "a_p"),
            (self.a_s, "a_s"),
            (self.a_i, "a_i"),
            (self.a_sfg1, "a_sfg1"),
            (self.a_sfg2, "a_sfg2"),
        ] {
            require_positive(value, name)?;
        }
        require_nonnegative(self.a_eff, "a_eff")?;
        for (value, name) in [
            (self.n_p, "n_p"),
            (self.n_s, "n_s"),
            (self.n_i, "n_i"),
            (self.n_sfg1, "n_sfg1"),
            (self.n_sfg2, "n_sfg2"),
        ] {
            if !(value > 1.0) || !value.is_finite() {
                return Err(Error::ConfigInvalid {
                    message: format!("{name} must exceed 1, got {value}"),
                });
            }
        }
        if let Some(cal) = &self.puc_calibration {
            require_positive(cal.power, "puc_calibration_power")?;
            require_positive(cal.length, "puc_calibration_length")?;
        }

        let mut warnings = Vec::new();
        let residual =
            (1.0 / self.lambda_p - (1.0 / self.lambda_s + 1.0 / self.lambda_i)).abs()
                * self.lambda_p;
        if residual > 1e-4 {
            warnings.push(ConfigWarning {
                message: format!(
                    "pump/signal/idler wavelengths violate energy conservation \
                     (relative residual {residual:.2e})"
                ),
            });
        }
        Ok(warnings)
    }
}

fn wavevector(n: f64, lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * n / lambda
}

/// Intracavity three-wave interaction strength ξ (rad/s):
///
/// ξ = (χ⁽²⁾/12)·√(ħ/(πε₀R))·(c/(n_p n_s n_i))^{3/2}·(A_eff/√(A_p A_s A_i))·√(k_p k_s k_i)
///
/// with k_j = 2πn_j/λ_j.
pub fn xi(config: &DeviceConfig) -> f64 {
    let k_p = wavevector(config.n_p, config.lambda_p);
    let k_s = wavevector(config.n_s, config.lambda_s);
    let k_i = wavevector(config.n_i, config.lambda_i);
    (config.chi2 / 12.0)
        * (HBAR / (std::f64::consts::PI * VACUUM_PERMITTIVITY * config.radius)).sqrt()
        * (SPEED_OF_LIGHT / (config.n_p * config.n_s * config.n_i)).powf(1.5)
        * (config.a_eff / (config.a_p * config.a_s * config.a_i).sqrt())
        * (k_p * k_s * k_i).sqrt()
}

/// Average photon dwell time the conversion accumulates over: t₁ = 2πQ/ω.
pub fn interaction_time(q: f64, omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * q / omega
}

/// Parametric down-conversion efficiency η_PDC = sin²(ξ·t₁) at quality
/// factor `q` and resonance frequency `omega`.
pub fn eta_pdc(xi: f64, q: f64, omega: f64) -> f64 {
    (xi * interaction_time(q, omega)).sin().powi(2)
}

/// Smallest Q with η_PDC = 1: Q = ω/(4ξ).
pub fn q_required_dpdc(xi: f64, omega: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::NonPositive {
            quantity: "xi",
        });
    }
    if !(omega > 0.0) {
        return Err(Error::NonPositive {
            quantity: "omega",
        });
    }
    Ok(omega / (4.0 * xi))
}

/// Single-longitudinal-mode threshold Q > ωR/(c·|1/n_s − 1/n_i|).
///
/// The signal/idler group-index contrast is what separates their resonance
/// combs; equal indices make the threshold unattainable.
pub fn q_slm_min(config: &DeviceConfig, omega_ref: f64) -> Result<f64> {
    if config.n_s == config.n_i {
        return Err(Error::DegenerateIndices);
    }
    if !(omega_ref > 0.0) {
        return Err(Error::NonPositive {
            quantity: "omega_ref",
        });
    }
    let contrast = (1.0 / config.n_s - 1.0 / config.n_i).abs();
    Ok(omega_ref * config.radius / (SPEED_OF_LIGHT * contrast))
}

/// Which photon of the pair an SFG stage up-converts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfgProcess {
    /// Converts the signal photon; laser at `lambda_sfg1`.
    Sfg1,
    /// Converts the idler photon; laser at `lambda_sfg2`.
    Sfg2,
}

/// SFG strength coefficient (W⁻¹·m⁻²):
///
/// κ = 2·ε₀^{1/2}·μ₀^{3/2}·(ω_s·ω_p/(n_s·n_SFG·n_p))·d_eff²·(A_eff/√(A_s·A_SFG·A_p))²
///
/// evaluated with the photon being converted in the `s` slot (the idler for
/// [`SfgProcess::Sfg2`]). Prefer [`kappa_from_calibration`] when an
/// empirical operating point exists; this literal evaluation inherits every
/// uncertainty in d_eff and the mode areas.
pub fn kappa(config: &DeviceConfig, which: SfgProcess) -> f64 {
    let (lambda_in, n_in, a_in, n_sfg, a_sfg) = match which {
        SfgProcess::Sfg1 => (
            config.lambda_s,
            config.n_s,
            config.a_s,
            config.n_sfg1,
            config.a_sfg1,
        ),
        SfgProcess::Sfg2 => (
            config.lambda_i,
            config.n_i,
            config.a_i,
            config.n_sfg2,
            config.a_sfg2,
        ),
    };
    let omega_in = crate::constants::omega_from_wavelength(lambda_in);
    let omega_p = crate::constants::omega_from_wavelength(config.lambda_p);
    2.0 * VACUUM_PERMITTIVITY.sqrt()
        * VACUUM_PERMEABILITY.powf(1.5)
        * (omega_in * omega_p / (n_in * n_sfg * config.n_p))
        * config.d_eff.powi(2)
        * (config.a_eff / (a_in * a_sfg * config.a_p).sqrt()).powi(2)
}

/// Back out κ from a measured unit-conversion operating point:
/// κ = (π/(2l*))²/P*.
pub fn kappa_from_calibration(p_star: f64, l_star: f64) -> Result<f64> {
    if !(p_star > 0.0) {
        return Err(Error::NonPositive {
            quantity: "p_star",
        });
    }
    if !(l_star > 0.0) {
        return Err(Error::NonPositive {
            quantity: "l_star",
        });
    }
    Ok((std::f64::consts::PI / (2.0 * l_star)).powi(2) / p_star)
}

/// Up-conversion efficiency η_PUC = sin²(√(κP)·l).
pub fn eta_puc(kappa: f64, p: f64, l: f64) -> f64 {
    ((kappa * p).sqrt() * l).sin().powi(2)
}

/// Smallest SFG power with η_PUC = 1 at length `l`: P = (π/(2l))²/κ.
pub fn p_required_dpuc(kappa: f64, l: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::NonPositive {
            quantity: "kappa",
        });
    }
    if !(l > 0.0) {
        return Err(Error::NonPositive {
            quantity: "l",
        });
    }
    Ok((std::f64::consts::PI / (2.0 * l)).powi(2) / kappa)
}

/// Evenly spaced closed interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearRange {
    min: f64,
    max: f64,
    points: usize,
}

impl LinearRange {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(Error::InvalidRange {
                message: format!("bad interval [{min}, {max}]"),
            });
        }
        if points == 0 || (points == 1 && min != max) {
            return Err(Error::InvalidRange {
                message: format!("{points} point(s) cannot span [{min}, {max}]"),
            });
        }
        Ok(LinearRange { min, max, points })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid values; endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

/// Tabulated sweep, one value column over one or two input axes.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    /// Axis column names (with units baked into the name, e.g. `radius_m`).
    pub axes: Vec<String>,
    /// Name of the value column (`eta` for efficiency tables).
    pub value_name: String,
    /// Axis-major rows: the first axis varies slowest.
    pub rows: Vec<(Vec<f64>, f64)>,
}

impl SweepTable {
    /// CSV with a one-line header; floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.axes.join(","));
        out.push(',');
        out.push_str(&self.value_name);
        out.push('\n');
        for (inputs, value) in &self.rows {
            for input in inputs {
                out.push_str(&format!("{input},"));
            }
            out.push_str(&format!("{value}\n"));
        }
        out
    }
}

/// η_PDC versus quality factor at fixed geometry.
pub fn sweep_eta_pdc(
    config: &DeviceConfig,
    omega_ref: f64,
    q_range: &LinearRange,
) -> SweepTable {
    let xi = xi(config);
    let rows = q_range
        .values()
        .into_iter()
        .map(|q| (vec![q], eta_pdc(xi, q, omega_ref)))
        .collect();
    SweepTable {
        axes: vec!["q".to_owned()],
        value_name: "eta".to_owned(),
        rows,
    }
}

/// Q needed for unit η_PDC versus ring radius. ξ scales as R^{-1/2}, so the
/// requirement grows with the ring.
pub fn sweep_q_required_vs_radius(
    config: &DeviceConfig,
    omega_ref: f64,
    r_range: &LinearRange,
) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(r_range.points());
    for radius in r_range.values() {
        let scaled = DeviceConfig {
            radius,
            ..config.clone()
        };
        let q = q_required_dpdc(xi(&scaled), omega_ref)?;
        rows.push((vec![radius], q));
    }
    Ok(SweepTable {
        axes: vec!["radius_m".to_owned()],
        value_name: "q_required".to_owned(),
        rows,
    })
}

/// η_PUC over a power × length grid (power-major row order).
pub fn sweep_eta_puc(kappa: f64, p_range: &LinearRange, l_range: &LinearRange) -> SweepTable {
    let lengths = l_range.values();
    let mut rows = Vec::with_capacity(p_range.points() * l_range.points());
    for p in p_range.values() {
        for &l in &lengths {
            rows.push((vec![p, l], eta_puc(kappa, p, l)));
        }
    }
    SweepTable {
        axes: vec!["p_w".to_owned(), "l_m".to_owned()],
        value_name: "eta".to_owned(),
        rows,
    }
}

/// Unit-efficiency power requirement versus waveguide length.
pub fn unity_power_contour(kappa: f64, l_range: &LinearRange) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(l_range.points());
    for l in l_range.values() {
        rows.push((vec![l], p_required_dpuc(kappa, l)?));
    }
    Ok(SweepTable {
        axes: vec!["l_m".to_owned()],
        value_name: "p_w".to_owned(),
        rows,
    })
}
