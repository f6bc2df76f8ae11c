//! `key = value` device-config files.
//!
//! One assignment per line, `#` comments, SI units throughout. Unknown and
//! duplicated keys are rejected so a typo cannot silently fall back to a
//! default. Effective indices `n_p`, `n_s`, `n_i`, `n_sfg1`, `n_sfg2` may be
//! omitted when a Sellmeier coefficient set is supplied; an explicit index
//! always wins over the material model. The Sellmeier group and the PUC
//! calibration pair are all-or-nothing.
//!
//! Keys, all values f64 except `sellmeier_source`:
//!
//! | key | unit | required |
//! |-----|------|----------|
//! | `chi2`, `d_eff` | m/V | yes |
//! | `radius` | m | yes |
//! | `lambda_p`, `lambda_s`, `lambda_i`, `lambda_sfg1`, `lambda_sfg2` | m | yes |
//! | `a_eff`, `a_p`, `a_s`, `a_i`, `a_sfg1`, `a_sfg2` | m² | yes |
//! | `n_p`, `n_s`, `n_i`, `n_sfg1`, `n_sfg2` | — | unless Sellmeier given |
//! | `sellmeier_a`, `sellmeier_b1..b3` | — | group |
//! | `sellmeier_c1..c3` | m² | group |
//! | `sellmeier_lambda_min`, `sellmeier_lambda_max` | m | group |
//! | `sellmeier_source` | citation text | group |
//! | `puc_calibration_power` | W | pair |
//! | `puc_calibration_length` | m | pair |

use std::collections::BTreeMap;

use crate::device::{ConfigWarning, DeviceConfig, PucCalibration, SellmeierCoefficients};
use crate::device::sellmeier_index;
use crate::error::{Error, Result};

const FLOAT_KEYS: &[&str] = &[
    "chi2",
    "d_eff",
    "radius",
    "lambda_p",
    "lambda_s",
    "lambda_i",
    "lambda_sfg1",
    "lambda_sfg2",
    "n_p",
    "n_s",
    "n_i",
    "n_sfg1",
    "n_sfg2",
    "a_eff",
    "a_p",
    "a_s",
    "a_i",
    "a_sfg1",
    "a_sfg2",
    "sellmeier_a",
    "sellmeier_b1",
    "sellmeier_b2",
    "sellmeier_b3",
    "sellmeier_c1",
    "sellmeier_c2",
    "sellmeier_c3",
    "sellmeier_lambda_min",
    "sellmeier_lambda_max",
    "puc_calibration_power",
    "puc_calibration_length",
];

const REQUIRED_KEYS: &[&str] = &[
    "chi2",
    "d_eff",
    "radius",
    "lambda_p",
    "lambda_s",
    "lambda_i",
    "lambda_sfg1",
    "lambda_sfg2",
    "a_eff",
    "a_p",
    "a_s",
    "a_i",
    "a_sfg1",
    "a_sfg2",
];

const SELLMEIER_KEYS: &[&str] = &[
    "sellmeier_a",
    "sellmeier_b1",
    "sellmeier_b2",
    "sellmeier_b3",
    "sellmeier_c1",
    "sellmeier_c2",
    "sellmeier_c3",
    "sellmeier_lambda_min",
    "sellmeier_lambda_max",
    "sellmeier_source",
];

struct RawConfig {
    strings: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.strings.get(key) {
            None => Ok(None),
            Some((raw, line)) => {
                let value: f64 = raw.parse().map_err(|_| Error::ConfigParse {
                    line: *line,
                    message: format!("`{raw}` is not a number for key `{key}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::ConfigParse {
                        line: *line,
                        message: format!("`{key}` must be finite, got {raw}"),
                    });
                }
                Ok(Some(value))
            }
        }
    }
}

fn scan(text: &str) -> Result<RawConfig> {
    let mut strings = BTreeMap::new();
    for (offset, raw) in text.lines().enumerate() {
        let line = offset + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::ConfigParse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key != "sellmeier_source" && !FLOAT_KEYS.contains(&key) {
            return Err(Error::ConfigParse {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::ConfigParse {
                line,
                message: format!("key `{key}` has no value"),
            });
        }
        if strings.insert(key.to_owned(), (value.to_owned(), line)).is_some() {
            return Err(Error::ConfigParse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(RawConfig { strings })
}

fn build_sellmeier(raw: &RawConfig) -> Result<Option<SellmeierCoefficients>> {
    let present: Vec<&str> = SELLMEIER_KEYS
        .iter()
        .copied()
        .filter(|k| raw.strings.contains_key(*k))
        .collect();
    if present.is_empty() {
        return Ok(None);
    }
    if present.len() != SELLMEIER_KEYS.len() {
        let absent: Vec<&str> = SELLMEIER_KEYS
            .iter()
            .copied()
            .filter(|k| !raw.strings.contains_key(*k))
            .collect();
        return Err(Error::ConfigInvalid {
            message: format!(
                "sellmeier keys are all-or-nothing; missing {}",
                absent.join(", ")
            ),
        });
    }
    let get = |key: &str| -> Result<f64> { Ok(raw.float(key)?.expect("presence checked")) };
    Ok(Some(SellmeierCoefficients {
        a: get("sellmeier_a")?,
        terms: vec![
            (get("sellmeier_b1")?, get("sellmeier_c1")?),
            (get("sellmeier_b2")?, get("sellmeier_c2")?),
            (get("sellmeier_b3")?, get("sellmeier_c3")?),
        ],
        lambda_min: get("sellmeier_lambda_min")?,
        lambda_max: get("sellmeier_lambda_max")?,
        source: raw.strings["sellmeier_source"].0.clone(),
    }))
}

/// Parse a config file. Returns the resolved config plus any soft warnings
/// from [`DeviceConfig::validate`].
pub fn parse_device_config(text: &str) -> Result<(DeviceConfig, Vec<ConfigWarning>)> {
    let raw = scan(text)?;
    let sellmeier = build_sellmeier(&raw)?;

    let mut missing: Vec<String> = Vec::new();
    let mut need = |key: &str| -> Result<f64> {
        match raw.float(key)? {
            Some(v) => Ok(v),
            None => {
                missing.push(key.to_owned());
                Ok(f64::NAN)
            }
        }
    };
    let chi2 = need("chi2")?;
    let d_eff = need("d_eff")?;
    let radius = need("radius")?;
    let lambda_p = need("lambda_p")?;
    let lambda_s = need("lambda_s")?;
    let lambda_i = need("lambda_i")?;
    let lambda_sfg1 = need("lambda_sfg1")?;
    let lambda_sfg2 = need("lambda_sfg2")?;
    let a_eff = need("a_eff")?;
    let a_p = need("a_p")?;
    let a_s = need("a_s")?;
    let a_i = need("a_i")?;
    let a_sfg1 = need("a_sfg1")?;
    let a_sfg2 = need("a_sfg2")?;
    debug_assert_eq!(REQUIRED_KEYS.len(), 14);

    // indices: explicit value, else material model at that band's wavelength
    let mut index_at = |key: &str, lambda: f64| -> Result<f64> {
        if let Some(explicit) = raw.float(key)? {
            return Ok(explicit);
        }
        match &sellmeier {
            Some(coeffs) if lambda.is_finite() => sellmeier_index(coeffs, lambda),
            _ => {
                missing.push(key.to_owned());
                Ok(f64::NAN)
            }
        }
    };
    let n_p = index_at("n_p", lambda_p)?;
    let n_s = index_at("n_s", lambda_s)?;
    let n_i = index_at("n_i", lambda_i)?;
    let n_sfg1 = index_at("n_sfg1", lambda_sfg1)?;
    let n_sfg2 = index_at("n_sfg2", lambda_sfg2)?;

    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::ConfigMissingKeys { keys: missing });
    }

    let puc_calibration = match (
        raw.float("puc_calibration_power")?,
        raw.float("puc_calibration_length")?,
    ) {
        (None, None) => None,
        (Some(power), Some(length)) => Some(PucCalibration { power, length }),
        _ => {
            return Err(Error::ConfigInvalid {
                message: "puc_calibration_power and puc_calibration_length \
                          must be given together"
                    .to_owned(),
            });
        }
    };

    let config = DeviceConfig {
        chi2,
        d_eff,
        radius,
        lambda_p,
        lambda_s,
        lambda_i,
        lambda_sfg1,
        lambda_sfg2,
        n_p,
        n_s,
        n_i,
        n_sfg1,
        n_sfg2,
        a_eff,
        a_p,
        a_s,
        a_i,
        a_sfg1,
        a_sfg2,
        sellmeier,
        puc_calibration,
    };
    let warnings = config.validate()?;
    Ok((config, warnings))
}
