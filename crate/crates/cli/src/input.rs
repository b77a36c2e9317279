use anyhow::{anyhow, bail, Result};
use serde::Deserialize;

use interkernel::classifier::OperatorModel;
use interkernel::couples::DyadicGrid;
use interkernel::worked::{hardy_model, hardy_product_model, strip_model, HardyModel, StripModel};

/// A model as written in an input file or `--json`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Hardy(HardyModel),
    HardyProduct { factors: Vec<HardyModel> },
    Strip(StripModel),
    Custom { operator: OperatorModel },
}

impl ModelSpec {
    pub fn build(&self, grid: DyadicGrid) -> Result<OperatorModel> {
        let m = match self {
            Self::Hardy(h) => hardy_model(h)?,
            Self::HardyProduct { factors } => hardy_product_model(factors, grid)?,
            Self::Strip(s) => strip_model(s, grid)?,
            Self::Custom { operator } => {
                operator.validate()?;
                operator.clone()
            }
        };
        Ok(m)
    }
}

pub fn parse_model_json(text: &str) -> Result<ModelSpec> {
    serde_json::from_str(text).map_err(|e| anyhow!("invalid model description: {e}"))
}

/// `a0=..,ainf=..,b0=..,binf=..` with `p` from its own flag.
pub fn parse_hardy(spec: &str, p: f64) -> Result<HardyModel> {
    let (mut a0, mut ai, mut b0, mut bi) = (None, None, None, None);
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("--hardy: expected key=value, got `{part}`"))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|e| anyhow!("--hardy: field `{key}`: {e}"))?;
        let slot = match key.trim() {
            "a0" => &mut a0,
            "ainf" | "a_inf" => &mut ai,
            "b0" => &mut b0,
            "binf" | "b_inf" => &mut bi,
            other => bail!("--hardy: unknown field `{other}`"),
        };
        *slot = Some(v);
    }
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("--hardy: missing field `{name}`"));
    Ok(HardyModel::new(
        p,
        need(a0, "a0")?,
        need(ai, "ainf")?,
        need(b0, "b0")?,
        need(bi, "binf")?,
    )?)
}

/// `a:b:step`, inclusive of `b` up to rounding.
pub fn parse_theta_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        bail!("--theta-range: expected a:b:step, got `{spec}`");
    };
    let num = |s: &str, name: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|e| anyhow!("--theta-range: field `{name}`: {e}"))
    };
    let (a, b, step) = (num(a, "a")?, num(b, "b")?, num(step, "step")?);
    if !(step > 0.0) {
        bail!("--theta-range: field `step` must be positive, got {step}");
    }
    if b < a {
        bail!("--theta-range: field `b` must not be below `a`");
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

pub fn check_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        bail!("no theta values given (use --theta or --theta-range)");
    }
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        bail!("field `theta`: {t} is not in (0, 1)");
    }
    Ok(())
}
