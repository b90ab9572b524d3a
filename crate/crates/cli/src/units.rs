use anyhow::{bail, Context, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Unit {
    Hz,
    KHz,
    MHz,
}

impl Unit {
    pub fn factor(self) -> f64 {
        match self {
            Unit::Hz => 1.0,
            Unit::KHz => 1e3,
            Unit::MHz => 1e6,
        }
    }
}

/// Parses `170kHz`, `-2.5 MHz`, `3e6` into Hz. Bare numbers use `bare`.
pub fn parse_freq(s: &str, bare: Unit) -> Result<f64> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let (num, factor) = [("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)]
        .iter()
        .find_map(|(suf, f)| lower.strip_suffix(suf).map(|n| (n.trim().to_string(), *f)))
        .unwrap_or((lower.clone(), bare.factor()));
    let v: f64 = num.parse().with_context(|| format!("cannot read frequency `{s}`"))?;
    if !v.is_finite() {
        bail!("frequency `{s}` is not finite");
    }
    Ok(v * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(parse_freq("170kHz", Unit::Hz).unwrap(), 170e3);
        assert_eq!(parse_freq("-2.5 MHz", Unit::Hz).unwrap(), -2.5e6);
        assert_eq!(parse_freq("3e6", Unit::Hz).unwrap(), 3e6);
        assert_eq!(parse_freq("300", Unit::KHz).unwrap(), 300e3);
        assert_eq!(parse_freq("12hz", Unit::MHz).unwrap(), 12.0);
        assert!(parse_freq("fast", Unit::Hz).is_err());
        assert!(parse_freq("inf", Unit::Hz).is_err());
    }
}
