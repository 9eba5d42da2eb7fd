//! Quantities with unit suffixes, e.g. `"1064 nm"`, `"6.7 cm"`, `"211 kHz"`,
//! `"dminus + 20 lambda"`.

use optomech::superscatterer::SpacingRule;

/// A length given either absolutely or in units of the reference wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Metres(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn in_wavelengths(self, lambda0: f64) -> f64 {
        match self {
            Length::Metres(m) => m / lambda0,
            Length::Wavelengths(w) => w,
        }
    }
}

fn split(text: &str) -> Result<(f64, String), String> {
    let t = text.trim();
    let idx = t
        .char_indices()
        .find(|&(i, c)| c.is_alphabetic() && !(matches!(c, 'e' | 'E') && is_exponent(t, i)))
        .map_or(t.len(), |(i, _)| i);
    let (num, unit) = t.split_at(idx);
    let value = num.trim().parse::<f64>().map_err(|_| format!("cannot read a number from {text:?}"))?;
    Ok((value, unit.trim().to_string()))
}

// `e` directly after a digit and followed by a digit or sign is an exponent
fn is_exponent(t: &str, i: usize) -> bool {
    let before = t[..i].chars().last().is_some_and(|c| c.is_ascii_digit() || c == '.');
    let after = t[i + 1..].chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+');
    before && after
}

pub fn parse_length(text: &str) -> Result<Length, String> {
    let (v, unit) = split(text)?;
    let scale = match unit.as_str() {
        "lambda" | "λ" | "wavelengths" => return Ok(Length::Wavelengths(v)),
        "m" => 1.0,
        "cm" => 1e-2,
        "mm" => 1e-3,
        "um" | "µm" => 1e-6,
        "nm" => 1e-9,
        "pm" => 1e-12,
        "fm" => 1e-15,
        "" => return Err(format!("length {text:?} needs a unit (m, cm, mm, um, nm, pm, fm, lambda)")),
        other => return Err(format!("unknown length unit {other:?} in {text:?}")),
    };
    Ok(Length::Metres(v * scale))
}

/// Absolute length in metres; wavelength units are rejected.
pub fn parse_metres(text: &str) -> Result<f64, String> {
    match parse_length(text)? {
        Length::Metres(m) => Ok(m),
        Length::Wavelengths(_) => Err(format!("{text:?} must be an absolute length")),
    }
}

/// Ordinary frequency in Hz.
pub fn parse_frequency(text: &str) -> Result<f64, String> {
    let (v, unit) = split(text)?;
    let scale = match unit.as_str() {
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "" => return Err(format!("frequency {text:?} needs a unit (Hz, kHz, MHz, GHz)")),
        other => return Err(format!("unknown frequency unit {other:?} in {text:?}")),
    };
    Ok(v * scale)
}

pub fn parse_temperature(text: &str) -> Result<f64, String> {
    let (v, unit) = split(text)?;
    match unit.as_str() {
        "K" => Ok(v),
        "mK" => Ok(v * 1e-3),
        "" => Err(format!("temperature {text:?} needs a unit (K, mK)")),
        other => Err(format!("unknown temperature unit {other:?} in {text:?}")),
    }
}

/// `d0`, `dplus`, `dminus`, optionally `+ <length>`, or an explicit length.
pub fn parse_spacing(text: &str, lambda0: f64) -> Result<SpacingRule, String> {
    let t = text.trim();
    let (head, tail) = match t.split_once('+') {
        Some((h, rest)) if h.trim().starts_with('d') => (h.trim(), Some(rest.trim())),
        _ => (t, None),
    };
    let extra = match tail {
        Some(s) => parse_length(s)?.in_wavelengths(lambda0),
        None => 0.0,
    };
    match head {
        "d0" => Ok(SpacingRule::D0 { extra }),
        "dplus" => Ok(SpacingRule::DPlus { extra }),
        "dminus" => Ok(SpacingRule::DMinus { extra }),
        _ if head.starts_with('d') => Err(format!("unknown spacing {head:?}; use d0, dplus, dminus or a length")),
        _ => Ok(SpacingRule::Explicit(parse_length(t)?.in_wavelengths(lambda0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(parse_length("1064 nm").unwrap(), Length::Metres(1064e-9));
        assert_eq!(parse_length("6.7cm").unwrap(), Length::Metres(0.067));
        assert_eq!(parse_length("6.3e4 lambda").unwrap(), Length::Wavelengths(6.3e4));
        assert_eq!(parse_length("1e-3 λ").unwrap(), Length::Wavelengths(1e-3));
        assert!((parse_metres("2.7 fm").unwrap() - 2.7e-15).abs() < 1e-30);
        assert!(parse_length("12").is_err());
        assert!(parse_length("3 furlongs").is_err());
        assert!(parse_metres("3 lambda").is_err());
    }

    #[test]
    fn other_units() {
        assert_eq!(parse_frequency("211 kHz").unwrap(), 211e3);
        assert_eq!(parse_temperature("1 K").unwrap(), 1.0);
        assert!(parse_frequency("211").is_err());
    }

    #[test]
    fn spacings() {
        assert_eq!(parse_spacing("dminus + 20 lambda", 1e-6).unwrap(), SpacingRule::DMinus { extra: 20.0 });
        assert_eq!(parse_spacing("d0", 1e-6).unwrap(), SpacingRule::D0 { extra: 0.0 });
        let SpacingRule::DPlus { extra } = parse_spacing("dplus + 1 um", 0.5e-6).unwrap() else { panic!() };
        assert!((extra - 2.0).abs() < 1e-12);
        assert_eq!(parse_spacing("0.3 lambda", 1e-6).unwrap(), SpacingRule::Explicit(0.3));
        assert!(parse_spacing("dzero + 1 lambda", 1e-6).is_err());
        let SpacingRule::Explicit(d) = parse_spacing("1e+2 nm", 1e-6).unwrap() else { panic!() };
        assert!((d - 0.1).abs() < 1e-15);
    }
}
