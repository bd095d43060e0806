//! File formats: JSON states and bases, CSV squeezing scans.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gbs_core::hilbert::StateVector;
use gbs_core::squeezing::SqueezeRow;
use gbs_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Amplitude {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

pub fn amplitudes(state: &StateVector) -> Vec<Amplitude> {
    state.amplitudes().iter().map(|&z| z.into()).collect()
}

/// `{"N": .., "p": .., "phi": .., "amplitudes": [{"re": .., "im": ..}, ..]}`.
/// `p` and `phi` may be absent for states that are not GBSs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<f64>,
    pub amplitudes: Vec<Amplitude>,
}

impl StateFile {
    pub fn state(&self) -> Result<StateVector> {
        if self.amplitudes.is_empty() {
            bail!("field `amplitudes` is empty");
        }
        for (i, a) in self.amplitudes.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                bail!("field `amplitudes[{i}]` is not finite");
            }
        }
        Ok(StateVector::new(self.amplitudes.iter().map(|a| Complex64::new(a.re, a.im)).collect())?)
    }
}

pub fn read_state_file(path: &Path) -> Result<StateFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed state file {}", path.display()))
}

/// Writes `text` to `out`, or to standard output when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits; negative zero is printed as zero.
pub fn fixed(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub fn squeeze_csv(rows: &[SqueezeRow]) -> String {
    let mut s = String::from("N,p,phi,S_X,S_P\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.n, fixed(r.p), fixed(r.phi), fixed(r.s_x), fixed(r.s_p)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_floats() {
        assert_eq!(fixed(0.5), "5.0000000000000000e-1");
        assert_eq!(fixed(-0.0), "0.0000000000000000e0");
        assert_eq!(fixed(-4.0), "-4.0000000000000000e0");
        assert_eq!(fixed(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn state_file_round_trip() {
        let file = StateFile {
            n: Some(1),
            p: Some(0.3),
            phi: None,
            amplitudes: vec![Amplitude { re: 0.1, im: -1.0 / 3.0 }, Amplitude { re: 2f64.sqrt(), im: 0.0 }],
        };
        let text = to_json(&file).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let err = serde_json::from_str::<StateFile>("{\"N\": 1, \"amplitudes\": [{\"re\": 1}]}").unwrap_err();
        assert!(err.to_string().contains("missing field `im`"), "{err}");
        assert!(err.to_string().contains("line 1"));
        let empty: StateFile = serde_json::from_str("{\"N\": 0, \"amplitudes\": []}").unwrap();
        assert!(empty.state().is_err());
    }
}
