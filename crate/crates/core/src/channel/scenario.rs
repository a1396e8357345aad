use serde::{Deserialize, Serialize};

use super::{ArrayConfig, MultipathChannel, PathParams};
use crate::error::Result;
use crate::scalar::{cast, to_f64, Real, C};

/// JSON form of a channel: `{array:{mt,spacing}, sample_rate_hz, paths:[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelScenario {
    pub array: ArrayScenario,
    pub sample_rate_hz: f64,
    pub paths: Vec<PathScenario>,
    /// Fractional-delay interpolator half length; 32 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interp_half_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayScenario {
    pub mt: usize,
    #[serde(default = "half")]
    pub spacing: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathScenario {
    pub gain_re: f64,
    pub gain_im: f64,
    pub delay_s: f64,
    pub doppler_hz: f64,
    pub aod: f64,
}

impl ChannelScenario {
    pub fn to_channel<T: Real>(&self) -> Result<MultipathChannel<T>> {
        let array = ArrayConfig::new(self.array.mt, cast(self.array.spacing))?;
        let paths = self
            .paths
            .iter()
            .map(|p| {
                PathParams::new(
                    C::new(cast(p.gain_re), cast(p.gain_im)),
                    cast(p.delay_s),
                    cast(p.doppler_hz),
                    cast(p.aod),
                )
            })
            .collect();
        let ch = MultipathChannel::new(array, paths, cast(self.sample_rate_hz))?;
        match self.interp_half_len {
            Some(h) => ch.with_interp_half_len(h),
            None => Ok(ch),
        }
    }

    pub fn from_channel<T: Real>(ch: &MultipathChannel<T>) -> Self {
        let h = ch.interp_half_len();
        Self {
            array: ArrayScenario {
                mt: ch.array().num_tx,
                spacing: to_f64(ch.array().spacing),
            },
            sample_rate_hz: to_f64(ch.sample_rate()),
            paths: ch
                .paths()
                .iter()
                .map(|p| PathScenario {
                    gain_re: to_f64(p.gain.re),
                    gain_im: to_f64(p.gain.im),
                    delay_s: to_f64(p.delay),
                    doppler_hz: to_f64(p.doppler),
                    aod: to_f64(p.aod),
                })
                .collect(),
            interp_half_len: (h != super::DEFAULT_INTERP_HALF_LEN).then_some(h),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_uses_exact_field_names() {
        let text = r#"{"array":{"mt":4,"spacing":0.5},"sample_rate_hz":1e6,
            "paths":[{"gain_re":1.0,"gain_im":0.0,"delay_s":0.0,"doppler_hz":10.0,"aod":0.25}]}"#;
        let sc: ChannelScenario = serde_json::from_str(text).unwrap();
        let ch = sc.to_channel::<f64>().unwrap();
        assert_eq!(ch.num_paths(), 1);
        let back = ChannelScenario::from_channel(&ch);
        assert_eq!(back, sc);
        let json = serde_json::to_string(&back).unwrap();
        assert!(json.contains("\"sample_rate_hz\"") && json.contains("\"doppler_hz\""));
        assert!(!json.contains("interp_half_len"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"array":{"mt":4},"sample_rate_hz":1.0,"paths":[],"extra":1}"#;
        assert!(serde_json::from_str::<ChannelScenario>(text).is_err());
    }
}
