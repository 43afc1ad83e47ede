use std::fmt;
use std::str::FromStr;

use crate::baselines::AblationVariant;
use crate::error::{Error, Result};
use crate::event::CHANNELS;

/// How a sampled position places the zoomed donor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorMode {
    /// The anchor is the center of the donor's footprint.
    #[default]
    Center,
    /// The anchor is the donor's top-left corner.
    TopLeft,
}

impl FromStr for AnchorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(AnchorMode::Center),
            "top_left" => Ok(AnchorMode::TopLeft),
            other => Err(Error::InvalidConfig(format!(
                "unknown anchor mode {other:?}"
            ))),
        }
    }
}

impl fmt::Display for AnchorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorMode::Center => "center",
            AnchorMode::TopLeft => "top_left",
        })
    }
}

/// Which label a consumer should train on. Both are always written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    PerStep,
    #[default]
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    EventZoom,
    Mixup,
    CutMix,
    EventMix,
    EventDrop,
    Ablation(AblationVariant),
}

impl Strategy {
    /// Every stable strategy token, in display order.
    pub fn all() -> Vec<Strategy> {
        let mut v = vec![
            Strategy::EventZoom,
            Strategy::Mixup,
            Strategy::CutMix,
            Strategy::EventMix,
            Strategy::EventDrop,
        ];
        v.extend(
            AblationVariant::PRESETS
                .iter()
                .map(|&(_, a)| Strategy::Ablation(a)),
        );
        v
    }

    /// Number of donors this strategy embeds for a given mixnum.
    pub fn donors_needed(&self, mixnum: usize) -> usize {
        match self {
            Strategy::EventZoom => mixnum,
            Strategy::EventDrop => 0,
            _ => 1,
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eventzoom" => Ok(Strategy::EventZoom),
            "mixup" => Ok(Strategy::Mixup),
            "cutmix" => Ok(Strategy::CutMix),
            "eventmix" => Ok(Strategy::EventMix),
            "eventdrop" => Ok(Strategy::EventDrop),
            _ => s
                .strip_prefix("ablation:")
                .and_then(AblationVariant::from_name)
                .map(Strategy::Ablation)
                .ok_or_else(|| Error::UnknownStrategy(s.to_string())),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::EventZoom => f.write_str("eventzoom"),
            Strategy::Mixup => f.write_str("mixup"),
            Strategy::CutMix => f.write_str("cutmix"),
            Strategy::EventMix => f.write_str("eventmix"),
            Strategy::EventDrop => f.write_str("eventdrop"),
            Strategy::Ablation(v) => write!(f, "ablation:{}", v.name()),
        }
    }
}

/// All tunables of an augmentation run.
#[derive(Debug, Clone, PartialEq)]
pub struct AugConfig {
    pub mixnum: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub bins: usize,
    pub height: usize,
    pub width: usize,
    pub anchor_mode: AnchorMode,
    pub strategy: Strategy,
    pub master_seed: u64,
    pub label_mode: LabelMode,
    /// Beta(alpha, alpha) shape for the mixup weight.
    pub mixup_alpha: f64,
    /// Per-event drop probability for `eventdrop`.
    pub drop_ratio: f64,
}

impl Default for AugConfig {
    fn default() -> Self {
        AugConfig {
            mixnum: 1,
            lambda_min: 0.5,
            lambda_max: 1.5,
            bins: 8,
            height: 48,
            width: 48,
            anchor_mode: AnchorMode::Center,
            strategy: Strategy::EventZoom,
            master_seed: 0,
            label_mode: LabelMode::Averaged,
            mixup_alpha: 1.0,
            drop_ratio: 0.1,
        }
    }
}

impl AugConfig {
    pub fn channels(&self) -> usize {
        CHANNELS
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_min must be > 0, got {}",
                self.lambda_min
            )));
        }
        if !(self.lambda_min <= self.lambda_max) || !self.lambda_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "lambda_min {} exceeds lambda_max {}",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.bins == 0 || self.height == 0 || self.width == 0 {
            return Err(Error::InvalidConfig(
                "bins and geometry must be positive".into(),
            ));
        }
        if !(self.mixup_alpha > 0.0) {
            return Err(Error::InvalidConfig("mixup_alpha must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.drop_ratio) {
            return Err(Error::RatioOutOfRange(self.drop_ratio));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_tokens_round_trip() {
        for s in Strategy::all() {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!(Strategy::all().len(), 13);
    }

    #[test]
    fn unknown_strategy() {
        assert!(matches!(
            "zoomy".parse::<Strategy>(),
            Err(Error::UnknownStrategy(_))
        ));
        assert!("ablation:XX".parse::<Strategy>().is_err());
    }

    #[test]
    fn default_config() {
        let c = AugConfig::default();
        assert_eq!((c.lambda_min, c.lambda_max), (0.5, 1.5));
        assert_eq!((c.bins, c.height, c.width, c.mixnum), (8, 48, 48, 1));
        c.validate().unwrap();
    }

    #[test]
    fn invalid_lambda_bounds() {
        let c = AugConfig {
            lambda_min: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = AugConfig {
            lambda_min: 2.0,
            lambda_max: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
