use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    /// `k^l` for an action first appearing at layer `l`.
    Layer(f64),
    HAdd,
    HMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IntegralityPolicy {
    Minimal,
    FirstLayer,
    PropGoalAchievers,
    NumGoalAchievers,
    All,
}

impl IntegralityPolicy {
    pub fn rank(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeuristicMode {
    LpRpg,
    MetricFf,
    MetricFfSapa,
    /// LP extraction over a graph whose bounds allow unlimited applications per layer.
    LpRpgFf,
    Blind,
}

impl HeuristicMode {
    pub fn uses_lp(self) -> bool {
        matches!(self, HeuristicMode::LpRpg | HeuristicMode::LpRpgFf)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicConfig {
    pub mode: HeuristicMode,
    pub weight: WeightScheme,
    pub ints: IntegralityPolicy,
    pub lp_prop_goals: bool,
    pub lp_landmarks: bool,
    pub lp_all_props: bool,
    pub lp_num_goal_conjunct: bool,
    pub lp_budget: usize,
    pub layer_cap: usize,
    pub count_cap: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            mode: HeuristicMode::LpRpg,
            weight: WeightScheme::Layer(3.0),
            ints: IntegralityPolicy::FirstLayer,
            lp_prop_goals: true,
            lp_landmarks: true,
            lp_all_props: false,
            lp_num_goal_conjunct: true,
            lp_budget: 500,
            layer_cap: 200,
            count_cap: 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("landmarks in the LP require propositional goals in the LP")]
    LandmarksWithoutGoals,
    #[error("the all-propositions encoding requires landmarks in the LP")]
    AllPropsWithoutLandmarks,
    #[error("layer weight must be at least 1, got {0}")]
    BadLayerWeight(f64),
    #[error("unknown value '{0}'")]
    Unknown(String),
}

impl HeuristicConfig {
    pub fn metricff() -> Self {
        HeuristicConfig {
            mode: HeuristicMode::MetricFf,
            ..Self::default()
        }
    }

    pub fn with_mode(mode: HeuristicMode) -> Self {
        HeuristicConfig {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let WeightScheme::Layer(k) = self.weight {
            if !(k >= 1.0) {
                return Err(ConfigError::BadLayerWeight(k));
            }
        }
        if self.lp_landmarks && !self.lp_prop_goals {
            return Err(ConfigError::LandmarksWithoutGoals);
        }
        if self.lp_all_props && !self.lp_landmarks {
            return Err(ConfigError::AllPropsWithoutLandmarks);
        }
        Ok(())
    }

    /// Short stable description used in statistics output.
    pub fn fingerprint(&self) -> String {
        format!(
            "{}/{}/{}/{}{}{}{}",
            self.mode,
            self.weight,
            self.ints,
            if self.lp_prop_goals { "G" } else { "-" },
            if self.lp_landmarks { "L" } else { "-" },
            if self.lp_all_props { "P" } else { "-" },
            if self.lp_num_goal_conjunct { "N" } else { "-" },
        )
    }
}

impl fmt::Display for HeuristicMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicMode::LpRpg => "lprpg",
            HeuristicMode::MetricFf => "metricff",
            HeuristicMode::MetricFfSapa => "metricff-sapa",
            HeuristicMode::LpRpgFf => "lprpg-ff",
            HeuristicMode::Blind => "blind",
        })
    }
}

impl FromStr for HeuristicMode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "lprpg" => HeuristicMode::LpRpg,
            "metricff" => HeuristicMode::MetricFf,
            "metricff-sapa" => HeuristicMode::MetricFfSapa,
            "lprpg-ff" => HeuristicMode::LpRpgFf,
            "blind" => HeuristicMode::Blind,
            _ => return Err(ConfigError::Unknown(s.to_string())),
        })
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Layer(k) => write!(f, "k:{k}"),
            WeightScheme::HAdd => f.write_str("hadd"),
            WeightScheme::HMax => f.write_str("hmax"),
        }
    }
}

impl FromStr for WeightScheme {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hadd" => Ok(WeightScheme::HAdd),
            "hmax" => Ok(WeightScheme::HMax),
            _ => {
                let k = s
                    .strip_prefix("k:")
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| ConfigError::Unknown(s.to_string()))?;
                if !(k >= 1.0) {
                    return Err(ConfigError::BadLayerWeight(k));
                }
                Ok(WeightScheme::Layer(k))
            }
        }
    }
}

impl fmt::Display for IntegralityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegralityPolicy::Minimal => "minimal",
            IntegralityPolicy::FirstLayer => "first-layer",
            IntegralityPolicy::PropGoalAchievers => "prop-goal",
            IntegralityPolicy::NumGoalAchievers => "num-goal",
            IntegralityPolicy::All => "all",
        })
    }
}

impl FromStr for IntegralityPolicy {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "minimal" => IntegralityPolicy::Minimal,
            "first-layer" => IntegralityPolicy::FirstLayer,
            "prop-goal" => IntegralityPolicy::PropGoalAchievers,
            "num-goal" => IntegralityPolicy::NumGoalAchievers,
            "all" => IntegralityPolicy::All,
            _ => return Err(ConfigError::Unknown(s.to_string())),
        })
    }
}
