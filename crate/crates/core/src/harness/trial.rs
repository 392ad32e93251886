use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Radio ids of the three reference trials; column `t` is trial `t + 1`'s
/// authorized set.
const TABLE: [[&str; 3]; 6] = [
    ["MS63A7", "MS637D", "MSC2FF"],
    ["MS63A9", "MS9993", "MSDAC5"],
    ["MS66E7", "MSDAB9", "MSDDC7"],
    ["MS6373", "MSDAC9", "MSDF5B"],
    ["MS6387", "MSDADB", "MSDF7D"],
    ["MSD905", "MSDDBF", "MSDF65"],
];

pub const AUTHORIZED_PER_TRIAL: usize = 6;
pub const ROGUES_PER_TRIAL: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trial_id: u32,
    pub authorized_ids: Vec<String>,
    pub rogue_ids: Vec<String>,
}

impl TrialConfig {
    pub fn new(trial_id: u32, authorized_ids: Vec<String>, rogue_ids: Vec<String>) -> Result<Self> {
        let t = Self {
            trial_id,
            authorized_ids,
            rogue_ids,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.authorized_ids.len() != AUTHORIZED_PER_TRIAL || self.rogue_ids.len() != ROGUES_PER_TRIAL {
            return Err(Error::InvalidParams(format!(
                "trial {} needs {AUTHORIZED_PER_TRIAL} authorized and {ROGUES_PER_TRIAL} rogue radios, got {} and {}",
                self.trial_id,
                self.authorized_ids.len(),
                self.rogue_ids.len()
            )));
        }
        let mut all: Vec<&String> = self.authorized_ids.iter().chain(&self.rogue_ids).collect();
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!(
                "trial {} lists a radio twice or as both authorized and rogue",
                self.trial_id
            )));
        }
        Ok(())
    }

    /// The 18 radio ids in table order (trial 1's six, then trial 2's, ...).
    pub fn reference_radio_ids() -> Vec<String> {
        (0..3)
            .flat_map(|t| TABLE.iter().map(move |row| row[t].to_string()))
            .collect()
    }

    /// Trials 1-3: each column authorized, the other two columns rogue.
    pub fn reference_trials() -> Vec<TrialConfig> {
        (0..3)
            .map(|t| {
                let col = |c: usize| TABLE.iter().map(move |row| row[c].to_string());
                let rogue_ids = (0..3).filter(|&c| c != t).flat_map(col).collect();
                TrialConfig {
                    trial_id: t as u32 + 1,
                    authorized_ids: col(t).collect(),
                    rogue_ids,
                }
            })
            .collect()
    }

    /// Authorized radios other than `claimed`, in trial order.
    pub fn others(&self, claimed: &str) -> Result<Vec<String>> {
        if !self.authorized_ids.iter().any(|a| a == claimed) {
            return Err(Error::InvalidInput(format!(
                "{claimed} is not authorized in trial {}",
                self.trial_id
            )));
        }
        Ok(self.authorized_ids.iter().filter(|a| *a != claimed).cloned().collect())
    }
}
