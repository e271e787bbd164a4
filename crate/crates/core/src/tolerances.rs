//! Numerical thresholds shared by every analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `‖TL − LT‖_F ≤ comm_tol · max(‖T‖‖L‖, 1)`.
    pub comm_tol: f64,
    /// `σ_min(T) > inv_tol · ‖T‖`.
    pub inv_tol: f64,
    /// `‖Tᴺ − I‖_F / √dim ≤ cyclic_tol` in cyclic iteration.
    pub cyclic_tol: f64,
    /// Parseval: `|A − 1|, |B − 1| ≤ parseval_tol`.
    pub parseval_tol: f64,
    /// Frame: `A > frame_tol · B`.
    pub frame_tol: f64,
    /// Relative singular-value cutoff for kernels and fiber ranks.
    pub rank_tol: f64,
    /// Reducing / invariance defects of model subspaces.
    pub red_tol: f64,
    /// Projector distance below which two kernels are identified.
    pub sim_tol: f64,
    /// Relative residual allowed for intertwining certificates.
    pub cert_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            comm_tol: 1e-10,
            inv_tol: 1e-12,
            cyclic_tol: 1e-8,
            parseval_tol: 1e-8,
            frame_tol: 1e-9,
            rank_tol: 1e-10,
            red_tol: 1e-8,
            sim_tol: 1e-7,
            cert_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 9] = [
        "comm", "inv", "cyclic", "parseval", "frame", "rank", "red", "sim", "cert",
    ];

    pub fn validate(&self) -> Result<()> {
        for name in Self::NAMES {
            let value = self.get(name).expect("known name");
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance {
                    name: name.to_string(),
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "comm" => self.comm_tol,
            "inv" => self.inv_tol,
            "cyclic" => self.cyclic_tol,
            "parseval" => self.parseval_tol,
            "frame" => self.frame_tol,
            "rank" => self.rank_tol,
            "red" => self.red_tol,
            "sim" => self.sim_tol,
            "cert" => self.cert_tol,
            _ => return None,
        })
    }

    /// Override one threshold by its short name (`sim`, `rank`, ...).
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidTolerance {
                name: name.to_string(),
                value,
            });
        }
        let slot = match name {
            "comm" => &mut self.comm_tol,
            "inv" => &mut self.inv_tol,
            "cyclic" => &mut self.cyclic_tol,
            "parseval" => &mut self.parseval_tol,
            "frame" => &mut self.frame_tol,
            "rank" => &mut self.rank_tol,
            "red" => &mut self.red_tol,
            "sim" => &mut self.sim_tol,
            "cert" => &mut self.cert_tol,
            _ => {
                return Err(Error::InvalidTolerance {
                    name: name.to_string(),
                    value,
                })
            }
        };
        *slot = value;
        Ok(())
    }
}
