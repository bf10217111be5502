use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LrSchedule {
    /// lr, then lr/2 from iteration 50, then lr/4 from iteration 100.
    #[serde(rename = "halve_at_50_and_100")]
    HalveAt50And100,
    /// lr, then 0.01 from iteration 50.
    #[serde(rename = "drop_to_0.01_at_50")]
    DropTo0p01At50,
    #[serde(rename = "constant")]
    Constant,
}

pub fn lr_at(schedule: LrSchedule, lr_initial: f64, iteration: usize) -> f64 {
    match schedule {
        LrSchedule::HalveAt50And100 => match iteration {
            0..=49 => lr_initial,
            50..=99 => lr_initial / 2.0,
            _ => lr_initial / 4.0,
        },
        LrSchedule::DropTo0p01At50 => {
            if iteration < 50 {
                lr_initial
            } else {
                0.01
            }
        }
        LrSchedule::Constant => lr_initial,
    }
}

/// Point at which the caller evaluates the gradient: `params + momentum * velocity`.
pub fn lookahead(params: &[f64], velocity: &[f64], momentum: f64) -> Result<Vec<f64>> {
    check_len(params, velocity, "velocity")?;
    Ok(params
        .iter()
        .zip(velocity)
        .map(|(p, v)| p + momentum * v)
        .collect())
}

/// `v' = momentum v - lr g`, `params' = params + v'`, where `g` was taken at
/// the lookahead point.
pub fn nesterov_step(
    params: &[f64],
    velocity: &[f64],
    grad_at_lookahead: &[f64],
    lr: f64,
    momentum: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(params, velocity, "velocity")?;
    check_len(params, grad_at_lookahead, "gradient")?;
    let v: Vec<f64> = velocity
        .iter()
        .zip(grad_at_lookahead)
        .map(|(v, g)| momentum * v - lr * g)
        .collect();
    let p = params.iter().zip(&v).map(|(p, v)| p + v).collect();
    Ok((p, v))
}

fn check_len(params: &[f64], other: &[f64], what: &str) -> Result<()> {
    if params.len() != other.len() {
        return Err(Error::Usage(format!(
            "{what} has length {} but there are {} parameters",
            other.len(),
            params.len()
        )));
    }
    Ok(())
}
