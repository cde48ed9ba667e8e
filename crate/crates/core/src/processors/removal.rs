use super::{Justification, ProcError, ProcessorResult};
use crate::adp::AdpProblem;

/// Tag a problem whose distributions are all trivial as classical. The
/// problem itself is unchanged; the proof records its `(dp, np)` view.
pub fn proc_probability_removal(p: &AdpProblem) -> Result<ProcessorResult, ProcError> {
    if let Some(i) = p.adps().iter().position(|a| !a.rhs.is_trivial()) {
        return Err(ProcError::NontrivialDistribution(i));
    }
    let dps = p.dp().map_err(|_| ProcError::NontrivialDistribution(0))?;
    Ok(ProcessorResult {
        children: vec![p.clone().with_classical(true)],
        justification: Justification::ProbabilityRemoval { dps, np: p.np().rules().to_vec() },
    })
}
