use super::{assign_ranks, moment_column, studentized, ScreenStat, StatFlag};
use crate::dataset::Dataset;
use crate::el::{solve_lambda_uni, ElConfig};
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Marginal EL ratio `l_j(0)` of `g_ij = X_ij y_i` for every feature.
///
/// Features whose products put zero outside the hull get `+inf`; features whose
/// statistic is undefined are flagged `Degenerate` and ranked last.
pub fn marginal_el_stats(data: &Dataset, config: &ElConfig) -> Result<Vec<ScreenStat>> {
    data.require_standardized()?;
    config.validate()?;
    let mut stats = (0..data.p())
        .into_par_iter()
        .map(|j| {
            let g = moment_column(data, j);
            let tb = studentized(&g);
            match solve_lambda_uni(&g, config) {
                Ok(sol) => Ok(ScreenStat::new(j, Some(sol.log_ratio), tb)),
                Err(Error::DegenerateInput(_)) => {
                    let mut s = ScreenStat::new(j, None, tb);
                    s.flag = Some(StatFlag::Degenerate);
                    Ok(s)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    assign_ranks(&mut stats);
    Ok(stats)
}
