use serde::{Deserialize, Serialize};

use super::{apply_switch, switch_from_gadget_half, Direction, PartialEmbedding, Switch};
use crate::error::{Error, Result};
use crate::gadgetry::Gadget;
use crate::hypercore::{Partition, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceFlip {
    pub pool: usize,
    pub gadget: usize,
    /// Change of |leftover ∩ B|.
    pub delta_b: i64,
    pub skew_after: i64,
}

#[derive(Clone, Debug)]
pub struct BalanceRun {
    pub pe: PartialEmbedding,
    pub skew_before: i64,
    pub flips: Vec<BalanceFlip>,
    pub switches: Vec<Switch>,
    /// Pool gadgets whose switch was refused, with the reason.
    pub skipped: Vec<(usize, usize, String)>,
}

/// |U ∩ A| - |U ∩ B| for the free vertices U of `pe`.
pub fn leftover_skew(pe: &PartialEmbedding, part: &Partition) -> i64 {
    pe.free().iter().map(|&v| if part.in_a(v) { 1 } else { -1 }).sum()
}

fn side_balance(xs: &[Vertex], part: &Partition) -> i64 {
    xs.iter().map(|&v| if part.in_a(v) { 1 } else { -1 }).sum()
}

/// Flips gadgets from the two pools, each of whose L1 is immersed in `pe`,
/// until the leftover satisfies |U ∩ A| = |U ∩ B| ± 2. A flip hands X1 back
/// to the leftover and takes X2 from it, so a gadget with X1 ⊆ A and X2 ⊆ B
/// of size two moves the skew by +4.
pub fn balance_leftover(pe: &PartialEmbedding, pools: &[Vec<Gadget>; 2], part: &Partition) -> Result<BalanceRun> {
    let skew_before = leftover_skew(pe, part);
    let mut run =
        BalanceRun { pe: pe.clone(), skew_before, flips: Vec::new(), switches: Vec::new(), skipped: Vec::new() };
    let mut spent = [vec![false; pools[0].len()], vec![false; pools[1].len()]];
    let mut skew = skew_before;
    while skew.abs() > 2 {
        let mut progressed = false;
        'pools: for p in 0..2 {
            for (i, g) in pools[p].iter().enumerate() {
                if spent[p][i] {
                    continue;
                }
                let delta = side_balance(&g.x1, part) - side_balance(&g.x2, part);
                if (skew + delta).abs() >= skew.abs() {
                    continue;
                }
                spent[p][i] = true;
                let sw = match switch_from_gadget_half(&run.pe, g, Direction::Forward) {
                    Ok(sw) => sw,
                    Err(e) => {
                        run.skipped.push((p, i, e.to_string()));
                        continue;
                    }
                };
                let next = match apply_switch(&run.pe, &sw) {
                    Ok(next) => next,
                    Err(e) => {
                        run.skipped.push((p, i, e.to_string()));
                        continue;
                    }
                };
                let b_before = run.pe.free().iter().filter(|&&v| !part.in_a(v)).count() as i64;
                let b_after = next.free().iter().filter(|&&v| !part.in_a(v)).count() as i64;
                skew = leftover_skew(&next, part);
                run.flips.push(BalanceFlip { pool: p, gadget: i, delta_b: b_after - b_before, skew_after: skew });
                run.switches.push(sw);
                run.pe = next;
                progressed = true;
                break 'pools;
            }
        }
        if !progressed {
            return Err(Error::PoolsExhausted { skew });
        }
    }
    Ok(run)
}
