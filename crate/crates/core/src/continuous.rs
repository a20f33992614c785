//! Finite evaluator for the necessary statistic when X is discrete and
//! Y, Z range over the real line.
//!
//! The exact statistic takes a supremum over z and a countable Borel
//! partition of the line; here the partition is truncated to finitely
//! many cells and the supremum weakened to a maximum over a finite probe
//! set. That keeps the evaluator sound: a compatible model can never be
//! rejected, it can only slip through when the probes or cells are too
//! coarse.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::CondDist;
use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};

/// Joint cell masses P(Y ∈ B_i, X = x | Z = z) over a finite cell list and
/// probe set. `p[cell][x][probe]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTable {
    pub x_count: usize,
    pub cells: Vec<String>,
    pub probes: Vec<String>,
    pub p: Vec<Vec<Vec<Rat>>>,
}

impl PartitionTable {
    /// Shape and value checks. Each probe's total mass may fall short of 1
    /// when the listed cells truncate a countable partition; it must never
    /// exceed 1.
    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() || self.probes.is_empty() || self.x_count == 0 {
            return Err(Error::Shape(
                "partition table needs at least one cell, one probe and one x value".into(),
            ));
        }
        if self.p.len() != self.cells.len() {
            return Err(Error::Shape(format!(
                "p has {} cell layers, expected {}",
                self.p.len(),
                self.cells.len()
            )));
        }
        for (ci, layer) in self.p.iter().enumerate() {
            if layer.len() != self.x_count {
                return Err(Error::Shape(format!(
                    "cell {ci} has {} x-rows, expected {}",
                    layer.len(),
                    self.x_count
                )));
            }
            for row in layer {
                if row.len() != self.probes.len() {
                    return Err(Error::Shape(format!(
                        "cell {ci} has a row with {} probes, expected {}",
                        row.len(),
                        self.probes.len()
                    )));
                }
                for v in row {
                    if v < &Rat::zero() || v > &Rat::one() {
                        return Err(Error::Range(format!(
                            "table entry {} outside [0,1]",
                            format_rat(v)
                        )));
                    }
                }
            }
        }
        for (zi, z) in self.probes.iter().enumerate() {
            let mass = self.accounted_mass(zi);
            if mass > Rat::one() {
                return Err(Error::Range(format!(
                    "probe {z}: accounted mass {} exceeds 1",
                    format_rat(&mass)
                )));
            }
        }
        Ok(())
    }

    /// Total tabulated mass at one probe, across all cells and x values.
    pub fn accounted_mass(&self, probe: usize) -> Rat {
        let mut mass = Rat::zero();
        for layer in &self.p {
            for row in layer {
                mass += &row[probe];
            }
        }
        mass
    }

    /// True when every probe's cells account for exactly all the mass.
    pub fn is_complete(&self) -> bool {
        (0..self.probes.len()).all(|z| self.accounted_mass(z).is_one())
    }

    /// Table induced by a finite discrete distribution: cells are the y
    /// values, probes the z values. On such tables the statistic equals
    /// the max-sum-max statistic of the distribution, by definition.
    pub fn from_cond_dist(dist: &CondDist) -> PartitionTable {
        let dims = dist.dims();
        let cells = (1..=dims.m).map(|j| format!("y{j}")).collect();
        let probes = (1..=dims.l).map(|k| format!("z{k}")).collect();
        let p = (1..=dims.m)
            .map(|j| {
                (1..=dims.n)
                    .map(|i| {
                        (1..=dims.l)
                            .map(|k| dist.get(i, j, k).expect("in range").clone())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PartitionTable {
            x_count: dims.n,
            cells,
            probes,
            p,
        }
    }

    pub fn to_json(&self) -> String {
        let file = TableFile::from(self);
        serde_json::to_string_pretty(&file).expect("serializing plain data cannot fail")
    }

    pub fn parse_json(text: &str) -> Result<PartitionTable> {
        let file: TableFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("bad table JSON: {e}")))?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    x_count: usize,
    cells: Vec<String>,
    probes: Vec<String>,
    p: Vec<Vec<Vec<String>>>,
}

impl From<&PartitionTable> for TableFile {
    fn from(t: &PartitionTable) -> TableFile {
        TableFile {
            x_count: t.x_count,
            cells: t.cells.clone(),
            probes: t.probes.clone(),
            p: t
                .p
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|row| row.iter().map(format_rat).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<TableFile> for PartitionTable {
    type Error = Error;

    fn try_from(f: TableFile) -> Result<PartitionTable> {
        let p = f
            .p
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rat(s)).collect())
                    .collect::<Result<Vec<Vec<Rat>>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let table = PartitionTable {
            x_count: f.x_count,
            cells: f.cells,
            probes: f.probes,
            p,
        };
        table.validate()?;
        Ok(table)
    }
}

/// The evaluated statistic with the probe choices that achieved it.
#[derive(Clone, Debug)]
pub struct StatisticReport {
    /// max over x of Σ over cells of max over probes.
    pub statistic: Rat,
    /// Same, plus each x's bound on the unaccounted remainder cell. Equals
    /// `statistic` on complete tables.
    pub statistic_with_remainder: Rat,
    pub complete: bool,
    /// `argmax_probe[x][cell]`: which probe realized each cell maximum.
    pub argmax_probe: Vec<Vec<usize>>,
}

/// Evaluate max_x Σ_cells max_probes p, recording the maximizing probe per
/// (cell, x). A value above 1 is incompatible with the model.
pub fn theorem8_statistic(table: &PartitionTable) -> Result<StatisticReport> {
    table.validate()?;
    // Bound on the remainder cell, per probe, shared by every x.
    let remainders: Vec<Rat> = (0..table.probes.len())
        .map(|z| Rat::one() - table.accounted_mass(z))
        .collect();
    let remainder_bound = remainders
        .iter()
        .cloned()
        .max()
        .expect("at least one probe");

    let mut best: Option<Rat> = None;
    let mut best_with_rem: Option<Rat> = None;
    let mut argmax_probe = Vec::with_capacity(table.x_count);
    for x in 0..table.x_count {
        let mut sum = Rat::zero();
        let mut probes_for_x = Vec::with_capacity(table.cells.len());
        for layer in &table.p {
            let row = &layer[x];
            let (z_best, v_best) = row
                .iter()
                .enumerate()
                .max_by(|(za, va), (zb, vb)| va.cmp(vb).then(zb.cmp(za)))
                .expect("at least one probe");
            sum += v_best;
            probes_for_x.push(z_best);
        }
        let with_rem = &sum + &remainder_bound;
        if best.as_ref().map_or(true, |b| &sum > b) {
            best = Some(sum);
        }
        if best_with_rem.as_ref().map_or(true, |b| &with_rem > b) {
            best_with_rem = Some(with_rem);
        }
        argmax_probe.push(probes_for_x);
    }
    Ok(StatisticReport {
        statistic: best.expect("x_count >= 1"),
        statistic_with_remainder: best_with_rem.expect("x_count >= 1"),
        complete: table.is_complete(),
        argmax_probe,
    })
}

#[derive(Clone, Debug)]
pub struct RefinementReport {
    pub coarse_statistic: Rat,
    pub fine_statistic: Rat,
    /// Refinement can only raise the statistic; this is re-checked rather
    /// than assumed.
    pub monotone: bool,
}

/// Merge the fine table's cells according to `cell_of[fine] = coarse` and
/// compare the statistics. The mapping must be a surjection onto the
/// coarse cell indices.
pub fn refine_partition(fine: &PartitionTable, cell_of: &[usize]) -> Result<RefinementReport> {
    fine.validate()?;
    if cell_of.len() != fine.cells.len() {
        return Err(Error::Shape(format!(
            "mapping covers {} cells, table has {}",
            cell_of.len(),
            fine.cells.len()
        )));
    }
    let coarse_count = cell_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut hit = vec![false; coarse_count];
    for &c in cell_of {
        hit[c] = true;
    }
    if coarse_count == 0 || !hit.into_iter().all(|b| b) {
        return Err(Error::Shape(
            "cell mapping must be a surjection onto 0..coarse_count".into(),
        ));
    }
    let mut p = vec![
        vec![vec![Rat::zero(); fine.probes.len()]; fine.x_count];
        coarse_count
    ];
    for (fi, layer) in fine.p.iter().enumerate() {
        let ci = cell_of[fi];
        for (x, row) in layer.iter().enumerate() {
            for (z, v) in row.iter().enumerate() {
                p[ci][x][z] += v;
            }
        }
    }
    let coarse = PartitionTable {
        x_count: fine.x_count,
        cells: (0..coarse_count).map(|c| format!("merged{c}")).collect(),
        probes: fine.probes.clone(),
        p,
    };
    let coarse_statistic = theorem8_statistic(&coarse)?.statistic;
    let fine_statistic = theorem8_statistic(fine)?.statistic;
    let monotone = fine_statistic >= coarse_statistic;
    Ok(RefinementReport {
        coarse_statistic,
        fine_statistic,
        monotone,
    })
}
