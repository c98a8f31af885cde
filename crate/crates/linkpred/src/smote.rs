//! SMOTE class balancing for the stacking training table.

use crate::error::{Error, Result};
use crate::predictors::FeatureMatrix;
use crate::rng;
use crate::scalar::Real;

/// Neighborhood size for minority interpolation, clamped to the class size.
pub const SMOTE_NEIGHBORS: usize = 5;

/// Upsample the minority class to the majority count by interpolating
/// between minority rows: `x + u * (x_nn - x)` with `u ~ Uniform(0,1)` and
/// `x_nn` one of the `k = 5` nearest minority neighbors.
///
/// All original rows are preserved in their input order; synthetic rows are
/// appended. A single-row minority class falls back to duplication.
pub fn smote_balance<F: Real>(matrix: &FeatureMatrix<F>, seed: u64) -> Result<FeatureMatrix<F>> {
    let (neg, pos) = matrix.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::Degenerate(
            "SMOTE needs both classes present".into(),
        ));
    }
    if neg == pos {
        return Ok(matrix.clone());
    }
    let minority_label: u8 = if pos < neg { 1 } else { 0 };
    let minority: Vec<usize> = (0..matrix.n_rows())
        .filter(|&r| matrix.label(r) == minority_label)
        .collect();
    let deficit = neg.max(pos) - neg.min(pos);

    let mut out = matrix.clone();
    let mut rng = rng::rng_from_seed(seed);

    if minority.len() == 1 {
        log::warn!("single-row minority class: duplicating instead of interpolating");
        let row = matrix.row(minority[0]).to_vec();
        let pair = matrix.pair(minority[0]);
        for _ in 0..deficit {
            out.push_row(pair, &row, minority_label);
        }
        return Ok(out);
    }

    // k nearest minority neighbors per minority row, ties broken by index
    let k = SMOTE_NEIGHBORS.min(minority.len() - 1);
    let neighbor_table: Vec<Vec<usize>> = minority
        .iter()
        .map(|&r| {
            let base = matrix.row(r);
            let mut dists: Vec<(F, usize)> = minority
                .iter()
                .filter(|&&o| o != r)
                .map(|&o| {
                    let d = base
                        .iter()
                        .zip(matrix.row(o))
                        .map(|(a, b)| (*a - *b) * (*a - *b))
                        .sum::<F>();
                    (d, o)
                })
                .collect();
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            dists.into_iter().take(k).map(|(_, o)| o).collect()
        })
        .collect();

    for t in 0..deficit {
        let mi = t % minority.len();
        let base_row = minority[mi];
        let neighbors = &neighbor_table[mi];
        let nn = neighbors[rng::uniform_usize(&mut rng, neighbors.len())];
        let u = F::of_f64(rng::uniform_f64(&mut rng));
        let synth: Vec<F> = matrix
            .row(base_row)
            .iter()
            .zip(matrix.row(nn))
            .map(|(&a, &b)| a + u * (b - a))
            .collect();
        out.push_row(matrix.pair(base_row), &synth, minority_label);
    }
    Ok(out)
}
