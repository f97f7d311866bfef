use crate::error::{Error, Result};

/// Distributes freshly computed (sorted) spectrum values over the blocks of
/// the previous grid step.
///
/// Returns one index list per block, pointing into `new_values`, with
/// `|assignment[j]| = |prev_block_values[j]|`. The assignment minimizes
/// `Σ |new − matched prev|`: on the real line the order-preserving matching
/// is optimal, so previous values (tagged with their block) and new values
/// are both sorted ascending and paired in order. Equal previous values in
/// different blocks are ordered by block index, which hands the smaller new
/// value to the block appearing earlier in the partition.
///
/// Each returned list is ordered by nonincreasing new value.
pub fn assign_to_blocks(prev_block_values: &[Vec<f64>], new_values: &[f64]) -> Result<Vec<Vec<usize>>> {
    let total: usize = prev_block_values.iter().map(Vec::len).sum();
    if total != new_values.len() {
        return Err(Error::CountMismatch(format!(
            "blocks hold {total} values but {} new values were supplied",
            new_values.len()
        )));
    }
    if let Some(j) = prev_block_values.iter().position(Vec::is_empty) {
        return Err(Error::CountMismatch(format!("block {} is empty", j + 1)));
    }

    let mut slots: Vec<(f64, usize)> = prev_block_values
        .iter()
        .enumerate()
        .flat_map(|(block, values)| values.iter().map(move |&v| (v, block)))
        .collect();
    slots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut order: Vec<usize> = (0..new_values.len()).collect();
    order.sort_by(|&a, &b| new_values[a].total_cmp(&new_values[b]).then(b.cmp(&a)));

    let mut assignment = vec![Vec::new(); prev_block_values.len()];
    for (&(_, block), &idx) in slots.iter().zip(&order) {
        assignment[block].push(idx);
    }
    for list in assignment.iter_mut() {
        list.sort_by(|&a, &b| new_values[b].total_cmp(&new_values[a]).then(a.cmp(&b)));
    }
    Ok(assignment)
}
