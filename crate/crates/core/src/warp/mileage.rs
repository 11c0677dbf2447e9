use crate::actions::ActionModel;
use crate::error::{Error, Result};

/// Largest hop budget accepted by [`mileage_bruteforce`].
pub const MAX_HOPS: usize = 6;

/// Exact minimum mileage `r d(x, x_1) + 1 + r d(s_1 x_1, x_2) + ... + 1 +
/// r d(s_k x_k, x')` over jump sequences with `k <= max_hops` and all
/// intermediate points on the net.
///
/// Jumps are the undirected pairs `{y, snap(s y)}`, so the search space is
/// the same as the warped level's shortcut set. The minimum is taken one
/// jump count at a time: `M_0(y) = r d(x, y)` and
/// `M_{k+1}(y) = min(M_k(y), min_{a -> b} M_k(a) + 1 + r d(b, y))`.
/// This does not touch the level graph or its Dijkstra runs.
pub fn mileage_bruteforce(action: &ActionModel, level: f64, x: usize, target: usize, max_hops: usize) -> Result<f64> {
    Ok(mileage_layers(action, level, x, max_hops)?[max_hops][target])
}

/// `M_0, ..., M_{max_hops}` from source `x`.
pub(crate) fn mileage_layers(action: &ActionModel, level: f64, x: usize, max_hops: usize) -> Result<Vec<Vec<f64>>> {
    if max_hops > MAX_HOPS {
        return Err(Error::CapExceeded {
            what: "mileage hop budget",
            needed: max_hops,
            cap: MAX_HOPS,
        });
    }
    let space = action.space();
    let n = space.len();
    if x >= n {
        return Err(Error::param("x", format!("index {x} out of range")));
    }
    let mut jumps = Vec::new();
    for s in 0..action.generator_count() {
        for a in 0..n {
            let b = action.image(s, a);
            jumps.push((a, b));
            jumps.push((b, a));
        }
    }
    jumps.sort_unstable();
    jumps.dedup();

    let mut layers = Vec::with_capacity(max_hops + 1);
    layers.push((0..n).map(|y| level * space.dist(x, y)).collect::<Vec<f64>>());
    for _ in 0..max_hops {
        let prev = layers.last().expect("nonempty");
        let mut next = prev.clone();
        for &(a, b) in &jumps {
            let reach = prev[a] + 1.0;
            for (y, slot) in next.iter_mut().enumerate() {
                let c = reach + level * space.dist(b, y);
                if c < *slot {
                    *slot = c;
                }
            }
        }
        layers.push(next);
    }
    Ok(layers)
}
