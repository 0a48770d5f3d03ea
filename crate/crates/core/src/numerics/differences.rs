use crate::error::{Error, Result};

/// The `order`-th forward difference `Δᵏ` of `seq`; order 0 is the identity.
pub fn forward_differences(seq: &[f64], order: usize) -> Result<Vec<f64>> {
    if seq.len() <= order {
        return Err(Error::Length {
            len: seq.len(),
            order,
        });
    }
    let mut out = seq.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}
