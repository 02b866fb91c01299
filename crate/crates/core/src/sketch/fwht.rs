use crate::error::{dim, Result};

/// In-place unnormalized Walsh–Hadamard transform.
pub fn fwht(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if !n.is_power_of_two() {
        return dim(format!("fwht length {n} is not a power of two"));
    }
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (v[i], v[i + h]);
                v[i] = x + y;
                v[i + h] = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// Unnormalized transform applied down the rows of a row-major `n × cols`
/// block, i.e. to every column at once.
pub(crate) fn fwht_rows(data: &mut [f64], n: usize, cols: usize) -> Result<()> {
    if !n.is_power_of_two() || data.len() != n * cols {
        return dim(format!("fwht over {n} rows of width {cols}"));
    }
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (top, bottom) = data.split_at_mut((i + h) * cols);
                let x = &mut top[i * cols..(i + 1) * cols];
                let y = &mut bottom[..cols];
                for (a, b) in x.iter_mut().zip(y.iter_mut()) {
                    let (p, q) = (*a, *b);
                    *a = p + q;
                    *b = p - q;
                }
            }
        }
        h *= 2;
    }
    Ok(())
}
