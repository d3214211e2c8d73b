use super::{Matrix, SimError};

/// Plain triple-loop int8 GEMM with wrapping 32-bit accumulation.
pub fn reference_gemm(a: &Matrix<i8>, b: &Matrix<i8>) -> Result<Matrix<i32>, SimError> {
    if a.cols() != b.rows() {
        return Err(SimError::Shape { a: (a.rows(), a.cols()), b: (b.rows(), b.cols()) });
    }
    let mut c = Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = 0i32;
            for k in 0..a.cols() {
                acc = acc.wrapping_add(a.get(i, k) as i32 * b.get(k, j) as i32);
            }
            c.set(i, j, acc);
        }
    }
    Ok(c)
}
