//! Dense and sparse numeric kernels shared by the autodiff ops and the plain
//! inference paths. Convolutions go through im2col + GEMM.

use ndarray::{Array2, Array3};

/// Symmetric sparse matrix in CSR form (normalized graph adjacencies).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triples; caller guarantees symmetry.
    pub fn from_triples(n: usize, mut triples: Vec<(u32, u32, f64)>) -> Self {
        triples.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(triples.len());
        let mut data = Vec::with_capacity(triples.len());
        for &(r, c, v) in &triples {
            indptr[r as usize + 1] += 1;
            indices.push(c);
            data.push(v);
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            n,
            indptr,
            indices,
            data,
        }
    }

    /// y = S * x for dense x (n x c).
    pub fn matmul_dense(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.n, "spmm shape mismatch");
        let c = x.ncols();
        let xs = x.as_slice().expect("standard layout");
        let mut out = Array2::zeros((self.n, c));
        let os = out.as_slice_mut().unwrap();
        for row in 0..self.n {
            for idx in self.indptr[row]..self.indptr[row + 1] {
                let col = self.indices[idx] as usize;
                let v = self.data[idx];
                let src = &xs[col * c..(col + 1) * c];
                let dst = &mut os[row * c..(row + 1) * c];
                for j in 0..c {
                    dst[j] += v * src[j];
                }
            }
        }
        out
    }

    /// Boolean square A*A with the diagonal removed, as an edge list.
    pub fn boolean_square_edges(&self) -> Vec<(u32, u32)> {
        let mut edges = std::collections::BTreeSet::new();
        for row in 0..self.n {
            for idx in self.indptr[row]..self.indptr[row + 1] {
                let mid = self.indices[idx] as usize;
                for idx2 in self.indptr[mid]..self.indptr[mid + 1] {
                    let col = self.indices[idx2] as usize;
                    if col != row {
                        let (a, b) = (row.min(col) as u32, row.max(col) as u32);
                        edges.insert((a, b));
                    }
                }
            }
        }
        edges.into_iter().collect()
    }
}

/// Output length of a strided convolution.
pub fn conv_out_len(len: usize, kernel: usize, stride: usize, pad: usize) -> usize {
    (len + 2 * pad).saturating_sub(kernel) / stride + 1
}

/// Output length of a transposed convolution.
pub fn convt_out_len(len: usize, kernel: usize, stride: usize, pad: usize, out_pad: usize) -> usize {
    (len - 1) * stride + kernel + out_pad - 2 * pad
}

/// col[(ci*k + j), o] = x[ci, o*stride + j - pad], zero outside bounds.
pub fn im2col(x: &[f64], channels: usize, len: usize, kernel: usize, stride: usize, pad: usize) -> Array2<f64> {
    let out_len = conv_out_len(len, kernel, stride, pad);
    let mut col = Array2::zeros((channels * kernel, out_len));
    let cs = col.as_slice_mut().unwrap();
    for ci in 0..channels {
        let xrow = &x[ci * len..(ci + 1) * len];
        for j in 0..kernel {
            let crow = &mut cs[(ci * kernel + j) * out_len..(ci * kernel + j + 1) * out_len];
            for (o, c) in crow.iter_mut().enumerate() {
                let pos = o * stride + j;
                if pos >= pad && pos - pad < len {
                    *c = xrow[pos - pad];
                }
            }
        }
    }
    col
}

/// Adjoint of [`im2col`]: accumulates col entries back into x.
pub fn col2im(col: &Array2<f64>, channels: usize, len: usize, kernel: usize, stride: usize, pad: usize) -> Vec<f64> {
    let out_len = conv_out_len(len, kernel, stride, pad);
    debug_assert_eq!(col.dim(), (channels * kernel, out_len));
    let cs = col.as_slice().unwrap();
    let mut x = vec![0.0f64; channels * len];
    for ci in 0..channels {
        let xrow = &mut x[ci * len..(ci + 1) * len];
        for j in 0..kernel {
            let crow = &cs[(ci * kernel + j) * out_len..(ci * kernel + j + 1) * out_len];
            for (o, &c) in crow.iter().enumerate() {
                let pos = o * stride + j;
                if pos >= pad && pos - pad < len {
                    xrow[pos - pad] += c;
                }
            }
        }
    }
    x
}

/// Strided 1D convolution: x (B, Cin, L), w (Cout, Cin, K) -> (B, Cout, Lo).
pub fn conv1d_forward(
    x: &Array3<f64>,
    w: &Array3<f64>,
    bias: Option<&[f64]>,
    stride: usize,
    pad: usize,
) -> Array3<f64> {
    let (b, cin, len) = x.dim();
    let (cout, cin_w, kernel) = w.dim();
    assert_eq!(cin, cin_w, "conv1d channel mismatch");
    let out_len = conv_out_len(len, kernel, stride, pad);
    let w_mat = w.view().into_shape_with_order((cout, cin * kernel)).unwrap();
    let xs = x.as_slice().unwrap();
    let mut out = Array3::zeros((b, cout, out_len));
    for bi in 0..b {
        let col = im2col(&xs[bi * cin * len..(bi + 1) * cin * len], cin, len, kernel, stride, pad);
        let y = w_mat.dot(&col); // (Cout, Lo)
        let mut slab = out.index_axis_mut(ndarray::Axis(0), bi);
        slab.assign(&y);
        if let Some(bv) = bias {
            for co in 0..cout {
                for o in 0..out_len {
                    slab[[co, o]] += bv[co];
                }
            }
        }
    }
    out
}

/// Gradients of [`conv1d_forward`]: returns (dx, dw, dbias).
pub fn conv1d_backward(
    x: &Array3<f64>,
    w: &Array3<f64>,
    dy: &Array3<f64>,
    stride: usize,
    pad: usize,
) -> (Array3<f64>, Array3<f64>, Vec<f64>) {
    let (b, cin, len) = x.dim();
    let (cout, _, kernel) = w.dim();
    let out_len = conv_out_len(len, kernel, stride, pad);
    debug_assert_eq!(dy.dim(), (b, cout, out_len));
    let w_mat = w.view().into_shape_with_order((cout, cin * kernel)).unwrap();
    let xs = x.as_slice().unwrap();

    let mut dx = Array3::zeros((b, cin, len));
    let mut dw_mat = Array2::<f64>::zeros((cout, cin * kernel));
    let mut dbias = vec![0.0f64; cout];
    {
        let dxs = dx.as_slice_mut().unwrap();
        for bi in 0..b {
            let dy_b = dy.index_axis(ndarray::Axis(0), bi);
            let col = im2col(&xs[bi * cin * len..(bi + 1) * cin * len], cin, len, kernel, stride, pad);
            dw_mat = dw_mat + dy_b.dot(&col.t());
            let dcol = w_mat.t().dot(&dy_b); // (Cin*K, Lo)
            let dxb = col2im(&dcol, cin, len, kernel, stride, pad);
            dxs[bi * cin * len..(bi + 1) * cin * len].copy_from_slice(&dxb);
            for co in 0..cout {
                for o in 0..out_len {
                    dbias[co] += dy_b[[co, o]];
                }
            }
        }
    }
    let dw = dw_mat.into_shape_with_order((cout, cin, kernel)).unwrap();
    (dx, dw, dbias)
}

/// Transposed 1D convolution: x (B, Cin, L), w (Cin, Cout, K) -> (B, Cout, Lo)
/// with Lo = (L-1)*stride + K + out_pad - 2*pad. Implemented as the adjoint of
/// a strided conv: scatter of (w^T x) via col2im.
pub fn convt1d_forward(
    x: &Array3<f64>,
    w: &Array3<f64>,
    bias: Option<&[f64]>,
    stride: usize,
    pad: usize,
    out_pad: usize,
) -> Array3<f64> {
    let (b, cin, len) = x.dim();
    let (cin_w, cout, kernel) = w.dim();
    assert_eq!(cin, cin_w, "convt1d channel mismatch");
    let out_len = convt_out_len(len, kernel, stride, pad, out_pad);
    // Check the adjoint relationship holds for these dims.
    debug_assert_eq!(conv_out_len(out_len, kernel, stride, pad), len);
    let w_mat = w.view().into_shape_with_order((cin, cout * kernel)).unwrap();
    let mut out = Array3::zeros((b, cout, out_len));
    {
        let os = out.as_slice_mut().unwrap();
        for bi in 0..b {
            let x_b = x.index_axis(ndarray::Axis(0), bi); // (Cin, L)
            let u = w_mat.t().dot(&x_b); // (Cout*K, L)
            let y = col2im(&u, cout, out_len, kernel, stride, pad);
            let dst = &mut os[bi * cout * out_len..(bi + 1) * cout * out_len];
            dst.copy_from_slice(&y);
            if let Some(bv) = bias {
                for co in 0..cout {
                    for o in 0..out_len {
                        dst[co * out_len + o] += bv[co];
                    }
                }
            }
        }
    }
    out
}

/// Gradients of [`convt1d_forward`]: returns (dx, dw, dbias).
pub fn convt1d_backward(
    x: &Array3<f64>,
    w: &Array3<f64>,
    dy: &Array3<f64>,
    stride: usize,
    pad: usize,
    out_pad: usize,
) -> (Array3<f64>, Array3<f64>, Vec<f64>) {
    let (b, cin, len) = x.dim();
    let (_, cout, kernel) = w.dim();
    let out_len = convt_out_len(len, kernel, stride, pad, out_pad);
    debug_assert_eq!(dy.dim(), (b, cout, out_len));
    let w_mat = w.view().into_shape_with_order((cin, cout * kernel)).unwrap();
    let dys = dy.as_slice().unwrap();

    let mut dx = Array3::zeros((b, cin, len));
    let mut dw_mat = Array2::<f64>::zeros((cin, cout * kernel));
    let mut dbias = vec![0.0f64; cout];
    for bi in 0..b {
        let dy_slice = &dys[bi * cout * out_len..(bi + 1) * cout * out_len];
        // dx = conv(dy, w): im2col over dy.
        let col = im2col(dy_slice, cout, out_len, kernel, stride, pad); // (Cout*K, L)
        let dxb = w_mat.dot(&col); // (Cin, L)
        dx.index_axis_mut(ndarray::Axis(0), bi).assign(&dxb);
        // dw = x * col^T.
        let x_b = x.index_axis(ndarray::Axis(0), bi);
        dw_mat = dw_mat + x_b.dot(&col.t());
        for co in 0..cout {
            for o in 0..out_len {
                dbias[co] += dy_slice[co * out_len + o];
            }
        }
    }
    let dw = dw_mat.into_shape_with_order((cin, cout, kernel)).unwrap();
    (dx, dw, dbias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn csr_matmul_matches_dense() {
        // 3-node path graph adjacency.
        let s = CsrMatrix::from_triples(
            3,
            vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        );
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let y = s.matmul_dense(&x);
        assert_eq!(y, array![[3.0, 4.0], [6.0, 8.0], [3.0, 4.0]]);
    }

    #[test]
    fn boolean_square_connects_path_endpoints() {
        let s = CsrMatrix::from_triples(
            3,
            vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        );
        let e = s.boolean_square_edges();
        assert_eq!(e, vec![(0, 2)]);
    }

    #[test]
    fn im2col_col2im_adjoint() {
        // <im2col(x), c> == <x, col2im(c)> for random x, c.
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (ch, len, k, s, p) = (3, 17, 5, 2, 3);
        let x: Vec<f64> = (0..ch * len).map(|_| rng.random::<f64>() - 0.5).collect();
        let col_of_x = im2col(&x, ch, len, k, s, p);
        let c = col_of_x.map(|_| rng.random::<f64>() - 0.5);
        let lhs: f64 = col_of_x.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
        let x_of_c = col2im(&c, ch, len, k, s, p);
        let rhs: f64 = x.iter().zip(x_of_c.iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn conv1d_hand_example() {
        // 1 channel, kernel [1, 2], stride 1, no pad.
        let x = Array3::from_shape_vec((1, 1, 4), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let w = Array3::from_shape_vec((1, 1, 2), vec![1.0, 2.0]).unwrap();
        let y = conv1d_forward(&x, &w, None, 1, 0);
        assert_eq!(y.as_slice().unwrap(), &[5.0, 8.0, 11.0]);
    }

    #[test]
    fn convt1d_upsamples_exactly() {
        // stride 4, kernel 41, pad 19, out_pad 1 quadruples the length.
        let x = Array3::from_shape_vec((1, 2, 16), vec![0.5; 32]).unwrap();
        let w = Array3::from_shape_vec((2, 3, 41), vec![0.01; 2 * 3 * 41]).unwrap();
        let y = convt1d_forward(&x, &w, None, 4, 19, 1);
        assert_eq!(y.dim(), (1, 3, 64));
    }

    #[test]
    fn conv_and_convt_are_adjoint() {
        // <conv(x), y> == <x, convt(y)> when they share weights.
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let (cin, cout, len, k, s, p) = (2, 3, 12, 5, 2, 2);
        let out_len = conv_out_len(len, k, s, p);
        let x = Array3::from_shape_fn((1, cin, len), |_| rng.random::<f64>() - 0.5);
        let w = Array3::from_shape_fn((cout, cin, k), |_| rng.random::<f64>() - 0.5);
        let y = Array3::from_shape_fn((1, cout, out_len), |_| rng.random::<f64>() - 0.5);
        let conv_x = conv1d_forward(&x, &w, None, s, p);
        let lhs: f64 = conv_x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        // The same (cout, cin, k) array reads as (Cin, Cout, K) for convt.
        let out_pad = len + 2 * p - ((out_len - 1) * s + k);
        let convt_y = convt1d_forward(&y, &w, None, s, p, out_pad);
        let rhs: f64 = x.iter().zip(convt_y.iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12, "lhs {lhs} rhs {rhs}");
    }
}
