//! Forward and backward kernels for every layer kind.
//!
//! Feature maps are batches `(N, H, W, C)` in row-major order and dense
//! activations are `(N, F)`. Convolutions use 3×3 kernels stored
//! `(3, 3, C_in, C_out)`, zero same-padding and stride 1, lowered to
//! matrix products.

use super::scalar::Scalar;
use super::tensor::Tensor;
use crate::error::{shape_err, Result};

pub const KERNEL: usize = 3;

/// `c = a·b + beta·c` on strided row/column views, `c` dense row-major.
#[allow(clippy::too_many_arguments)]
fn gemm<T: Scalar>(
    m: usize,
    k: usize,
    n: usize,
    a: &[T],
    (rsa, csa): (usize, usize),
    b: &[T],
    (rsb, csb): (usize, usize),
    beta: T,
    c: &mut [T],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len());
    assert!(k == 0 || (k - 1) * rsb + (n - 1) * csb < b.len());
    assert!(c.len() >= m * n);
    // matrixmultiply packs both operands, which dominates for vector shapes
    if n == 1 && csa == 1 {
        for (i, ci) in c[..m].iter_mut().enumerate() {
            let row = &a[i * rsa..i * rsa + k];
            *ci = beta * *ci + dot_strided(row, b, rsb);
        }
        return;
    }
    if n == 1 && rsa == 1 {
        let c = &mut c[..m];
        if beta != T::one() {
            c.iter_mut().for_each(|v| *v *= beta);
        }
        for p in 0..k {
            let bp = b[p * rsb];
            if bp != T::zero() {
                for (ci, &ai) in c.iter_mut().zip(&a[p * csa..p * csa + m]) {
                    *ci += bp * ai;
                }
            }
        }
        return;
    }
    if m == 1 && csb == 1 {
        let c = &mut c[..n];
        if beta != T::one() {
            c.iter_mut().for_each(|v| *v *= beta);
        }
        for p in 0..k {
            let ap = a[p * csa];
            if ap != T::zero() {
                for (cj, &bj) in c.iter_mut().zip(&b[p * rsb..p * rsb + n]) {
                    *cj += ap * bj;
                }
            }
        }
        return;
    }
    // SAFETY: the asserted extents keep every strided access inside the
    // slices; `c` is exclusively borrowed and dense row-major m×n.
    unsafe {
        T::gemm_raw(
            m,
            k,
            n,
            T::one(),
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Dense row-major `a·b` for `a` (m, k) and `b` (k, n), written into fresh
/// memory without zero-filling it first.
fn product_uninit<T: Scalar>(m: usize, k: usize, n: usize, a: &[T], b: &[T]) -> Vec<T> {
    assert!(k > 0 && a.len() >= m * k && b.len() >= k * n);
    let mut c: Vec<T> = Vec::with_capacity(m * n);
    // SAFETY: the views lie inside `a`, `b` and the reserved capacity of
    // `c`. With beta = 0 the product overwrites every element of C without
    // reading it, so all m·n values are initialized before `set_len`.
    unsafe {
        T::gemm_raw(
            m,
            k,
            n,
            T::one(),
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            T::zero(),
            c.as_mut_ptr(),
            n as isize,
            1,
        );
        c.set_len(m * n);
    }
    c
}

/// `Σ x[p]·y[p·stride]` with independent partial sums.
fn dot_strided<T: Scalar>(x: &[T], y: &[T], stride: usize) -> T {
    let mut acc = [T::zero(); 8];
    if stride == 1 {
        let y = &y[..x.len()];
        let mut xc = x.chunks_exact(8);
        let mut yc = y.chunks_exact(8);
        for (xs, ys) in (&mut xc).zip(&mut yc) {
            for l in 0..8 {
                acc[l] += xs[l] * ys[l];
            }
        }
        for (l, (&a, &b)) in xc.remainder().iter().zip(yc.remainder()).enumerate() {
            acc[l] += a * b;
        }
    } else {
        for (p, &a) in x.iter().enumerate() {
            acc[p % 8] += a * y[p * stride];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]))
}

fn check_kernel<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<(usize, usize, usize, usize, usize)> {
    let (n, h, w, c_in) = input.nhwc()?;
    match kernels.shape() {
        &[KERNEL, KERNEL, ci, co] if ci == c_in => {
            if bias.shape() != [co] {
                return shape_err(format!(
                    "bias shape {:?} does not match {co} filters",
                    bias.shape()
                ));
            }
            Ok((n, h, w, c_in, co))
        }
        s => shape_err(format!(
            "kernel shape {s:?} incompatible with {c_in} input channels"
        )),
    }
}

/// Geometry of a batch laid out on the padded grid: every map gets a
/// one-pixel zero border and the maps are stacked vertically.
#[derive(Clone, Copy)]
struct Grid {
    n: usize,
    h: usize,
    w: usize,
}

impl Grid {
    fn pw(self) -> usize {
        self.w + 2
    }

    /// Padded pixels per map.
    fn block(self) -> usize {
        (self.h + 2) * self.pw()
    }

    /// Output positions that cover every valid pixel; the spare ones are
    /// discarded.
    fn rows(self) -> usize {
        (self.n - 1) * self.block() + self.h * self.pw()
    }

    /// Grid position of output pixel `(b, i, 0)`.
    fn row_start(self, b: usize, i: usize) -> usize {
        b * self.block() + i * self.pw()
    }

    /// Zero-padded copy of `x`, with two pixels of slack at the end so the
    /// shifted views in [`correlate`] stay in bounds.
    fn pad<T: Scalar>(self, x: &[T], c: usize) -> Vec<T> {
        let pw = self.pw();
        let zero = T::zero();
        let mut out = Vec::with_capacity((self.n * self.block() + 2) * c);
        for map in x.chunks_exact(self.h * self.w * c) {
            out.resize(out.len() + (pw + 1) * c, zero);
            for row in map.chunks_exact(self.w * c) {
                out.extend_from_slice(row);
                out.resize(out.len() + 2 * c, zero);
            }
            out.resize(out.len() + (pw - 1) * c, zero);
        }
        out.resize((self.n * self.block() + 2) * c, zero);
        out
    }

    /// `x` placed at the output positions, zero elsewhere.
    fn spread<T: Scalar>(self, x: &[T], c: usize) -> Vec<T> {
        let zero = T::zero();
        let mut out = Vec::with_capacity(self.rows() * c);
        for (r, row) in x.chunks_exact(self.w * c).enumerate() {
            out.resize(self.row_start(r / self.h, r % self.h) * c, zero);
            out.extend_from_slice(row);
        }
        out.resize(self.rows() * c, zero);
        out
    }

    fn gather<T: Scalar>(self, acc: &[T], c: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n * self.h * self.w * c);
        for b in 0..self.n {
            for i in 0..self.h {
                let src = self.row_start(b, i) * c;
                out.extend_from_slice(&acc[src..src + self.w * c]);
            }
        }
        out
    }
}

/// Same-padded 3×3 cross-correlation of a batch with `(3, 3, C_in, C_out)`
/// kernel data. For each tap the inputs are one strided view of the padded
/// grid, which gives three lowerings to matrix products; the one used
/// depends only on the channel counts.
fn correlate<T: Scalar>(
    x: &[T],
    grid: Grid,
    c_in: usize,
    kernels: &[T],
    c_out: usize,
    bias: &[T],
) -> Vec<T> {
    let rows = grid.rows();
    let xp = grid.pad(x, c_in);
    let offsets: [usize; KERNEL * KERNEL] =
        std::array::from_fn(|t| (t / KERNEL) * grid.pw() + t % KERNEL);
    let mut acc: Vec<T> = Vec::with_capacity(rows * c_out);
    for _ in 0..rows {
        acc.extend_from_slice(bias);
    }
    let taps = KERNEL * KERNEL;
    if c_in == 1 {
        // gather the nine taps per position, then one product with K as (9, C_out)
        let mut cols = Vec::with_capacity(rows * taps);
        for r in 0..rows {
            cols.extend(offsets.iter().map(|&o| xp[r + o]));
        }
        gemm(
            rows,
            taps,
            c_out,
            &cols,
            (taps, 1),
            kernels,
            (c_out, 1),
            T::one(),
            &mut acc,
        );
    } else if c_out < c_in {
        // one product against all taps side by side, then shift and add
        let width = taps * c_out;
        let mut wide_k = vec![T::zero(); c_in * width];
        for t in 0..taps {
            for c in 0..c_in {
                let src = &kernels[(t * c_in + c) * c_out..][..c_out];
                wide_k[c * width + t * c_out..][..c_out].copy_from_slice(src);
            }
        }
        let all_rows = xp.len() / c_in;
        let y = product_uninit(all_rows, c_in, width, &xp, &wide_k);
        for (r, out) in acc.chunks_exact_mut(c_out).enumerate() {
            for (t, &o) in offsets.iter().enumerate() {
                let part = &y[(r + o) * width + t * c_out..][..c_out];
                for (a, &v) in out.iter_mut().zip(part) {
                    *a += v;
                }
            }
        }
    } else {
        let block = c_in * c_out;
        for (t, &o) in offsets.iter().enumerate() {
            let k = &kernels[t * block..][..block];
            gemm(
                rows,
                c_in,
                c_out,
                &xp[o * c_in..],
                (c_in, 1),
                k,
                (c_out, 1),
                T::one(),
                &mut acc,
            );
        }
    }
    grid.gather(&acc, c_out)
}

/// `(3, 3, C_in, C_out)` → spatially flipped `(3, 3, C_out, C_in)`.
fn transpose_flip<T: Scalar>(kernels: &Tensor<T>) -> Vec<T> {
    let (ci, co) = (kernels.shape()[2], kernels.shape()[3]);
    let src = kernels.data();
    let mut out = vec![T::zero(); src.len()];
    for di in 0..KERNEL {
        for dj in 0..KERNEL {
            let from = (di * KERNEL + dj) * ci * co;
            let to = ((KERNEL - 1 - di) * KERNEL + (KERNEL - 1 - dj)) * ci * co;
            for c in 0..ci {
                for o in 0..co {
                    out[to + o * ci + c] = src[from + c * co + o];
                }
            }
        }
    }
    out
}

/// Cross-correlation with zero same-padding.
pub fn conv2d_forward<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<Tensor<T>> {
    let (n, h, w, c_in, c_out) = check_kernel(input, kernels, bias)?;
    if n == 0 {
        return Ok(Tensor::zeros(&[0, h, w, c_out]));
    }
    let out = correlate(
        input.data(),
        Grid { n, h, w },
        c_in,
        kernels.data(),
        c_out,
        bias.data(),
    );
    Tensor::new(vec![n, h, w, c_out], out)
}

pub struct ConvGrads<T> {
    pub input: Option<Tensor<T>>,
    pub kernels: Tensor<T>,
    pub bias: Tensor<T>,
}

/// Gradients of [`conv2d_forward`] given the upstream gradient, summed
/// over the batch.
pub fn conv2d_backward<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    grad_out: &Tensor<T>,
    need_input_grad: bool,
) -> Result<ConvGrads<T>> {
    let c_out = kernels.shape().get(3).copied().unwrap_or(0);
    let (n, h, w, c_in, _) = check_kernel(input, kernels, &Tensor::zeros(&[c_out]))?;
    if grad_out.shape() != [n, h, w, c_out] {
        return shape_err(format!(
            "conv grad shape {:?} != {:?}",
            grad_out.shape(),
            [n, h, w, c_out]
        ));
    }
    let g = grad_out.data();
    let block = c_in * c_out;
    let mut dk = vec![T::zero(); KERNEL * KERNEL * block];
    let mut db = vec![T::zero(); c_out];
    if n == 0 {
        return Ok(ConvGrads {
            input: need_input_grad.then(|| Tensor::zeros(input.shape())),
            kernels: Tensor::new(kernels.shape().to_vec(), dk)?,
            bias: Tensor::new(vec![c_out], db)?,
        });
    }
    let grid = Grid { n, h, w };
    let xp = grid.pad(input.data(), c_in);
    let gp = grid.spread(g, c_out);
    for di in 0..KERNEL {
        for dj in 0..KERNEL {
            let offset = (di * grid.pw() + dj) * c_in;
            let out = &mut dk[(di * KERNEL + dj) * block..][..block];
            gemm(
                c_in,
                grid.rows(),
                c_out,
                &xp[offset..],
                (1, c_in),
                &gp,
                (c_out, 1),
                T::zero(),
                out,
            );
        }
    }
    for px in g.chunks_exact(c_out) {
        for (d, &v) in db.iter_mut().zip(px) {
            *d += v;
        }
    }
    let input_grad = if need_input_grad {
        // dX = g ⋆ flip(K) with the channel axes swapped
        let kt = transpose_flip(kernels);
        let dx = correlate(g, grid, c_out, &kt, c_in, &vec![T::zero(); c_in]);
        Some(Tensor::new(input.shape().to_vec(), dx)?)
    } else {
        None
    };
    Ok(ConvGrads {
        input: input_grad,
        kernels: Tensor::new(kernels.shape().to_vec(), dk)?,
        bias: Tensor::new(vec![c_out], db)?,
    })
}

/// Spatially flipped copy of a `(3, 3, C_in, C_out)` kernel.
fn flip<T: Scalar>(kernels: &Tensor<T>) -> Tensor<T> {
    let s = kernels.shape();
    let block = s[2] * s[3];
    let src = kernels.data();
    let mut out = vec![T::zero(); src.len()];
    for di in 0..KERNEL {
        for dj in 0..KERNEL {
            let from = (di * KERNEL + dj) * block;
            let to = ((KERNEL - 1 - di) * KERNEL + (KERNEL - 1 - dj)) * block;
            out[to..to + block].copy_from_slice(&src[from..from + block]);
        }
    }
    Tensor::new(s.to_vec(), out).expect("flip preserves shape")
}

/// Stride-1 transposed convolution with same padding:
/// `out[i,j,o] = b[o] + Σ y[i-di+1, j-dj+1, c]·K[di,dj,c,o]`.
/// It scatters where [`conv2d_forward`] gathers, which makes it the adjoint
/// of a convolution whose kernel has the channel axes swapped. Computed as
/// a convolution with the spatially flipped kernel.
pub fn tconv2d_forward<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<Tensor<T>> {
    check_kernel(input, kernels, bias)?;
    conv2d_forward(input, &flip(kernels), bias)
}

pub fn tconv2d_backward<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    grad_out: &Tensor<T>,
    need_input_grad: bool,
) -> Result<ConvGrads<T>> {
    if kernels.shape().len() != 4 {
        return shape_err(format!(
            "kernel shape {:?} is not (3, 3, C_in, C_out)",
            kernels.shape()
        ));
    }
    let g = conv2d_backward(input, &flip(kernels), grad_out, need_input_grad)?;
    Ok(ConvGrads {
        kernels: flip(&g.kernels),
        ..g
    })
}

/// 2×2 stride-2 max pooling. Returns the pooled maps and, per output value,
/// the flat input index that won. Ties go to the first index in row-major
/// window order.
pub fn maxpool2d_forward<T: Scalar>(input: &Tensor<T>) -> Result<(Tensor<T>, Vec<usize>)> {
    let (n, h, w, c) = input.nhwc()?;
    if h % 2 != 0 || w % 2 != 0 {
        return shape_err(format!("max pooling needs even spatial dims, got {h}x{w}"));
    }
    // maps stack vertically with even heights, so windows never straddle two
    let (oh, ow) = (n * h / 2, w / 2);
    let x = input.data();
    let mut out = Vec::with_capacity(oh * ow * c);
    let mut idx = Vec::with_capacity(oh * ow * c);
    for i in 0..oh {
        for j in 0..ow {
            for ch in 0..c {
                let mut best = ((2 * i) * w + 2 * j) * c + ch;
                for (di, dj) in [(0, 1), (1, 0), (1, 1)] {
                    let k = ((2 * i + di) * w + 2 * j + dj) * c + ch;
                    if x[k] > x[best] {
                        best = k;
                    }
                }
                out.push(x[best]);
                idx.push(best);
            }
        }
    }
    Ok((Tensor::new(vec![n, h / 2, ow, c], out)?, idx))
}

pub fn maxpool2d_backward<T: Scalar>(
    grad_out: &Tensor<T>,
    indices: &[usize],
    input_shape: &[usize],
) -> Result<Tensor<T>> {
    if grad_out.len() != indices.len() {
        return shape_err("pool gradient and index list differ in length");
    }
    let mut g = Tensor::zeros(input_shape);
    let d = g.data_mut();
    for (&k, &v) in indices.iter().zip(grad_out.data()) {
        d[k] += v;
    }
    Ok(g)
}

/// Nearest-neighbour ×2 upsampling.
pub fn upsample2d<T: Scalar>(input: &Tensor<T>) -> Result<Tensor<T>> {
    let (n, h, w, c) = input.nhwc()?;
    let x = input.data();
    let mut out = Vec::with_capacity(4 * x.len());
    for i in 0..2 * n * h {
        for j in 0..2 * w {
            let src = ((i / 2) * w + j / 2) * c;
            out.extend_from_slice(&x[src..src + c]);
        }
    }
    Tensor::new(vec![n, 2 * h, 2 * w, c], out)
}

/// Adjoint of [`upsample2d`]: sums each 2×2 block.
pub fn upsample2d_backward<T: Scalar>(grad_out: &Tensor<T>) -> Result<Tensor<T>> {
    let (n, h2, w2, c) = grad_out.nhwc()?;
    if h2 % 2 != 0 || w2 % 2 != 0 {
        return shape_err("upsample gradient must have even spatial dims");
    }
    let (h, w) = (h2 / 2, w2 / 2);
    let g = grad_out.data();
    let mut out = vec![T::zero(); n * h * w * c];
    for i in 0..n * h2 {
        for j in 0..w2 {
            let dst = ((i / 2) * w + j / 2) * c;
            let src = (i * w2 + j) * c;
            for (d, &s) in out[dst..dst + c].iter_mut().zip(&g[src..src + c]) {
                *d += s;
            }
        }
    }
    Tensor::new(vec![n, h, w, c], out)
}

/// `input · weights + bias` for input `(N, F)` and weights `(F, M)`.
pub fn dense_forward<T: Scalar>(
    input: &Tensor<T>,
    weights: &Tensor<T>,
    bias: &Tensor<T>,
) -> Result<Tensor<T>> {
    let (n, f) = input.nf()?;
    let m = match weights.shape() {
        &[wf, m] if wf == f && bias.shape() == [m] => m,
        s => {
            return shape_err(format!(
                "dense weights {s:?} / bias {:?} incompatible with {f} input features",
                bias.shape()
            ))
        }
    };
    let mut out = Vec::with_capacity(n * m);
    for _ in 0..n {
        out.extend_from_slice(bias.data());
    }
    gemm(
        n,
        f,
        m,
        input.data(),
        (f, 1),
        weights.data(),
        (m, 1),
        T::one(),
        &mut out,
    );
    Tensor::new(vec![n, m], out)
}

pub struct DenseGrads<T> {
    pub input: Option<Tensor<T>>,
    pub weights: Tensor<T>,
    pub bias: Tensor<T>,
}

pub fn dense_backward<T: Scalar>(
    input: &Tensor<T>,
    weights: &Tensor<T>,
    grad_out: &Tensor<T>,
    need_input_grad: bool,
) -> Result<DenseGrads<T>> {
    let (n, f) = input.nf()?;
    let m = match (weights.shape(), grad_out.shape()) {
        (&[wf, m], &[gn, gm]) if wf == f && gn == n && gm == m => m,
        (s, g) => {
            return shape_err(format!(
                "dense backward: weights {s:?}, gradient {g:?}, input {:?}",
                input.shape()
            ))
        }
    };
    let x = input.data();
    let g = grad_out.data();
    let mut dw = vec![T::zero(); f * m];
    gemm(f, n, m, x, (1, f), g, (m, 1), T::zero(), &mut dw);
    let mut db = vec![T::zero(); m];
    for row in g.chunks_exact(m) {
        for (d, &v) in db.iter_mut().zip(row) {
            *d += v;
        }
    }
    let input_grad = if need_input_grad {
        let mut dx = vec![T::zero(); n * f];
        gemm(
            n,
            m,
            f,
            g,
            (m, 1),
            weights.data(),
            (1, m),
            T::zero(),
            &mut dx,
        );
        Some(Tensor::new(input.shape().to_vec(), dx)?)
    } else {
        None
    };
    Ok(DenseGrads {
        input: input_grad,
        weights: Tensor::new(vec![f, m], dw)?,
        bias: Tensor::new(vec![m], db)?,
    })
}

pub fn relu<T: Scalar>(input: &Tensor<T>) -> Tensor<T> {
    let mut out = input.clone();
    for v in out.data_mut() {
        *v = v.max(T::zero());
    }
    out
}

/// Passes gradient where the pre-activation was strictly positive; the
/// subgradient at zero is zero.
pub fn relu_backward<T: Scalar>(input: &Tensor<T>, grad_out: &Tensor<T>) -> Tensor<T> {
    let mut g = grad_out.clone();
    for (d, &x) in g.data_mut().iter_mut().zip(input.data()) {
        if x <= T::zero() {
            *d = T::zero();
        }
    }
    g
}

pub fn sigmoid_scalar<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn sigmoid<T: Scalar>(input: &Tensor<T>) -> Tensor<T> {
    let mut out = input.clone();
    for v in out.data_mut() {
        *v = sigmoid_scalar(*v);
    }
    out
}

/// Backward through sigmoid using its forward output.
pub fn sigmoid_backward<T: Scalar>(output: &Tensor<T>, grad_out: &Tensor<T>) -> Tensor<T> {
    let mut g = grad_out.clone();
    for (d, &y) in g.data_mut().iter_mut().zip(output.data()) {
        *d *= y * (T::one() - y);
    }
    g
}

pub const BCE_EPS: f64 = 1e-7;

fn clamp_bounds<T: Scalar>() -> (T, T) {
    (T::of_f64(BCE_EPS), T::of_f64(1.0 - BCE_EPS))
}

/// Mean binary cross-entropy, accumulated in `f64`; predictions are clamped
/// to `[BCE_EPS, 1 - BCE_EPS]` before the logs.
pub fn bce_loss<T: Scalar>(prediction: &Tensor<T>, target: &Tensor<T>) -> Result<f64> {
    if prediction.shape() != target.shape() {
        return shape_err(format!(
            "BCE shapes {:?} vs {:?}",
            prediction.shape(),
            target.shape()
        ));
    }
    let (lo, hi) = clamp_bounds::<T>();
    let n = prediction.len() as f64;
    let total: f64 = prediction
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            let p = p.max(lo).min(hi).as_f64();
            let t = t.as_f64();
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / n)
}

/// Gradient of [`bce_loss`] with respect to the (unclamped) prediction.
/// Zero where the clamp is active.
pub fn bce_grad<T: Scalar>(prediction: &Tensor<T>, target: &Tensor<T>) -> Result<Tensor<T>> {
    if prediction.shape() != target.shape() {
        return shape_err(format!(
            "BCE shapes {:?} vs {:?}",
            prediction.shape(),
            target.shape()
        ));
    }
    let (lo, hi) = clamp_bounds::<T>();
    let n = T::of_f64(prediction.len() as f64);
    let data = prediction
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            if p < lo || p > hi {
                T::zero()
            } else {
                (p - t) / (p * (T::one() - p)) / n
            }
        })
        .collect();
    Tensor::new(prediction.shape().to_vec(), data)
}
