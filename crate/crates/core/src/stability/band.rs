//! Sparse symmetric stencil matrices and banded LDLᵀ with inertia.

use super::StabilityError;

/// Symmetric matrix stored as its diagonal plus the strictly lower part in
/// compressed rows (columns ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct StencilMatrix {
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl StencilMatrix {
    pub(crate) fn with_capacity(n: usize, per_row: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        StencilMatrix {
            diag: Vec::with_capacity(n),
            row_ptr,
            cols: Vec::with_capacity(n * per_row),
            vals: Vec::with_capacity(n * per_row),
        }
    }

    /// Append the next row; `lower` must have ascending columns below the row index.
    pub(crate) fn push_row(&mut self, diag: f64, lower: &[(usize, f64)]) {
        let row = self.diag.len();
        debug_assert!(lower.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(lower.iter().all(|&(c, _)| c < row));
        self.diag.push(diag);
        for &(c, v) in lower {
            self.cols.push(c);
            self.vals.push(v);
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Strictly lower entries of row `i`.
    pub fn lower_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (r, c) = if i > j { (i, j) } else { (j, i) };
        self.lower_row(r).find(|&(k, _)| k == c).map_or(0.0, |(_, v)| v)
    }

    /// Largest `i − j` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n())
            .filter_map(|i| self.lower_row(i).next().map(|(c, _)| i - c))
            .max()
            .unwrap_or(0)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.diag[i] * x[i];
        }
        for i in 0..self.n() {
            for (c, v) in self.lower_row(i) {
                y[i] += v * x[c];
                y[c] += v * x[i];
            }
        }
    }

    pub fn norm_inf(&self) -> f64 {
        let mut rows: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for i in 0..self.n() {
            for (c, v) in self.lower_row(i) {
                rows[i] += v.abs();
                rows[c] += v.abs();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// `min_i (A_ii − Σ_j |A_ij|) / w_i`: a lower bound for the spectrum of
    /// `W^{-1/2} A W^{-1/2}` with `W = diag(w)`.
    pub fn gershgorin_lower(&self, w: &[f64]) -> f64 {
        let mut off = vec![0.0; self.n()];
        for i in 0..self.n() {
            for (c, v) in self.lower_row(i) {
                off[i] += v.abs();
                off[c] += v.abs();
            }
        }
        (0..self.n())
            .map(|i| (self.diag[i] - off[i]) / w[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Row-major dense copy, for small oracle problems.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = self.diag[i];
            for (c, v) in self.lower_row(i) {
                m[i * n + c] = v;
                m[c * n + i] = v;
            }
        }
        m
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `A − σ·diag(w) = L D Lᵀ` in band storage, without pivoting.
#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    bw: usize,
    /// Row `i` holds `L[i, i−bw..i]` at `[i·bw, (i+1)·bw)`.
    l: Vec<f64>,
    d: Vec<f64>,
    shift: f64,
}

impl BandLdl {
    pub fn factor(a: &StencilMatrix, shift: f64, w: &[f64]) -> Result<Self, StabilityError> {
        let n = a.n();
        let bw = a.bandwidth().max(1);
        let mut l = vec![0.0; n * bw];
        let mut d = vec![0.0; n];
        let scale = a.norm_inf().max(f64::MIN_POSITIVE);
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            let (done, rest) = l.split_at_mut(i * bw);
            let row = &mut rest[..bw];
            let p = |k: usize| k + bw - i;
            for (c, v) in a.lower_row(i) {
                row[p(c)] = v;
            }
            // row[k] becomes W_ik = L_ik·D_k
            for j in lo_i..i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let rj = &done[j * bw..(j + 1) * bw];
                let s = dot(&row[p(lo)..p(j)], &rj[lo + bw - j..]);
                row[p(j)] -= s;
            }
            let mut di = a.diag()[i] - shift * w[i];
            for k in lo_i..i {
                let wk = row[p(k)];
                let lk = wk / d[k];
                di -= wk * lk;
                row[p(k)] = lk;
            }
            if !(di.abs() > 1e-13 * scale) {
                return Err(StabilityError::Breakdown { row: i, pivot: di, shift });
            }
            d[i] = di;
        }
        Ok(BandLdl { n, bw, l, d, shift })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Number of eigenvalues of `(A, diag(w))` below the shift (Sylvester).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * bw..(i + 1) * bw];
            x[i] -= dot(&row[lo + bw - i..], &x[lo..i]);
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..self.n).rev() {
            let lo = i.saturating_sub(bw);
            let row = &self.l[i * bw..(i + 1) * bw];
            let xi = x[i];
            for (xk, lik) in x[lo..i].iter_mut().zip(&row[lo + bw - i..]) {
                *xk -= lik * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1-D Laplacian tridiag(-1, 2, -1) plus a diagonal perturbation.
    fn tridiag(n: usize, bump: f64) -> StencilMatrix {
        let mut m = StencilMatrix::with_capacity(n, 1);
        for i in 0..n {
            let lower = if i > 0 { vec![(i - 1, -1.0)] } else { vec![] };
            m.push_row(2.0 + if i == n / 2 { bump } else { 0.0 }, &lower);
        }
        m
    }

    #[test]
    fn dot_handles_remainders() {
        let a: Vec<f64> = (0..11).map(f64::from).collect();
        let b = vec![1.0; 11];
        assert_eq!(dot(&a, &b), 55.0);
        assert_eq!(dot(&a[..3], &b[..3]), 3.0);
        assert_eq!(dot(&[], &[]), 0.0);
    }

    #[test]
    fn solve_matches_matvec() {
        let m = tridiag(9, 0.5);
        let f = BandLdl::factor(&m, 0.0, &[1.0; 9]).unwrap();
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; 9];
        m.matvec(&x, &mut b);
        f.solve_in_place(&mut b);
        for (p, q) in b.iter().zip(&x) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn inertia_of_shifted_laplacian() {
        // eigenvalues 2 − 2cos(kπ/(n+1)), k = 1..n
        let n = 20;
        let m = tridiag(n, 0.0);
        let eig: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        for shift in [0.05, 0.7, 1.9, 3.3] {
            let f = BandLdl::factor(&m, shift, &vec![1.0; n]).unwrap();
            let expected = eig.iter().filter(|&&e| e < shift).count();
            assert_eq!(f.negative_pivots(), expected, "shift {shift}");
        }
    }

    #[test]
    fn breakdown_is_reported() {
        let mut m = StencilMatrix::with_capacity(2, 1);
        m.push_row(1.0, &[]);
        m.push_row(1.0, &[(0, 1.0)]);
        assert!(matches!(
            BandLdl::factor(&m, 0.0, &[1.0, 1.0]),
            Err(StabilityError::Breakdown { row: 1, .. })
        ));
    }

    #[test]
    fn stencil_accessors() {
        let m = tridiag(4, 0.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.bandwidth(), 1);
        assert_eq!(m.norm_inf(), 4.0);
        assert_eq!(m.gershgorin_lower(&[1.0; 4]), 0.0);
        let d = m.to_dense();
        assert_eq!(&d[..4], &[2.0, -1.0, 0.0, 0.0]);
    }
}
