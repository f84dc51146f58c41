//! Dense LU factorization backed by the system LAPACK.
//!
//! The solver needs repeated solves with square Jacobians of a few thousand
//! unknowns, both with the matrix and with its transpose (the transpose path
//! feeds the smallest-singular-value estimate used for fold classification).
//! LAPACK's `dgetrf`/`dgetrs` cover both from a single factorization.

use std::os::raw::c_int;
use std::sync::Once;
use thiserror::Error;

extern "C" {
    fn openblas_set_num_threads(n: c_int);
    fn dgetrf_(
        m: *const c_int,
        n: *const c_int,
        a: *mut f64,
        lda: *const c_int,
        ipiv: *mut c_int,
        info: *mut c_int,
    );
    fn dgetrs_(
        trans: *const u8,
        n: *const c_int,
        nrhs: *const c_int,
        a: *const f64,
        lda: *const c_int,
        ipiv: *const c_int,
        b: *mut f64,
        ldb: *const c_int,
        info: *mut c_int,
    );
}

static PIN: Once = Once::new();

/// Forces single-threaded BLAS before the first factorization.
///
/// Reductions inside a multi-threaded BLAS may reassociate sums between runs,
/// which would break the byte-identical-output contract. Row parallelism in
/// this crate goes through rayon instead, where each row is an independent,
/// sequentially reduced sum.
pub fn pin_blas_threads() {
    PIN.call_once(|| unsafe { openblas_set_num_threads(1) });
}

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("matrix is exactly singular: zero pivot at position {0}")]
    Singular(usize),
    #[error("invalid argument {0} passed to LAPACK")]
    BadArgument(i32),
    #[error("dimension mismatch: matrix is {n}x{n}, data length {len}")]
    Shape { n: usize, len: usize },
}

/// Square matrix in column-major storage, the layout LAPACK consumes in place.
pub struct ColMajor {
    pub n: usize,
    pub data: Vec<f64>,
}

impl ColMajor {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n + row]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        &mut self.data[col * self.n + row]
    }

    /// Mutable view of one column.
    #[inline]
    pub fn col_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.n..(col + 1) * self.n]
    }
}

/// LU factorization with partial pivoting; consumes the matrix.
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    ipiv: Vec<c_int>,
}

impl DenseLu {
    pub fn factor(mut a: ColMajor) -> Result<Self, LinAlgError> {
        pin_blas_threads();
        let n = a.n;
        if a.data.len() != n * n {
            return Err(LinAlgError::Shape { n, len: a.data.len() });
        }
        let mut ipiv = vec![0 as c_int; n.max(1)];
        let mut info: c_int = 0;
        let nn = n as c_int;
        unsafe {
            dgetrf_(&nn, &nn, a.data.as_mut_ptr(), &nn, ipiv.as_mut_ptr(), &mut info);
        }
        if info < 0 {
            return Err(LinAlgError::BadArgument(info));
        }
        if info > 0 {
            return Err(LinAlgError::Singular(info as usize));
        }
        Ok(Self { n, lu: a.data, ipiv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` (or `Aᵀ x = b`) in place.
    pub fn solve_in_place(&self, b: &mut [f64], transpose: bool) -> Result<(), LinAlgError> {
        if b.len() != self.n {
            return Err(LinAlgError::Shape { n: self.n, len: b.len() });
        }
        let trans: &[u8; 1] = if transpose { b"T" } else { b"N" };
        let nn = self.n as c_int;
        let one: c_int = 1;
        let mut info: c_int = 0;
        unsafe {
            dgetrs_(
                trans.as_ptr(),
                &nn,
                &one,
                self.lu.as_ptr(),
                &nn,
                self.ipiv.as_ptr(),
                b.as_mut_ptr(),
                &nn,
                &mut info,
            );
        }
        if info != 0 {
            return Err(LinAlgError::BadArgument(info));
        }
        Ok(())
    }

    /// Estimates the smallest singular value by inverse power iteration on
    /// `AᵀA`, reusing the factorization for both triangular solves.
    ///
    /// The start vector is fixed so the estimate is reproducible.
    pub fn smallest_singular_value(&self, iters: usize) -> Result<f64, LinAlgError> {
        let n = self.n;
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut sigma = f64::INFINITY;
        for _ in 0..iters {
            // y = A^{-T} x, z = A^{-1} y  =>  z = (AᵀA)^{-1} x
            self.solve_in_place(&mut x, true)?;
            self.solve_in_place(&mut x, false)?;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Ok(0.0);
            }
            // ||(AᵀA)^{-1}|| ≈ norm per unit input, so σ_min ≈ 1/√norm.
            sigma = 1.0 / norm.sqrt();
            for v in x.iter_mut() {
                *v /= norm;
            }
        }
        Ok(sigma)
    }
}
