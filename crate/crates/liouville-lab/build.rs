fn main() {
    // Dense LU factorizations go through the system LAPACK (shipped inside
    // OpenBLAS on this platform). Thread count is pinned at runtime; see
    // `linalg::pin_blas_threads`.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
