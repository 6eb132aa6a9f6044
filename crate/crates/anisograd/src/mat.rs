//! Small fixed-size helpers for 2x2 matrices stored row-major as `[P11, P12, P21, P22]`.

pub type Mat2 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

pub const IDENTITY2: Mat2 = [1.0, 0.0, 0.0, 1.0];

pub fn dot(a: &Mat2, b: &Mat2) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm(a: &Mat2) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn scale(s: f64, a: &Mat2) -> Mat2 {
    [s * a[0], s * a[1], s * a[2], s * a[3]]
}

/// `a + s*b`
pub fn axpy(a: &Mat2, s: f64, b: &Mat2) -> Mat2 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

pub fn mul_vec(m: &Mat4, x: &Mat2) -> Mat2 {
    let mut y = [0.0; 4];
    for (r, row) in m.iter().enumerate() {
        y[r] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    y
}

pub fn mul_t_vec(m: &Mat4, x: &Mat2) -> Mat2 {
    let mut y = [0.0; 4];
    for (c, yc) in y.iter_mut().enumerate() {
        *yc = m[0][c] * x[0] + m[1][c] * x[1] + m[2][c] * x[2] + m[3][c] * x[3];
    }
    y
}

pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Mat4) -> Mat4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn quad_form(m: &Mat4, x: &Mat2) -> f64 {
    dot(x, &mul_vec(m, x))
}

/// The 2x2 matrix `v ⊗ ξ` with entries `v_a ξ_b`.
pub fn outer(v: [f64; 2], xi: [f64; 2]) -> Mat2 {
    [v[0] * xi[0], v[0] * xi[1], v[1] * xi[0], v[1] * xi[1]]
}
