//! Householder tridiagonalization followed by the implicit-shift QL
//! iteration (the EISPACK `tred2`/`tql2` pair). Work arrays are column-major
//! so the inner loops walk contiguous memory.

use crate::error::{Error, Result};

struct ColMajor {
    n: usize,
    data: Vec<f64>,
}

impl ColMajor {
    #[inline]
    fn at(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n + row]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, x: f64) {
        self.data[col * self.n + row] = x;
    }

    #[inline]
    fn col_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.n..(col + 1) * self.n]
    }
}

/// Returns eigenvalues ascending, and the matching eigenvectors as columns of
/// a column-major `n × n` array when `want_vectors` is set.
pub(super) fn symmetric_eigen(
    n: usize,
    full: Vec<f64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(Vec::new)));
    }
    let mut v = ColMajor { n, data: full };
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, want_vectors);
    ql_implicit(&mut v, &mut d, &mut e, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&v.data[i * n..(i + 1) * n]);
        }
        out
    });
    Ok((values, vectors))
}

fn tridiagonalize(v: &mut ColMajor, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = v.n;
    for j in 0..n {
        d[j] = v.at(n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.at(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.at(j, j) * f;
                let col = &v.data[j * n..j * n + i];
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = v.col_mut(j);
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v.at(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (i, di) in d.iter_mut().enumerate() {
            *di = v.at(i, i);
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        let diag = v.at(i, i);
        v.set(n - 1, i, diag);
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.at(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.at(k, i + 1) * v.at(k, j);
                }
                let col = v.col_mut(j);
                for k in 0..=i {
                    col[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = v.at(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

fn ql_implicit(v: &mut ColMajor, d: &mut [f64], e: &mut [f64], accumulate: bool) -> Result<()> {
    let n = v.n;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(l));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if accumulate {
                        let (left, right) = v.data.split_at_mut((i + 1) * n);
                        let ci = &mut left[i * n..];
                        let ci1 = &mut right[..n];
                        for k in 0..n {
                            let hk = ci1[k];
                            ci1[k] = s * ci[k] + c * hk;
                            ci[k] = c * ci[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
