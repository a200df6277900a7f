//! Numeric building blocks shared by the analysis stages.

use std::collections::VecDeque;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Median filter with a zero-padded border (same convention as
/// `scipy.signal.medfilt`). `len` must be odd; 1 is the identity.
pub fn median_filter(x: &[f64], len: usize) -> Vec<f64> {
    debug_assert!(len % 2 == 1);
    if len <= 1 || x.is_empty() {
        return x.to_vec();
    }
    let half = len / 2;
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= x.len() {
            0.0
        } else {
            x[i as usize]
        }
    };
    let mut window: Vec<f64> = (-(half as isize)..=half as isize).map(at).collect();
    window.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(x.len());
    out.push(window[half]);
    for i in 1..x.len() as isize {
        let leaving = at(i - 1 - half as isize);
        let entering = at(i + half as isize);
        let pos = window
            .binary_search_by(|v| v.total_cmp(&leaving))
            .expect("value leaving the window is present");
        window.remove(pos);
        let pos = window
            .binary_search_by(|v| v.total_cmp(&entering))
            .unwrap_or_else(|p| p);
        window.insert(pos, entering);
        out.push(window[half]);
    }
    out
}

/// Maximum of each length-`w` window `x[i..i + w]`, for every `i` with a full
/// window.
pub fn sliding_max(x: &[f64], w: usize) -> Vec<f64> {
    if w == 0 || x.len() < w {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(x.len() - w + 1);
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (i, &v) in x.iter().enumerate() {
        while dq.back().is_some_and(|&j| x[j] <= v) {
            dq.pop_back();
        }
        dq.push_back(i);
        if dq[0] + w <= i {
            dq.pop_front();
        }
        if i + 1 >= w {
            out.push(x[dq[0]]);
        }
    }
    out
}

/// `|X_k|²` for `k = 0..=n/2` of the real input.
pub fn power_spectrum(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    fft.process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf.iter().map(|c| c.norm_sqr()).collect()
}

/// Least-squares polynomial of degree `degree` through `(i, y[i])`, evaluated
/// at the same abscissae. The abscissae are mapped onto [-1, 1] before the
/// normal equations are formed.
pub fn polyfit_values(y: &[f64], degree: usize) -> Vec<f64> {
    let n = y.len();
    if n == 0 {
        return Vec::new();
    }
    let degree = degree.min(n - 1);
    let scale = |i: usize| {
        if n == 1 {
            0.0
        } else {
            2.0 * i as f64 / (n - 1) as f64 - 1.0
        }
    };
    let m = degree + 1;
    // normal equations A c = b with A_jk = Σ x^(j+k), b_j = Σ x^j y
    let mut moments = vec![0.0; 2 * degree + 1];
    let mut b = vec![0.0; m];
    for (i, &yi) in y.iter().enumerate() {
        let x = scale(i);
        let mut p = 1.0;
        for (k, mom) in moments.iter_mut().enumerate() {
            *mom += p;
            if k < m {
                b[k] += p * yi;
            }
            p *= x;
        }
    }
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..m).map(|k| moments[j + k]).collect())
        .collect();
    let coef = solve(&mut a, &mut b);
    (0..n)
        .map(|i| {
            let x = scale(i);
            coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
        .collect()
}

/// Gaussian elimination with partial pivoting. Singular pivots yield zero
/// coefficients for the affected unknowns.
fn solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (i, row) in rest.iter_mut().enumerate() {
            let f = row[col] / p;
            if f == 0.0 {
                continue;
            }
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * y;
            }
            b[col + 1 + i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let p = a[row][row];
        if p.abs() < 1e-300 {
            continue;
        }
        let s: f64 = (row + 1..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / p;
    }
    x
}

/// Linear interpolation of `(xs, ys)` at `x`; `xs` strictly increasing and
/// `x` within its range.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => ys[i],
        Err(0) => ys[0],
        Err(i) if i >= xs.len() => ys[xs.len() - 1],
        Err(i) => {
            let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] + t * (ys[i] - ys[i - 1])
        }
    }
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x[..n].iter().zip(&y[..n]) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
