//! Laguerre polynomials and log-factorials used by the Fock-basis code.

const RESCALE: f64 = 1e100;

/// `ln(k!)` for `k = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln C(n, k)`.
pub fn ln_binomial(lnf: &[f64], n: usize, k: usize) -> f64 {
    lnf[n] - lnf[k] - lnf[n - k]
}

/// Ordinary Laguerre polynomial `L_n(x)` by forward recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    for j in 1..n {
        let next = ((2 * j + 1) as f64 - x) * cur - j as f64 * prev;
        prev = cur;
        cur = next / (j + 1) as f64;
    }
    cur
}

/// Associated Laguerre values `L_j^{(k)}(x)` for `j = 0..len`, returned as
/// `(ln|L|, sign)` pairs so that large degrees and orders never overflow.
pub fn assoc_laguerre_log_seq(k: usize, x: f64, len: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let to_log = |v: f64, scale: f64| -> (f64, f64) {
        if v == 0.0 {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (v.abs().ln() + scale, v.signum())
        }
    };
    let kf = k as f64;
    let mut scale = 0.0;
    let mut prev = 1.0;
    out.push((0.0, 1.0));
    if len == 1 {
        return out;
    }
    let mut cur = 1.0 + kf - x;
    out.push(to_log(cur, scale));
    for j in 1..len - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += RESCALE.ln();
        }
        out.push(to_log(cur, scale));
    }
    out
}
