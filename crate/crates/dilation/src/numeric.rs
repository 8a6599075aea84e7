//! Small numeric helpers shared across modules.

/// Numerically stable log(Σ exp(vᵢ)) with the shift-by-max trick.
///
/// Returns `f64::NEG_INFINITY` for an empty slice or when every value is
/// `-inf`. The reduction order is the slice order, so results are
/// deterministic for a fixed input order.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// SplitMix64 step; used to derive fixed generic frames without an RNG dep in
/// the hot path.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic value in (-1, 1) keyed by a pair of indices.
pub(crate) fn hashed_unit(i: usize, j: usize) -> f64 {
    let h = splitmix64((i as u64).wrapping_mul(0x6A09E667F3BCC909) ^ (j as u64));
    let u = (h >> 11) as f64 / (1u64 << 53) as f64; // [0, 1)
    2.0 * u - 1.0
}

/// FNV-1a 64-bit hash, used to key caches and fingerprint configs.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF29CE484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001B3);
    }
    h
}

/// Format a double the way C's `%.17g` would: 17 significant digits,
/// positional or scientific depending on magnitude, trailing zeros trimmed.
/// 17 digits guarantee exact round-trip parsing.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let all_digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = all_digits.trim_end_matches('0');
    let digits = if trimmed.is_empty() { "0" } else { trimmed };

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..17).contains(&exp) {
        if exp >= 0 {
            let e = exp as usize;
            if digits.len() > e + 1 {
                out.push_str(&digits[..=e]);
                out.push('.');
                out.push_str(&digits[e + 1..]);
            } else {
                out.push_str(digits);
                out.push_str(&"0".repeat(e + 1 - digits.len()));
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push(if exp >= 0 { '+' } else { '-' });
        let ae = exp.abs();
        if ae < 10 {
            out.push('0');
        }
        out.push_str(&ae.to_string());
    }
    out
}

/// Slope of the least-squares line through `(x, y)` points.
///
/// A single point degenerates to `y/x` (the ratio estimator).
pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => {
            let (x, y) = points[0];
            if x != 0.0 {
                y / x
            } else {
                0.0
            }
        }
        n => {
            let nf = n as f64;
            let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
            let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
            let mut num = 0.0;
            let mut den = 0.0;
            for &(x, y) in points {
                num += (x - mx) * (y - my);
                den += (x - mx) * (x - mx);
            }
            num / den
        }
    }
}
