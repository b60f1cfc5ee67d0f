//! Small numerical helpers shared by the statistics and lattice code:
//! adaptive Simpson quadrature, seed derivation and jackknife errors.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. Recursion stops at `max_depth`, returning the best estimate.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if !(b > a) {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Adaptive Simpson over `[a, b]` after splitting it into `panels` equal
/// pieces, each refined with a share of the tolerance.
pub fn adaptive_simpson_panels<F>(f: &F, a: f64, b: f64, tol: f64, panels: usize, max_depth: u32) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let share = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { a + h * (i + 1) as f64 };
            adaptive_simpson(f, lo, hi, share, max_depth)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// SplitMix64 finalizer, used to derive independent stream seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of stream `index` derived from a master seed.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

/// Delete-a-group jackknife standard error of the sample mean.
///
/// The data are split into `groups` contiguous blocks of (nearly) equal
/// size; each block is left out once.
pub fn jackknife_mean_se(values: &[f64], groups: usize) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let groups = groups.clamp(2, n);
    let total: f64 = values.iter().sum();
    let mut block_sums = vec![0.0; groups];
    let mut block_lens = vec![0usize; groups];
    for (i, x) in values.iter().enumerate() {
        let b = i * groups / n;
        block_sums[b] += x;
        block_lens[b] += 1;
    }
    let leave_out: Vec<f64> = block_sums
        .iter()
        .zip(&block_lens)
        .map(|(s, &len)| (total - s) / (n - len) as f64)
        .collect();
    let mean = leave_out.iter().sum::<f64>() / groups as f64;
    let ss: f64 = leave_out.iter().map(|x| (x - mean).powi(2)).sum();
    ((groups as f64 - 1.0) / groups as f64 * ss).sqrt()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Integer square root: the largest `r` with `r * r <= n`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_exp() {
        let cubic = |x: f64| x * x * x - 2.0 * x;
        assert!((adaptive_simpson(&cubic, 0.0, 2.0, 1e-12, 30) - 0.0).abs() < 1e-12);
        let e = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12, 40);
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-11);
        let kink = |x: f64| (1.0 - x.abs()).max(0.0);
        let v = adaptive_simpson_panels(&kink, -2.0, 2.0, 1e-10, 3, 40);
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isqrt_exact_near_squares() {
        for r in [0u64, 1, 2, 3, 1000, 99_999, 1 << 31, 3_037_000_499] {
            assert_eq!(isqrt(r * r), r);
            if r > 0 {
                assert_eq!(isqrt(r * r - 1), r - 1);
            }
            assert_eq!(isqrt(r * r + 1), if r == 0 { 1 } else { r });
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }

    #[test]
    fn jackknife_matches_classical_se_for_singletons() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((jackknife_mean_se(&xs, xs.len()) - se).abs() < 1e-12);
    }

    #[test]
    fn stream_seeds_differ() {
        let a = stream_seed(7, 0);
        let b = stream_seed(7, 1);
        let c = stream_seed(8, 0);
        assert!(a != b && a != c && b != c);
    }
}
