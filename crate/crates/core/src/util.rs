//! Number formatting and small statistics helpers shared by the report writers.

use num_rational::BigRational;
use num_traits::ToPrimitive;

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"num/den"`, always with an explicit denominator.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Real number with 9 significant digits, '.' separator, trailing zeros
/// trimmed. Plain decimal notation for exponents in [-6, 15), scientific
/// otherwise. Independent of locale.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    if !(-6..15).contains(&exp) {
        let m = trim_fraction(mantissa.to_string());
        return format!("{m}e{exp}");
    }
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    trim_fraction(out)
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Empirical quantile by the nearest-rank rule on a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Kolmogorov distance sup_x |F_n(x) − F(x)| between the empirical CDF of a
/// sorted sample and a continuous CDF `cdf`.
pub fn kolmogorov_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Fraction of a sorted sample that is `<= x`.
pub fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(std::f64::consts::E), "2.71828183");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(0.005), "0.005");
        assert_eq!(fmt_real(0.445_108_185_698_5), "0.445108186");
        assert_eq!(fmt_real(-12.5), "-12.5");
        assert_eq!(fmt_real(123_456_789_012.0), "123456789000");
        assert_eq!(fmt_real(1.5e-9), "1.5e-9");
        assert_eq!(fmt_real(9.999_999_999_9), "10");
        assert_eq!(fmt_real(0.000_123_456_789_1), "0.000123456789");
    }

    #[test]
    fn kolmogorov_matches_grid_search() {
        let sample = [0.05, 0.1, 0.1, 0.3, 0.45, 0.7];
        let cdf = |x: f64| x.clamp(0.0, 1.0);
        let d = kolmogorov_distance(&sample, cdf);
        // brute force: evaluate |F_n − F| just left and right of every point on a fine grid
        let mut brute: f64 = 0.0;
        for i in 0..=200_000 {
            let x = i as f64 / 200_000.0;
            brute = brute.max((ecdf_sorted(&sample, x) - cdf(x)).abs());
            let left = sample.partition_point(|&v| v < x) as f64 / sample.len() as f64;
            brute = brute.max((left - cdf(x)).abs());
        }
        assert!((d - brute).abs() < 1e-4, "{d} vs {brute}");
    }

    #[test]
    fn quantiles_and_means() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 2.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        let (m, se) = mean_and_se(&xs);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
