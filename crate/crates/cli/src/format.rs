//! Number and CSV formatting for result files.

/// Scientific notation with six significant digits and a signed two-digit
/// exponent, e.g. `1.53520e-02`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// [`sci`] for optional values; absent values become empty cells.
pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Joins cells with commas and terminates the line.
pub fn csv_row<S: AsRef<str>>(cells: &[S]) -> String {
    let mut line = cells
        .iter()
        .map(|c| c.as_ref())
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sci(0.015352), "1.53520e-02");
        assert_eq!(sci(2.6920), "2.69200e+00");
        assert_eq!(sci(402.0), "4.02000e+02");
        assert_eq!(sci(0.0), "0.00000e+00");
        assert_eq!(sci(-1.0e-120), "-1.00000e-120");
        assert_eq!(sci(f64::NAN), "nan");
        assert_eq!(sci_opt(None), "");
    }

    #[test]
    fn rows() {
        assert_eq!(csv_row(&["a", "", "c"]), "a,,c\n");
    }
}
