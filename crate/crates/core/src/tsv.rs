//! Small helpers for the TSV reports.

/// Formats `v` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Joins a header and rows of already-formatted cells into TSV text.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(70.1342, 6), "70.1342");
        assert_eq!(format_sig(0.009812345678, 6), "0.00981235");
        assert_eq!(format_sig(15.898816666, 6), "15.8988");
        assert_eq!(format_sig(1720368.0, 6), "1.72037e+06");
        assert_eq!(format_sig(0.4, 6), "0.4");
        assert_eq!(format_sig(-2.5e-7, 6), "-2.5e-07");
        assert_eq!(format_sig(100.0, 6), "100");
        assert_eq!(format_sig(999999.7, 6), "1e+06");
    }
}
