//! Number and table formatting for output files.

/// Significant digits written for every real number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, keeping trailing zeros so every
/// value in a column has the same precision. Plain decimal notation is used
/// for exponents in `-5..12`, scientific notation otherwise. Negative zero
/// prints as zero.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Formats an optional value, leaving the cell empty for `None`.
pub fn cell(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Joins cells into one CSV line.
pub fn row<I, S>(cells: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = String::new();
    for (i, c) in cells.into_iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(c.as_ref());
    }
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_range() {
        assert_eq!(num(1.0), "1.00000000000");
        assert_eq!(num(0.9), "0.900000000000");
        assert_eq!(num(-1.25), "-1.25000000000");
        assert_eq!(num(123456.0), "123456.000000");
        assert_eq!(num(1.5e-5), "0.0000150000000000");
    }

    #[test]
    fn zeros() {
        assert_eq!(num(0.0), "0.00000000000");
        assert_eq!(num(-0.0), "0.00000000000");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(num(1e-33), "1.00000000000e-33");
        assert_eq!(num(2.5e13), "2.50000000000e13");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(num(9.9999999999999), "10.0000000000");
    }

    #[test]
    fn cells() {
        assert_eq!(cell(None), "");
        assert_eq!(row(["a", "", "c"]), "a,,c\n");
    }
}
