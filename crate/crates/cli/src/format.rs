/// Decimal with six significant digits; scientific notation outside
/// `[1e-4, 1e6)`.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    // exponent after rounding, so 9.9999996 counts as 10
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-4..6).contains(&exp) {
        return sci;
    }
    let decimals = (5 - exp) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(-0.3), "-0.300000");
        assert_eq!(sig6(0.123456789), "0.123457");
        assert_eq!(sig6(12.3456789), "12.3457");
        assert_eq!(sig6(-1.0), "-1.00000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(0.00123), "0.00123000");
    }
}
