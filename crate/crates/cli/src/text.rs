//! Number formatting for human-readable reports.

/// `x` to six significant digits, in fixed notation for moderate exponents and
/// scientific notation otherwise. Trailing zeros are dropped.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Left-aligned `label: value` lines with the values in one column.
pub fn block(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        out.push_str(&format!("{k}:{} {v}\n", " ".repeat(pad)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(34.617_133_146_966_08), "34.6171");
        assert_eq!(sig6(1728.8476977526156), "1728.85");
        assert_eq!(sig6(-0.06928333302540741), "-0.0692833");
        assert_eq!(sig6(6235500.027713333), "6.2355e6");
        assert_eq!(sig6(8.018603159329645e-6), "8.0186e-6");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(2.0), "2");
        assert_eq!(sig6(f64::NAN), "NaN");
    }
}
