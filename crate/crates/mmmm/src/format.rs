//! Number formatting and table writers shared by every subcommand.

use std::io::Write;

/// Rounds to `digits` decimals, ties away from zero.
pub fn round_half_up(x: f64, digits: usize) -> f64 {
    let scale = 10f64.powi(digits as i32);
    (x * scale + 0.5).floor() / scale
}

/// Fixed-decimal rendering; identical input always gives identical text.
pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    // "-0.000000" carries no information and breaks byte-level comparisons.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Scientific rendering with `digits` digits after the point.
pub fn scientific(x: f64, digits: usize) -> String {
    format!("{x:.digits$e}")
}

/// Value rounded to `digits` decimals, for JSON output.
pub fn rounded(x: f64, digits: usize) -> f64 {
    fixed(x, digits).parse().expect("formatted float parses")
}

/// Writes a header and rows as CSV.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// CSV as a string.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV fields are UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_up() {
        assert_eq!(fixed(round_half_up(0.00045, 4), 4), "0.0005");
        assert_eq!(fixed(round_half_up(0.000449, 4), 4), "0.0004");
        assert_eq!(fixed(round_half_up(0.00095, 4), 4), "0.0010");
    }

    #[test]
    fn negative_zero_is_plain_zero() {
        assert_eq!(fixed(-1e-12, 6), "0.000000");
        assert_eq!(fixed(-0.5, 1), "-0.5");
    }

    #[test]
    fn rounding_for_json() {
        assert_eq!(rounded(0.8230414, 6), 0.823041);
        assert_eq!(rounded(0.1769586, 6), 0.176959);
    }

    #[test]
    fn csv_layout() {
        let s = csv_string(&["a", "b"], &[vec!["1".into(), "x y".into()]]);
        assert_eq!(s, "a,b\n1,x y\n");
    }
}
