//! Output helpers shared by every writer in the crate.

use std::io::Write;

/// Floats are written with 17 significant digits so they round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV table with a header row.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-300, -2.5e17] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn table_has_header() {
        let mut buf = Vec::new();
        write_table(&mut buf, &["a", "b"], &[vec![1.0, 2.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a,b\n1.0000000000000000e0,"));
    }
}
