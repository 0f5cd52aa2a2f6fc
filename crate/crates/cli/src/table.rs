//! CSV output shared by `sweep` and `figures`.

use num_complex::Complex64;

/// Seventeen significant digits: parses back to the same double.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// `re`, `im` cells, empty when absent.
pub fn complex(z: Option<Complex64>) -> [String; 2] {
    match z {
        Some(z) => [real(z.re), real(z.im)],
        None => [String::new(), String::new()],
    }
}

pub fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn errors_are_quoted() {
        let out = to_csv(&["a".into(), "error".into()], &[vec!["1".into(), "bad, worse".into()]]);
        assert_eq!(out, "a,error\n1,\"bad, worse\"\n");
    }
}
