//! Comparison of reports against stored goldens: text must match exactly,
//! numbers up to a tolerance.

#[derive(Clone, Debug, PartialEq)]
enum Piece {
    Text(String),
    Num(f64, String),
}

fn split(line: &str) -> Vec<Piece> {
    let b = line.as_bytes();
    let mut out = Vec::new();
    let mut text = String::new();
    let mut i = 0;
    while i < b.len() {
        let sign = (b[i] == b'-' || b[i] == b'+') && b.get(i + 1).is_some_and(u8::is_ascii_digit);
        let starts_word = i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_');
        if (b[i].is_ascii_digit() || sign) && starts_word {
            let start = i;
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s = &line[start..i];
            if !text.is_empty() {
                out.push(Piece::Text(std::mem::take(&mut text)));
            }
            out.push(Piece::Num(s.parse().unwrap_or(f64::NAN), s.to_string()));
        } else {
            let c = line[i..].chars().next().unwrap();
            text.push(c);
            i += c.len_utf8();
        }
    }
    if !text.is_empty() {
        out.push(Piece::Text(text));
    }
    out
}

/// `Ok` when both texts have the same lines, the same words, and numbers within
/// `abs + rel * max(|a|, |b|)` of each other; otherwise the first difference.
pub fn compare_tolerant(expected: &str, actual: &str, rel: f64, abs: f64) -> Result<(), String> {
    let (el, al): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    for (k, (e, a)) in el.iter().zip(&al).enumerate() {
        let (pe, pa) = (split(e), split(a));
        let ok = pe.len() == pa.len()
            && pe.iter().zip(&pa).all(|(x, y)| match (x, y) {
                (Piece::Text(s), Piece::Text(t)) => s == t,
                (Piece::Num(u, _), Piece::Num(v, _)) => (u - v).abs() <= abs + rel * u.abs().max(v.abs()),
                _ => false,
            });
        if !ok {
            return Err(format!("line {}:\n  expected: {e}\n  actual:   {a}", k + 1));
        }
    }
    if el.len() != al.len() {
        return Err(format!("expected {} lines, got {}", el.len(), al.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_compare_with_tolerance_and_words_exactly() {
        let e = "residual 1.000e-11 at t=0.500000 (x2)";
        assert!(compare_tolerant(e, "residual 3.000e-11 at t=0.500001 (x2)", 1e-3, 1e-6).is_ok());
        assert!(compare_tolerant(e, "residual 1.000e-11 at t=0.600000 (x2)", 1e-3, 1e-6).is_err());
        assert!(compare_tolerant(e, "residual 1.000e-11 at s=0.500000 (x2)", 1e-3, 1e-6).is_err());
        assert!(compare_tolerant("a\nb", "a", 0.0, 0.0).is_err());
    }

    #[test]
    fn signs_and_identifiers_split_correctly() {
        assert_eq!(split("x2=-1.5e3"), vec![Piece::Text("x2=".into()), Piece::Num(-1500.0, "-1.5e3".into())]);
        assert_eq!(split("t^2 - 1"), vec![
            Piece::Text("t^".into()),
            Piece::Num(2.0, "2".into()),
            Piece::Text(" - ".into()),
            Piece::Num(1.0, "1".into())
        ]);
    }
}
