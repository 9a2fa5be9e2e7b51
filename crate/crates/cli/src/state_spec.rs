//! Initial-state specifications: a basis ket name such as `g0` or `e3`, or a
//! path to a text file of amplitudes.
//!
//! An amplitude file holds one basis amplitude per line in the order
//! `|g,0>, |e,0>, |g,1>, |e,1>, ...`, written as `re` or `re im`. Blank lines
//! and lines starting with `#` are skipped.

use num_complex::Complex64;
use rabi_core::model::Qubit;
use rabi_core::JointState;

fn parse_ket(spec: &str) -> Option<(Qubit, usize)> {
    let (head, tail) = spec.split_at(spec.char_indices().nth(1)?.0);
    let q = match head {
        "g" | "G" => Qubit::Ground,
        "e" | "E" => Qubit::Excited,
        _ => return None,
    };
    if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((q, tail.parse().ok()?))
}

fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>, String> {
    let mut amps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {}: bad number {s:?}", lineno + 1))
        };
        let amp = match fields.as_slice() {
            [re] => Complex64::new(num(re)?, 0.0),
            [re, im] => Complex64::new(num(re)?, num(im)?),
            _ => return Err(format!("line {}: expected `re` or `re im`", lineno + 1)),
        };
        amps.push(amp);
    }
    if amps.len() % 2 == 1 {
        amps.push(Complex64::new(0.0, 0.0));
    }
    while amps.len() < 4 {
        amps.push(Complex64::new(0.0, 0.0));
    }
    Ok(amps)
}

/// Resolve a state specification; errors are usage errors.
pub fn resolve(spec: &str) -> Result<JointState, String> {
    if let Some((q, n)) = parse_ket(spec) {
        return JointState::basis(q, n, n.max(1)).map_err(|e| e.to_string());
    }
    let path = std::path::Path::new(spec);
    if !path.is_file() {
        return Err(format!(
            "state {spec:?} is neither a basis ket like g0 / e3 nor a readable amplitude file"
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {spec}: {e}"))?;
    let amps = parse_amplitudes(&text)?;
    JointState::from_amplitudes(amps).map_err(|e| format!("{spec}: {e}"))
}
