use std::path::Path;

use tiltalloc::poly::text::parse_polynomial;
use tiltalloc::poly::PolySystem;
use tiltalloc::Rational;

/// Quotient dimension of a fixture ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Finite(usize),
    Positive,
}

pub struct Fixture {
    pub name: String,
    pub system: PolySystem<Rational>,
    pub expected: Expected,
}

pub fn load(path: &Path) -> Vec<Fixture> {
    let text = std::fs::read_to_string(path).expect("fixture file");
    let mut out = Vec::new();
    let mut header: Option<(String, Vec<String>, Expected)> = None;
    let mut gens: Vec<String> = Vec::new();
    let mut flush = |header: &mut Option<(String, Vec<String>, Expected)>,
                     gens: &mut Vec<String>| {
        if let Some((name, vars, expected)) = header.take() {
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let polys = gens
                .iter()
                .map(|g| parse_polynomial(g, &names).expect("fixture generator"))
                .collect();
            out.push(Fixture {
                name,
                system: PolySystem::new(polys, vars).expect("fixture system"),
                expected,
            });
        }
        gens.clear();
    };
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(h) = line.strip_prefix('=') {
            flush(&mut header, &mut gens);
            let parts: Vec<&str> = h.split(':').map(str::trim).collect();
            let vars = parts[1].split_whitespace().map(String::from).collect();
            let expected = match parts[2] {
                "inf" => Expected::Positive,
                d => Expected::Finite(d.parse().expect("dimension")),
            };
            header = Some((parts[0].to_string(), vars, expected));
        } else {
            gens.push(line.to_string());
        }
    }
    flush(&mut header, &mut gens);
    out
}
