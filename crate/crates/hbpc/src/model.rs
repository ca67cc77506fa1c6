//! Model files: one ground atom per line, `%` comments, blank lines ignored.

use hbpc_core::GroundAtom;

use crate::fol::parse_ground_atom;
use crate::lex::Diagnostic;

pub fn read_model(src: &str) -> Result<Vec<GroundAtom>, Vec<Diagnostic>> {
    let mut atoms = Vec::new();
    let mut diags = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let text = line.split('%').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        match parse_ground_atom(text) {
            Ok(a) => atoms.push(a),
            Err(mut d) => {
                d.pos.line = n + 1;
                diags.push(d);
            }
        }
    }
    if diags.is_empty() {
        Ok(atoms)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks() {
        let m = read_model("% model\nfather(bob,alice)\n\n  male(bob) % trailing\n").unwrap();
        let s: Vec<String> = m.iter().map(ToString::to_string).collect();
        assert_eq!(s, ["father(bob,alice)", "male(bob)"]);
        let e = read_model("p(a)\np(X)\n").unwrap_err();
        assert_eq!(e[0].pos.line, 2);
    }
}
