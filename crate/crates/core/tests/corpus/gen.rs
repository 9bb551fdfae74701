//! Random programs over the diagnostic grammar, driven by an external
//! chooser so both proptest and seeded RNGs can feed it.

pub const LITERALS: &[&str] =
    &["undefined", "null", "true", "false", "0", "1", "2", "10", r#""""#, r#""10""#, r#""abc""#, r#"",""#, r#""[""#, "[]", "{}"];
const UNARY: &[&str] = &["typeof", "!", "+", "-"];
const BINARY: &[&str] = &["+", "-", "==", "===", "<", ">=", "&&", "||", "??"];

/// Renders a random expression of at most `size` nodes (`size >= 1`).
/// `pick(n)` must return a value below `n`.
pub fn program(size: usize, pick: &mut impl FnMut(usize) -> usize) -> String {
    if size <= 1 {
        return LITERALS[pick(LITERALS.len())].to_string();
    }
    let rest = size - 1;
    match pick(if size >= 4 { 7 } else if size >= 3 { 6 } else { 4 }) {
        0 => LITERALS[pick(LITERALS.len())].to_string(),
        1 => {
            let op = UNARY[pick(UNARY.len())];
            let e = program(rest, pick);
            if op == "typeof" { format!("typeof({e})") } else { format!("({op}{e})") }
        }
        2 => format!("({}).sort()", program(rest, pick)),
        3 => format!("[{}]", program(rest, pick)),
        4 => {
            let (a, b) = split(rest, pick);
            format!("({} {} {})", program(a, pick), BINARY[pick(BINARY.len())], program(b, pick))
        }
        5 => {
            let (a, b) = split(rest, pick);
            if pick(2) == 0 {
                format!("({})[{}]", program(a, pick), program(b, pick))
            } else {
                format!("[{}, {}]", program(a, pick), program(b, pick))
            }
        }
        _ => {
            let a = 1 + pick(rest - 2);
            let (b, c) = split(rest - a, pick);
            format!("({} ? {} : {})", program(a, pick), program(b, pick), program(c, pick))
        }
    }
}

fn split(n: usize, pick: &mut impl FnMut(usize) -> usize) -> (usize, usize) {
    let a = 1 + pick(n - 1);
    (a, n - a)
}
