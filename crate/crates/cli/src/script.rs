//! Walk scripts: one operator per line.
//!
//! ```text
//! select z1,z2
//! expand Z
//! navigate Z;Y
//! ```

use std::collections::BTreeSet;

use graphview_core::{Error, Label, Operation, VertexId};

fn items(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn labels(list: &str) -> BTreeSet<Label> {
    items(list).map(Label::from).collect()
}

/// Operations with their 1-based line numbers.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Operation)>, Error> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let op = match verb {
            "select" => Operation::Select(items(rest).map(VertexId::from).collect()),
            "expand" => Operation::Expand(labels(rest)),
            "navigate" => {
                let (c, b) = rest.split_once(';').ok_or_else(|| err("navigate needs `L_C;L_B`"))?;
                Operation::Navigate {
                    l_c: labels(c),
                    l_b: labels(b),
                }
            }
            other => return Err(err(&format!("unknown command `{other}`"))),
        };
        ops.push((i + 1, op));
    }
    Ok(ops)
}
