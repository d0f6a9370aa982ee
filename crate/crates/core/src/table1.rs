//! The reference table of `A_{k,1}(l)`, `0 <= k <= 7`, `0 <= l <= 5`.

use num_bigint::BigInt;

use crate::error::{Error, Result};

pub const TABLE1_TXT: &str = include_str!("../data/table1.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub k: u32,
    pub l: u32,
    pub value: BigInt,
}

pub fn parse_table(text: &str) -> Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |field: &str, msg: &str| Error::Parse {
            line: n + 1,
            field: field.to_string(),
            msg: msg.to_string(),
        };
        if fields.len() != 3 {
            return Err(err("row", "expected `k l value`"));
        }
        cells.push(TableCell {
            k: fields[0].parse().map_err(|_| err("k", "not an integer"))?,
            l: fields[1].parse().map_err(|_| err("l", "not an integer"))?,
            value: fields[2].parse().map_err(|_| err("value", "not an integer"))?,
        });
    }
    Ok(cells)
}

pub fn table1() -> Vec<TableCell> {
    parse_table(TABLE1_TXT).expect("embedded table is well formed")
}
