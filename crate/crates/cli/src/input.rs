//! Key/value input: TSV lines `key<TAB>hex` or length-prefixed binary records.

use std::io::{BufRead, Read};

use crate::CliError;

/// Parses `key<TAB>hex` lines. Blank lines are skipped; values must fit in
/// `value_bits` bits.
pub fn read_tsv<R: BufRead>(reader: R, value_bits: usize) -> Result<Vec<(Vec<u8>, u64)>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in reader.split(b'\n').enumerate() {
        let lineno = idx + 1;
        let mut line = line.map_err(|e| CliError::Input(format!("line {lineno}: {e}")))?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        if line.is_empty() {
            continue;
        }
        let tab = line
            .iter()
            .rposition(|&b| b == b'\t')
            .ok_or_else(|| CliError::Input(format!("line {lineno}: expected key<TAB>hex")))?;
        let value = parse_hex(&line[tab + 1..], value_bits)
            .map_err(|msg| CliError::Input(format!("line {lineno}: {msg}")))?;
        line.truncate(tab);
        out.push((line, value));
    }
    Ok(out)
}

fn parse_hex(text: &[u8], value_bits: usize) -> Result<u64, String> {
    let s = std::str::from_utf8(text).map_err(|_| "value is not valid UTF-8".to_string())?;
    let s = s.trim();
    let digits = s.strip_prefix("0x").unwrap_or(s);
    if digits.is_empty() || digits.len() > 16 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(format!("malformed hex value {s:?}"));
    }
    let v =
        u64::from_str_radix(digits, 16).map_err(|e| format!("malformed hex value {s:?}: {e}"))?;
    if value_bits < 64 && v >> value_bits != 0 {
        return Err(format!("value {s} does not fit in {value_bits} bits"));
    }
    Ok(v)
}

/// Next length-prefixed key (`u32` little-endian length, then bytes), or
/// `None` at a clean end of input.
pub fn read_binary_key<R: Read>(reader: &mut R) -> Result<Option<Vec<u8>>, CliError> {
    let mut len = [0u8; 4];
    match read_full(reader, &mut len)? {
        0 => return Ok(None),
        4 => {}
        got => {
            return Err(CliError::Input(format!(
                "truncated length prefix ({got} of 4 bytes)"
            )))
        }
    }
    let mut key = vec![0u8; u32::from_le_bytes(len) as usize];
    let got = read_full(reader, &mut key)?;
    if got != key.len() {
        return Err(CliError::Input(format!(
            "truncated key ({got} of {} bytes)",
            key.len()
        )));
    }
    Ok(Some(key))
}

/// Binary records: length-prefixed key followed by a `u64` little-endian value.
pub fn read_binary<R: Read>(
    mut reader: R,
    value_bits: usize,
) -> Result<Vec<(Vec<u8>, u64)>, CliError> {
    let mut out = Vec::new();
    while let Some(key) = read_binary_key(&mut reader)? {
        let record = out.len() + 1;
        let mut v = [0u8; 8];
        if read_full(&mut reader, &mut v)? != 8 {
            return Err(CliError::Input(format!("record {record}: truncated value")));
        }
        let v = u64::from_le_bytes(v);
        if value_bits < 64 && v >> value_bits != 0 {
            return Err(CliError::Input(format!(
                "record {record}: value {v:#x} does not fit in {value_bits} bits"
            )));
        }
        out.push((key, v));
    }
    Ok(out)
}

fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<usize, CliError> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(k) => filled += k,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(CliError::Input(e.to_string())),
        }
    }
    Ok(filled)
}

/// Lowercase hex padded to `ceil(value_bits / 4)` digits.
pub fn format_hex(value: u64, value_bits: usize) -> String {
    format!("{value:0width$x}", width = value_bits.div_ceil(4))
}
