//! graph6 and sparse6 text encodings (the nauty formats).

use crate::error::{Error, Result};
use crate::graph::LabelledGraph;

const MAX_N: usize = 68_719_476_735;

fn encode_size(n: usize, out: &mut Vec<u8>) {
    assert!(n <= MAX_N, "graph too large for graph6");
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

fn decode_size(bytes: &[u8]) -> Result<(usize, usize)> {
    let sextet = |i: usize| -> Result<usize> {
        match bytes.get(i) {
            Some(&b) if (63..=126).contains(&b) => Ok((b - 63) as usize),
            Some(&b) => Err(Error::Parse(format!("invalid byte {b:#x}"))),
            None => Err(Error::Parse("truncated size field".into())),
        }
    };
    let first = sextet(0)?;
    if first < 63 {
        return Ok((first, 1));
    }
    if sextet(1)? < 63 {
        let mut n = 0;
        for i in 1..4 {
            n = (n << 6) | sextet(i)?;
        }
        return Ok((n, 4));
    }
    let mut n = 0;
    for i in 2..8 {
        n = (n << 6) | sextet(i)?;
    }
    Ok((n, 8))
}

fn push_bits(bits: &[bool], out: &mut Vec<u8>) {
    for chunk in bits.chunks(6) {
        let mut v = 0u8;
        for i in 0..6 {
            v <<= 1;
            if chunk.get(i).copied().unwrap_or(false) {
                v |= 1;
            }
        }
        out.push(v + 63);
    }
}

fn unpack_bits(bytes: &[u8]) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(bytes.len() * 6);
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(Error::Parse(format!("invalid byte {b:#x}")));
        }
        let v = b - 63;
        for i in (0..6).rev() {
            bits.push(v >> i & 1 == 1);
        }
    }
    Ok(bits)
}

pub fn to_graph6(g: &LabelledGraph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    encode_size(n, &mut out);
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            bits.push(g.has_edge(i, j));
        }
    }
    push_bits(&bits, &mut out);
    String::from_utf8(out).expect("graph6 is ASCII")
}

pub fn from_graph6(s: &str) -> Result<LabelledGraph> {
    let s = s.trim_end_matches(['\n', '\r']);
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    let (n, used) = decode_size(bytes)?;
    let need = (n * n.saturating_sub(1) / 2).div_ceil(6);
    let body = &bytes[used..];
    if body.len() != need {
        return Err(Error::Parse(format!(
            "graph6 body has {} bytes, expected {need}",
            body.len()
        )));
    }
    let bits = unpack_bits(body)?;
    let mut g = LabelledGraph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

fn sparse6_width(n: usize) -> usize {
    let mut k = 1;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

pub fn to_sparse6(g: &LabelledGraph) -> String {
    let n = g.n();
    let k = sparse6_width(n);
    let mut out = vec![b':'];
    encode_size(n, &mut out);
    let mut edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(a, b)| (b, a)).collect();
    edges.sort_unstable();
    let mut bits: Vec<bool> = Vec::new();
    let enc = |x: usize, bits: &mut Vec<bool>| {
        for i in (0..k).rev() {
            bits.push(x >> i & 1 == 1);
        }
    };
    let mut cur = 0usize;
    for (v, u) in edges {
        if v == cur {
            bits.push(false);
            enc(u, &mut bits);
        } else if v == cur + 1 {
            cur += 1;
            bits.push(true);
            enc(u, &mut bits);
        } else {
            cur = v;
            bits.push(true);
            enc(v, &mut bits);
            bits.push(false);
            enc(u, &mut bits);
        }
    }
    let pad = (6 - bits.len() % 6) % 6;
    if k < 6 && n == (1 << k) && pad >= k && cur < n - 1 {
        bits.push(false);
    }
    let pad = (6 - bits.len() % 6) % 6;
    bits.extend(std::iter::repeat_n(true, pad));
    push_bits(&bits, &mut out);
    String::from_utf8(out).expect("sparse6 is ASCII")
}

pub fn from_sparse6(s: &str) -> Result<LabelledGraph> {
    let s = s.trim_end_matches(['\n', '\r']);
    let s = s.strip_prefix(">>sparse6<<").unwrap_or(s);
    let bytes = s
        .as_bytes()
        .strip_prefix(b":")
        .ok_or_else(|| Error::Parse("sparse6 must start with ':'".into()))?;
    let (n, used) = decode_size(bytes)?;
    let bits = unpack_bits(&bytes[used..])?;
    let k = sparse6_width(n);
    let mut g = LabelledGraph::empty(n);
    let mut v = 0usize;
    let mut pos = 0usize;
    while pos + 1 + k <= bits.len() {
        let b = bits[pos];
        let mut x = 0usize;
        for i in 0..k {
            x = (x << 1) | bits[pos + 1 + i] as usize;
        }
        pos += 1 + k;
        if b {
            v += 1;
        }
        if x >= n || v >= n {
            break;
        }
        if x > v {
            v = x;
        } else if x != v {
            g.add_edge(x, v);
        } else {
            return Err(Error::Parse(format!("loop at vertex {}", x + 1)));
        }
    }
    Ok(g)
}

/// Parse either encoding, chosen by the leading character.
pub fn parse_graph(s: &str) -> Result<LabelledGraph> {
    let t = s.trim();
    if t.starts_with(':') || t.starts_with(">>sparse6<<") {
        from_sparse6(t)
    } else {
        from_graph6(t)
    }
}

/// Parse one graph per non-empty line.
pub fn parse_graphs(text: &str) -> Result<Vec<LabelledGraph>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(parse_graph)
        .collect()
}
