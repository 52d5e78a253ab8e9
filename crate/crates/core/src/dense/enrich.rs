//! Marker enrichment: afterwards every length-`B` window holds a marker.
//!
//! A record `(i-1, φ(window), 0, 1^(2ell-o), 0)` replaces each excised window,
//! where `o` counts trailing window bits that fell into the closing run.

use crate::bits::{push_uint, read_uint};
use crate::dense::phi::Phi;
use crate::dense::scan::{GapBuffer, Scanner};
use crate::error::{Error, Result};
use crate::params::CodeParameters;

pub(crate) fn emit_record(p: &CodeParameters, phi: &Phi, start: usize, window: &[bool], overflow: usize, out: &mut Vec<bool>) -> Result<()> {
    push_uint(out, start as u64, p.idx_bits as u32);
    if overflow == 0 {
        phi.compress(window, out)?;
    } else {
        let mut padded = window.to_vec();
        padded.extend(std::iter::repeat(false).take(overflow));
        phi.compress(&padded, out)?;
    }
    out.push(false);
    out.extend(std::iter::repeat(true).take(2 * p.ell - overflow));
    out.push(false);
    Ok(())
}

pub fn encode(u: &[bool], p: &CodeParameters, phi: &Phi) -> Result<Vec<bool>> {
    let (b, ell) = (p.b, p.ell);
    let mut t1 = Scanner::new(ell, 0, u.len() + 2 * ell);
    let mut t2 = Vec::new();
    for &bit in u {
        t1.push(bit);
        if t1.tail_marker_free(b) {
            let start = t1.len() - b;
            emit_record(p, phi, start, &t1.bits()[start..], 0, &mut t2)?;
            t1.truncate(start);
        }
    }
    let mut o = 0;
    while o < 2 * ell {
        t1.push(true);
        o += 1;
        if t1.tail_marker_free(b) {
            let start = t1.len() - b;
            let live = t1.len() - o;
            debug_assert!(o < ell);
            emit_record(p, phi, start, &t1.bits()[start..live], o, &mut t2)?;
            t1.truncate(start);
            o = 0;
        }
    }
    let mut out = t1.into_bits();
    out.extend_from_slice(&t2);
    debug_assert_eq!(out.len(), u.len() + 2 * ell);
    Ok(out)
}

/// Splits trailing records off `t`; returns the body and `(position, bits)`
/// insertions in the order they must be applied.
fn parse_records(t: &[bool], p: &CodeParameters, phi: &Phi) -> Result<(usize, Vec<(usize, Vec<bool>)>)> {
    let (ell, idx) = (p.ell, p.idx_bits);
    let bad = |what: &str| Error::MalformedTrailer(format!("enrichment record: {what}"));
    let mut end = t.len();
    let mut ops = Vec::new();
    while end > 0 && !t[end - 1] {
        let mut run = 0;
        while run < end - 1 && t[end - 2 - run] {
            run += 1;
        }
        if run > 2 * ell || run <= ell || end < 2 + run {
            return Err(bad("closing run length"));
        }
        let overflow = 2 * ell - run;
        let len = idx + phi.out_len() + 2 + run;
        if end < len || t[end - 2 - run] {
            return Err(bad("truncated"));
        }
        let rec = &t[end - len..end];
        let start = read_uint(&rec[..idx]) as usize;
        let mut window = Vec::with_capacity(p.b);
        phi.expand(&rec[idx..idx + phi.out_len()], &mut window)?;
        if window[p.b - overflow..].iter().any(|&x| x) {
            return Err(bad("nonzero padding"));
        }
        window.truncate(p.b - overflow);
        ops.push((start, window));
        end -= len;
    }
    Ok((end, ops))
}

pub fn decode(t: &[bool], p: &CodeParameters, phi: &Phi) -> Result<Vec<bool>> {
    let ell = p.ell;
    let (body_len, ops) = parse_records(t, p, phi)?;
    if body_len < 2 * ell || t[body_len - 2 * ell..body_len].iter().any(|&x| !x) {
        return Err(Error::MalformedTrailer("enrichment body lacks its closing run".into()));
    }
    let mut g = GapBuffer::from_vec(t[..body_len - 2 * ell].to_vec());
    for (start, window) in ops {
        if start > g.len() {
            return Err(Error::MalformedTrailer("enrichment index out of range".into()));
        }
        g.insert(start, &window);
    }
    Ok(g.into_vec())
}

/// Slow restart-scan encoder, kept as a reference.
pub fn encode_reference(u: &[bool], p: &CodeParameters, phi: &Phi) -> Result<Vec<bool>> {
    let (b, ell) = (p.b, p.ell);
    let mut t: Vec<bool> = u.to_vec();
    t.extend(std::iter::repeat(true).take(2 * ell));
    let mut live = u.len();
    loop {
        let found = (0..live).find(|&i| i + b <= t.len() && !crate::bits::has_run(&t[i..i + b], ell));
        let Some(i) = found else { break };
        let mut rec = Vec::new();
        if i + b <= live {
            emit_record(p, phi, i, &t[i..i + b], 0, &mut rec)?;
            t.drain(i..i + b);
            live -= b;
        } else {
            let o = i + b - live;
            emit_record(p, phi, i, &t[i..live], o, &mut rec)?;
            t.drain(i..live);
            live = i;
        }
        t.extend(rec);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::check_property_rich;
    use crate::BitString;
    use proptest::prelude::*;

    fn setup(n: usize) -> (CodeParameters, Phi) {
        let p = CodeParameters::scaled(2, n, 2).unwrap();
        let phi = Phi::new(p.ell, p.b, p.phi_len);
        (p, phi)
    }

    #[test]
    fn rich_input_only_gains_run() {
        let (p, phi) = setup(200);
        let u: Vec<bool> = (0..200).map(|i| i % 4 >= 2).collect();
        let t = encode(&u, &p, &phi).unwrap();
        let mut want = u.clone();
        want.extend([true; 4]);
        assert_eq!(t, want);
    }

    #[test]
    fn zeros_round_trip() {
        for n in [20usize, 53, 54, 55, 107, 108, 300, 1000] {
            let (p, phi) = setup(n);
            let u = vec![false; n];
            let t = encode(&u, &p, &phi).unwrap();
            assert_eq!(t.len(), n + 2 * p.ell);
            assert!(check_property_rich(&BitString::from(t.clone()), &p), "n={n}");
            assert_eq!(t, encode_reference(&u, &p, &phi).unwrap());
            assert_eq!(decode(&t, &p, &phi).unwrap(), u);
        }
    }

    #[test]
    fn boundary_overflow_case() {
        // a marker-free tail ending in a single one spills into the closing run
        let (p, phi) = setup(120);
        let mut u: Vec<bool> = (0..120).map(|i| i % 3 == 0 || i % 3 == 1).collect();
        for b in u[120 - 60..].iter_mut() {
            *b = false;
        }
        u[119] = true;
        let t = encode(&u, &p, &phi).unwrap();
        assert_eq!(t, encode_reference(&u, &p, &phi).unwrap());
        assert_eq!(decode(&t, &p, &phi).unwrap(), u);
    }

    #[test]
    fn malformed_trailer() {
        let (p, phi) = setup(100);
        let mut t = vec![false; 100];
        t.extend([true, true, true, false]);
        assert!(decode(&t, &p, &phi).is_err());
    }

    fn sparse_ones(max: usize) -> impl Strategy<Value = Vec<bool>> {
        (0usize..6).prop_flat_map(move |w| proptest::collection::vec((0usize..12).prop_map(move |v| v < w), 1..max))
    }

    proptest! {
        #[test]
        fn streaming_matches_reference(u in sparse_ones(400)) {
            let (p, phi) = setup(u.len().max(2));
            let t = encode(&u, &p, &phi).unwrap();
            prop_assert_eq!(t.len(), u.len() + 2 * p.ell);
            prop_assert_eq!(&t, &encode_reference(&u, &p, &phi).unwrap());
            prop_assert!(check_property_rich(&BitString::from(t.clone()), &p));
            prop_assert_eq!(decode(&t, &p, &phi).unwrap(), u);
        }
    }
}
