//! The marker-deleting map on length-`m` blocks, for `ell = ⌈log k⌉ + 4`.
//!
//! Output is one bit shorter and holds no marker. Stored indices are `i-1`
//! in `ell - 4` bits.

use crate::bits::{push_uint, read_uint};
use crate::error::{Error, Result};

fn first_marker(bits: &[bool], ell: usize, max_start: usize) -> Option<usize> {
    let mut run = 0usize;
    for (p, &b) in bits.iter().enumerate() {
        run = if b { run + 1 } else { 0 };
        if run >= ell {
            let s = p + 1 - ell;
            return (s < max_start).then_some(s);
        }
        if p + 1 >= max_start + ell {
            return None;
        }
    }
    None
}

pub fn encode(c: &[bool], k: usize, ell: usize) -> Result<Vec<bool>> {
    if ell < 4 || c.len() != k + ell {
        return Err(Error::InvalidInput("block length must be k + ell with ell ≥ 4".into()));
    }
    let w = (ell - 4) as u32;
    let mut t = c.to_vec();
    t.push(false);
    let i = first_marker(&t, ell, k)
        .ok_or_else(|| Error::InvalidInput("block has no marker starting in its first k positions".into()))?;
    t.drain(i..i + ell);
    push_uint(&mut t, i as u64, w);
    t.extend([false, false]);
    let mut live = k;
    while live >= ell {
        let Some(i) = first_marker(&t[..live], ell, live) else {
            break;
        };
        t.drain(i..i + ell);
        push_uint(&mut t, i as u64, w);
        t.extend([false, false, false, true]);
        live -= ell;
    }
    debug_assert_eq!(t.len(), c.len() - 1);
    Ok(t)
}

pub fn decode(t: &[bool], k: usize, ell: usize) -> Result<Vec<bool>> {
    if ell < 4 || t.len() + 1 != k + ell {
        return Err(Error::MalformedTrailer("intermediate block has the wrong length".into()));
    }
    let w = ell - 4;
    let mut s = t.to_vec();
    let bad = |what: &str| Error::MalformedTrailer(format!("intermediate block: {what}"));
    loop {
        let len = s.len();
        if s[len - 1] {
            if len < w + 4 || s[len - 4..len - 1] != [false, false, false] {
                return Err(bad("later record"));
            }
            let i = read_uint(&s[len - w - 4..len - 4]) as usize;
            s.truncate(len - w - 4);
            if i > s.len() {
                return Err(bad("index out of range"));
            }
            s.splice(i..i, std::iter::repeat(true).take(ell));
        } else {
            if len < w + 3 || s[len - 2] {
                return Err(bad("first record"));
            }
            let i = read_uint(&s[len - w - 2..len - 2]) as usize;
            s.truncate(len - w - 2);
            if s.pop() != Some(false) || i > s.len() {
                return Err(bad("first record terminator"));
            }
            s.splice(i..i, std::iter::repeat(true).take(ell));
            return Ok(s);
        }
        if s.len() > k + ell {
            return Err(bad("too many records"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::has_run;

    fn all_blocks(k: usize, ell: usize) -> impl Iterator<Item = Vec<bool>> {
        let m = k + ell;
        (0u64..1 << m).map(move |v| (0..m).rev().map(|i| v >> i & 1 == 1).collect())
    }

    #[test]
    fn all_ones_round_trip() {
        for k in [2usize, 3, 4, 8] {
            let ell = crate::bits::ceil_log2(k as u64) as usize + 4;
            let c = vec![true; k + ell];
            let t = encode(&c, k, ell).unwrap();
            assert_eq!(t.len(), c.len() - 1);
            assert!(!has_run(&t, ell));
            assert_eq!(decode(&t, k, ell).unwrap(), c);
        }
    }

    #[test]
    fn exhaustive_small_k() {
        for k in [1usize, 2, 3, 4, 5, 8, 9] {
            let ell = crate::bits::ceil_log2(k as u64) as usize + 4;
            let mut seen = std::collections::HashSet::new();
            for c in all_blocks(k, ell) {
                let qualifies = has_run(&c[..k + ell - 1], ell);
                match encode(&c, k, ell) {
                    Ok(t) => {
                        assert!(qualifies);
                        assert_eq!(t.len(), c.len() - 1);
                        assert!(!has_run(&t, ell), "k={k} {c:?} -> {t:?}");
                        assert_eq!(decode(&t, k, ell).unwrap(), c, "k={k} {c:?} -> {t:?}");
                        assert!(seen.insert(t));
                    }
                    Err(_) => assert!(!qualifies),
                }
            }
        }
    }
}
