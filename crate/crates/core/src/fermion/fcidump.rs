//! FCIDUMP reader and writer.
//!
//! Records are `value i j k l` with 1-based spatial indices and chemist-notation
//! two-electron integrals `(ij|kl)`. Index pattern `i j 0 0` is a one-body
//! integral, `0 0 0 0` the constant, `i 0 0 0` an orbital energy (ignored).
//! Integrals are real, so the eight-fold permutational group fills missing entries.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{spin_orbital, FermionHamiltonian, Spin};
use crate::error::{Result, WahtorError};

#[derive(Debug, Clone, PartialEq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub orbsym: Vec<usize>,
    pub isym: usize,
}

impl FcidumpHeader {
    /// `(n_up, n_dn)` implied by NELEC and MS2.
    pub fn spin_populations(&self) -> Option<(usize, usize)> {
        let nelec = self.nelec as i64;
        if (nelec + self.ms2) % 2 != 0 {
            return None;
        }
        let up = (nelec + self.ms2) / 2;
        let dn = nelec - up;
        (up >= 0 && dn >= 0).then_some((up as usize, dn as usize))
    }
}

pub fn parse_fcidump(text: &str) -> Result<FermionHamiltonian> {
    parse_fcidump_with_header(text).map(|(_, h)| h)
}

pub fn parse_fcidump_with_header(text: &str) -> Result<(FcidumpHeader, FermionHamiltonian)> {
    let lines: Vec<&str> = text.lines().collect();
    let (header, body_start) = parse_header(&lines)?;
    let n = header.norb;

    let mut chem = vec![0.0f64; n.pow(4)];
    let mut one = vec![0.0f64; n * n];
    let mut core = 0.0;
    let at4 = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;

    for (lineno, raw) in lines.iter().enumerate().skip(body_start) {
        let line_number = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(WahtorError::parse(
                line_number,
                format!("expected `value i j k l`, found {} fields", fields.len()),
            ));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| WahtorError::parse(line_number, format!("bad value `{}`", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| WahtorError::parse(line_number, format!("bad index `{f}`")))?;
            if *slot > n {
                return Err(WahtorError::parse(
                    line_number,
                    format!("index {slot} exceeds NORB = {n}"),
                ));
            }
        }
        match idx {
            [0, 0, 0, 0] => core = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (i, j) = (i - 1, j - 1);
                one[i * n + j] = value;
                one[j * n + i] = value;
            }
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    chem[at4(a, b, c, d)] = value;
                }
            }
            _ => {
                return Err(WahtorError::parse(
                    line_number,
                    format!("unsupported index pattern {idx:?}"),
                ))
            }
        }
    }

    let mut ham = FermionHamiltonian::zeros(2 * n);
    ham.core_energy = core;
    let spins = [Spin::Up, Spin::Down];
    for p in 0..n {
        for q in 0..n {
            let v = Complex64::new(one[p * n + q], 0.0);
            for s in spins {
                ham.one_body[(spin_orbital(p, s, n), spin_orbital(q, s, n))] = v;
            }
        }
    }
    // (pq|rs) a†_pσ a†_rτ a_sτ a_qσ  →  g[pσ, rτ, sτ, qσ]
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = chem[at4(p, q, r, s)];
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in spins {
                        for tau in spins {
                            ham.two_body[[
                                spin_orbital(p, sigma, n),
                                spin_orbital(r, tau, n),
                                spin_orbital(s, tau, n),
                                spin_orbital(q, sigma, n),
                            ]] = Complex64::new(v, 0.0);
                        }
                    }
                }
            }
        }
    }
    Ok((header, ham))
}

fn parse_header(lines: &[&str]) -> Result<(FcidumpHeader, usize)> {
    let mut text = String::new();
    let mut end = None;
    for (i, line) in lines.iter().enumerate() {
        let upper = line.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END") {
            text.push_str(&upper[..pos]);
            end = Some(i);
            break;
        }
        if upper.trim() == "/" {
            end = Some(i);
            break;
        }
        text.push_str(&upper);
        text.push(',');
    }
    let end = end.ok_or_else(|| WahtorError::parse(lines.len().max(1), "missing &END"))?;
    let header_line = end + 1;
    let text = text.trim_start().trim_start_matches("&FCI");

    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for token in text.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
        match token.split_once('=') {
            Some((k, v)) => {
                let mut values = Vec::new();
                if !v.is_empty() {
                    values.push(v.to_string());
                }
                entries.push((k.trim().to_string(), values));
            }
            None => match entries.last_mut() {
                Some((_, values)) => values.push(token.to_string()),
                None => {
                    return Err(WahtorError::parse(
                        header_line,
                        format!("unexpected header token `{token}`"),
                    ))
                }
            },
        }
    }
    let lookup = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    let scalar = |key: &str| -> Result<Option<i64>> {
        match lookup(key) {
            None => Ok(None),
            Some(v) => v
                .first()
                .and_then(|s| s.parse::<i64>().ok())
                .map(Some)
                .ok_or_else(|| WahtorError::parse(header_line, format!("bad {key} value"))),
        }
    };

    let norb = scalar("NORB")?.ok_or_else(|| WahtorError::parse(header_line, "missing NORB"))?;
    if norb <= 0 {
        return Err(WahtorError::parse(header_line, "NORB must be positive"));
    }
    let norb = norb as usize;
    let nelec = scalar("NELEC")?.unwrap_or(0).max(0) as usize;
    let ms2 = scalar("MS2")?.unwrap_or(0);
    let isym = scalar("ISYM")?.unwrap_or(1).max(0) as usize;
    let orbsym = match lookup("ORBSYM") {
        None => vec![1; norb],
        Some(v) => v
            .iter()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| WahtorError::parse(header_line, "bad ORBSYM entry"))?,
    };
    Ok((
        FcidumpHeader {
            norb,
            nelec,
            ms2,
            orbsym,
            isym,
        },
        end + 1,
    ))
}

/// Writes the symmetry-unique records of a spin-restricted, real Hamiltonian.
///
/// Spatial integrals are read back from the up/down blocks of the tensors;
/// imaginary parts are dropped.
pub fn write_fcidump(ham: &FermionHamiltonian, header: &FcidumpHeader) -> Result<String> {
    let n = ham.n_spatial()?;
    if header.norb != n {
        return Err(WahtorError::DimensionMismatch(format!(
            "header NORB = {} but Hamiltonian has {n} spatial orbitals",
            header.norb
        )));
    }
    let mut out = String::new();
    let orbsym = if header.orbsym.len() == n {
        header.orbsym.clone()
    } else {
        vec![1; n]
    };
    let sym: Vec<String> = orbsym.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(
        out,
        " &FCI NORB={},NELEC={},MS2={},",
        n, header.nelec, header.ms2
    );
    let _ = writeln!(out, "  ORBSYM={},", sym.join(","));
    let _ = writeln!(out, "  ISYM={},", header.isym);
    let _ = writeln!(out, " &END");

    let up = |p| spin_orbital(p, Spin::Up, n);
    let dn = |p| spin_orbital(p, Spin::Down, n);
    let pair = |i: usize, j: usize| i * (i + 1) / 2 + j;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    // (ij|kl) lives at g[iσ, kτ, lτ, jσ]
                    let v = ham.two_body[[up(i), dn(k), dn(l), up(j)]].re;
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ham.one_body[(up(i), up(j))].re;
            if v != 0.0 {
                let _ = writeln!(out, "{v:e} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", ham.core_energy);
    Ok(out)
}
