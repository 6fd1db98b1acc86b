//! Grid and summary export.
//!
//! Binary grids are one text header line followed by N² little-endian f64
//! values in row-major order (row index along the second lattice direction).

use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use super::{IdentityReport, VortexProblem, VortexSolution, CONVENTION};

#[derive(Clone, Debug, PartialEq)]
pub struct GridHeader {
    pub n: usize,
    pub modulus: Complex64,
    pub area: f64,
    pub field: String,
    pub convention: String,
}

impl GridHeader {
    pub fn new(p: &VortexProblem, field: &str) -> Self {
        GridHeader {
            n: p.geometry.grid,
            modulus: p.geometry.modulus,
            area: p.geometry.area,
            field: field.to_string(),
            convention: CONVENTION.to_string(),
        }
    }

    fn line(&self) -> String {
        format!(
            "relsw-grid N={} modulus={:?},{:?} area={:?} field={} convention={}\n",
            self.n, self.modulus.re, self.modulus.im, self.area, self.field, self.convention
        )
    }

    fn parse(line: &str) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let rest = line.trim_end().strip_prefix("relsw-grid ").ok_or_else(|| bad("missing magic"))?;
        let (head, convention) = rest.split_once(" convention=").ok_or_else(|| bad("missing convention"))?;
        let mut n = None;
        let mut modulus = None;
        let mut area = None;
        let mut field = None;
        for kv in head.split(' ') {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("malformed header"))?;
            match k {
                "N" => n = v.parse().ok(),
                "modulus" => {
                    let (re, im) = v.split_once(',').ok_or_else(|| bad("malformed modulus"))?;
                    modulus = Some(Complex64::new(
                        re.parse().map_err(|_| bad("modulus"))?,
                        im.parse().map_err(|_| bad("modulus"))?,
                    ));
                }
                "area" => area = v.parse().ok(),
                "field" => field = Some(v.to_string()),
                _ => return Err(bad("unknown header key")),
            }
        }
        Ok(GridHeader {
            n: n.ok_or_else(|| bad("N"))?,
            modulus: modulus.ok_or_else(|| bad("modulus"))?,
            area: area.ok_or_else(|| bad("area"))?,
            field: field.ok_or_else(|| bad("field"))?,
            convention: convention.to_string(),
        })
    }
}

pub fn write_grid_binary<W: Write>(mut w: W, header: &GridHeader, values: &[f64]) -> io::Result<()> {
    if values.len() != header.n * header.n {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "grid size does not match header"));
    }
    w.write_all(header.line().as_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_binary<R: BufRead>(mut r: R) -> io::Result<(GridHeader, Vec<f64>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header = GridHeader::parse(&line)?;
    let mut values = Vec::with_capacity(header.n * header.n);
    let mut buf = [0u8; 8];
    for _ in 0..header.n * header.n {
        r.read_exact(&mut buf)?;
        values.push(f64::from_le_bytes(buf));
    }
    Ok((header, values))
}

/// One-row CSV summary of a solve (header row included, LF endings).
pub fn summary_csv(p: &VortexProblem, sol: &VortexSolution, rep: &IdentityReport) -> String {
    let zeros: Vec<String> = sol.zero_locations.iter().map(|(s, t)| format!("{s:.6}:{t:.6}")).collect();
    let mut out = String::from(
        "N,modulus_re,modulus_im,area,tau,d,iterations,residual_sup,curvature_integral,curvature_over_2pi,\
plaquette_flux_sum,zero_count,dbar_residual,norm_quadrature,norm_identity,discrepancy,continuum_discrepancy,zeros\n",
    );
    let two_pi = 2.0 * std::f64::consts::PI;
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{:e},{:.12},{:.12},{:.12},{},{:e},{:.12},{:.12},{:e},{:e},{}\n",
        p.geometry.grid,
        p.geometry.modulus.re,
        p.geometry.modulus.im,
        p.geometry.area,
        p.tau,
        p.degree(),
        sol.iterations,
        sol.residual_sup,
        sol.curvature_integral,
        sol.curvature_integral / two_pi,
        sol.plaquette_flux_sum,
        sol.zero_count,
        sol.dbar_residual,
        rep.norm_quadrature,
        rep.norm_identity,
        rep.discrepancy,
        rep.continuum_discrepancy,
        zeros.join(" ")
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex::TorusGeometry;

    #[test]
    fn binary_round_trip() {
        let g = TorusGeometry::new(Complex64::new(0.1, 1.3), 8, 2.5).unwrap();
        let p = VortexProblem::new(g, vec![], 1.0, 1e-10).unwrap();
        let header = GridHeader::new(&p, "phi_modulus");
        let values: Vec<f64> = (0..64).map(|i| i as f64 * 0.1 - 3.0).collect();
        let mut buf = Vec::new();
        write_grid_binary(&mut buf, &header, &values).unwrap();
        let (h2, v2) = read_grid_binary(&buf[..]).unwrap();
        assert_eq!(h2, header);
        assert_eq!(v2, values);
        let newline = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(buf.len() - newline - 1, 64 * 8);
    }
}
