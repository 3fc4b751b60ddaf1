use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{LatticePmf, Variant};
use crate::error::{Error, Result};

/// Provenance line written before the CSV body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfHeader {
    pub variant: Variant,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d: usize,
    pub n: u64,
    pub step: f64,
    pub offset: f64,
}

/// One JSON header line, then CSV columns `value_1..value_d, log_prob`.
pub fn write_pmf_csv<W: Write>(pmf: &LatticePmf, header: &PmfHeader, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, header)?;
    writeln!(out)?;
    let mut w = csv::Writer::from_writer(out);
    let mut cols: Vec<String> = if pmf.dim == 1 {
        vec!["value".into()]
    } else {
        (1..=pmf.dim).map(|i| format!("value_{i}")).collect()
    };
    cols.push("log_prob".into());
    w.write_record(&cols)?;
    for (i, lp) in pmf.log_probs.iter().enumerate() {
        let mut rec: Vec<String> = pmf.point(i).iter().map(|v| v.to_string()).collect();
        rec.push(lp.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pmf_csv<R: BufRead>(mut input: R) -> Result<(PmfHeader, LatticePmf)> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: PmfHeader = serde_json::from_str(line.trim())?;
    let mut r = csv::Reader::from_reader(input);
    let mut log_probs = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let last = rec.get(rec.len() - 1).ok_or_else(|| Error::Parse("empty record".into()))?;
        log_probs.push(last.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?);
    }
    let pmf = LatticePmf { offset: header.offset, step: header.step, log_probs, dim: header.d };
    Ok((header, pmf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_models::random_walk_pmf;

    #[test]
    fn planar_round_trip_keeps_unreachable_points() {
        let pmf = random_walk_pmf(2, 3).unwrap();
        let header = PmfHeader {
            variant: Variant::RandomWalk,
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            d: 2,
            n: 3,
            step: pmf.step,
            offset: pmf.offset,
        };
        let mut buf = Vec::new();
        write_pmf_csv(&pmf, &header, &mut buf).unwrap();
        let (h, back) = read_pmf_csv(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, pmf);
    }
}
