//! CSV emission with a provenance header comment. Numbers are written with
//! fixed formats so reruns of identical configurations produce byte-identical
//! files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mmtdd_core::coverage::CoverageCurve;
use mmtdd_core::mcsim::EmpiricalCurve;
use mmtdd_core::netmodel::{AccessScheme, BackhaulScheme, Tier};
use mmtdd_core::rate::RateReport;

pub struct CsvFile {
    writer: BufWriter<File>,
}

impl CsvFile {
    pub fn create(path: &Path, config_hash: &str, header: &str) -> anyhow::Result<CsvFile> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = File::create(path)?;
        let mut writer = BufWriter::new(file);
        writeln!(
            writer,
            "# mmtdd v{} config_hash={config_hash}",
            mmtdd_core::VERSION
        )?;
        writeln!(writer, "{header}")?;
        Ok(CsvFile { writer })
    }

    pub fn row(&mut self, line: &str) -> anyhow::Result<()> {
        writeln!(self.writer, "{line}")?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn scheme_labels(a: AccessScheme, b: BackhaulScheme) -> (&'static str, &'static str) {
    (
        match a {
            AccessScheme::Static => "static",
            AccessScheme::Dynamic => "dynamic",
        },
        match b {
            BackhaulScheme::Sab => "sab",
            BackhaulScheme::Uab => "uab",
        },
    )
}

pub fn tier_label(tier: Option<Tier>) -> &'static str {
    match tier {
        None => "mix",
        Some(Tier::Mbs) => "m",
        Some(Tier::Sbs) => "s",
    }
}

pub const COVERAGE_HEADER: &str = "link,scheme_a,scheme_b,slot,tier,tau_db,coverage";

pub fn coverage_rows(
    csv: &mut CsvFile,
    curve: &CoverageCurve,
    schemes: (&str, &str),
) -> anyhow::Result<()> {
    for pt in &curve.points {
        csv.row(&format!(
            "{},{},{},{},{},{:.2},{:.6}",
            curve.link.label(),
            schemes.0,
            schemes.1,
            curve.slot,
            tier_label(curve.tier),
            pt.tau_db,
            pt.coverage
        ))?;
    }
    Ok(())
}

pub const MC_COVERAGE_HEADER: &str =
    "link,scheme_a,scheme_b,slot,tier,tau_db,coverage,stderr";

pub fn mc_coverage_rows(
    csv: &mut CsvFile,
    curve: &EmpiricalCurve,
    tier: &str,
    schemes: (&str, &str),
) -> anyhow::Result<()> {
    for i in 0..curve.tau_db.len() {
        csv.row(&format!(
            "{},{},{},{},{},{:.2},{:.6},{:.6}",
            curve.link.label(),
            schemes.0,
            schemes.1,
            curve.slot,
            tier,
            curve.tau_db[i],
            curve.coverage[i],
            curve.stderr[i]
        ))?;
    }
    Ok(())
}

pub const RATE_HEADER: &str = "scheme_a,scheme_b,eta,delta,p_ul,p_dl,R_ul,R_dl,R_overall,\
R_ul_m,R_ul_s,R_dl_m,R_dl_s,Ra_ul,Rb_ul,Ra_dl,Rb_dl";

pub fn rate_row(
    schemes: (&str, &str),
    eta: f64,
    delta: f64,
    p_ul: f64,
    p_dl: f64,
    r: &RateReport,
) -> String {
    format!(
        "{},{},{:.4},{:.4},{:.4},{:.4},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
        schemes.0,
        schemes.1,
        eta,
        delta,
        p_ul,
        p_dl,
        r.r_ul,
        r.r_dl,
        r.r_overall,
        r.r_ul_m,
        r.r_ul_s,
        r.r_dl_m,
        r.r_dl_s,
        r.ra_ul,
        r.rb_ul,
        r.ra_dl,
        r.rb_dl
    )
}
