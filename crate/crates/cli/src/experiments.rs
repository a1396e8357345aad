//! Experiment runners. Each returns its result tables as named CSV files;
//! nothing here touches the filesystem.

use wavelab::channel::MultipathChannel;
use wavelab::ddam::{equivalent_channel, psi_from_channel};
use wavelab::metrics::{
    ccdf_level_db, complexity_model, default_thresholds, measured_complexity, papr_samples, se_overhead,
    ComplexityVariant, Framing, PaprCcdf,
};
use wavelab::ofdm::{feasible_region, FeasibilityThresholds};
use wavelab::rng::derive_seed;
use wavelab::scalar::to_f64;
use wavelab::sim::{ber_point, papr_trial};
use wavelab::Real;

use crate::config::{
    BerConfig, ComplexityConfig, Config, EquivalentConfig, FeasibilityConfig, PaprConfig, Precision, SeSweepConfig,
};

/// One result table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Row-by-row CSV builder with a fixed header.
struct Table {
    name: &'static str,
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> anyhow::Result<Self> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header)?;
        Ok(Self { name, w })
    }

    fn row<I, S>(&mut self, fields: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> anyhow::Result<CsvFile> {
        Ok(CsvFile {
            name: self.name.to_string(),
            bytes: self.w.into_inner().map_err(|e| anyhow::anyhow!("{}", e.error()))?,
        })
    }
}

/// Shortest round-trip form; scientific notation for very small or large
/// magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn run(cfg: &Config) -> anyhow::Result<Vec<CsvFile>> {
    match cfg {
        Config::FeasibilityRegion(c) => feasibility(c),
        Config::PaprCcdf(c) => match c.precision {
            Precision::F32 => papr::<f32>(c),
            Precision::F64 => papr::<f64>(c),
        },
        Config::SeSweep(c) => se_sweep(c),
        Config::BerVsSnr(c) => ber(c),
        Config::EquivalentChannelReport(c) => equivalent(c),
        Config::ComplexityTable(c) => complexity(c),
    }
}

/// Grid rows in file order: `ρ_th` outermost, then `K_th`, bandwidth, `ξ`.
pub fn feasibility_grid(c: &FeasibilityConfig) -> Vec<FeasibilityThresholds> {
    let mut out = Vec::new();
    for &rho_th in &c.rho_th {
        for &k_th in &c.k_th {
            for &bandwidth in &c.bandwidth_hz {
                for &xi in &c.xi {
                    out.push(FeasibilityThresholds { rho_th, k_th, bandwidth, xi });
                }
            }
        }
    }
    out
}

fn feasibility(c: &FeasibilityConfig) -> anyhow::Result<Vec<CsvFile>> {
    let mut t = Table::new(
        "feasibility_region.csv",
        &["rho_th", "k_th", "bandwidth_hz", "xi", "tau_max_s", "nu_max_hz"],
    )?;
    for th in feasibility_grid(c) {
        let r = feasible_region(&th)?;
        t.row([
            num(th.rho_th),
            th.k_th.to_string(),
            num(th.bandwidth),
            num(th.xi),
            num(r.tau_max),
            num(r.nu_max),
        ])?;
    }
    Ok(vec![t.finish()?])
}

fn papr<T: Real>(c: &PaprConfig) -> anyhow::Result<Vec<CsvFile>> {
    let fixed: Option<MultipathChannel<T>> = if c.channel.is_random() { None } else { Some(c.channel.realize(0)?) };
    let thresholds = default_thresholds();
    let mut curve = Table::new("papr_ccdf.csv", &["waveform", "threshold_db", "prob"])?;
    let mut summary = Table::new("papr_summary.csv", &["waveform", "level", "papr_db"])?;
    for (wi, &w) in c.waveforms.iter().enumerate() {
        let samples = papr_samples(
            |s| {
                let drawn;
                let ch = match &fixed {
                    Some(ch) => ch,
                    None => {
                        drawn = c.channel.realize::<T>(derive_seed(s, 0))?;
                        &drawn
                    }
                };
                papr_trial(w, &c.params, ch, c.window, c.oversampling, derive_seed(s, 1))
            },
            c.trials,
            derive_seed(c.seed, wi as u64),
        )?;
        let ccdf = PaprCcdf::from_samples(&samples, thresholds.clone())?;
        for (th, p) in ccdf.thresholds_db.iter().zip(&ccdf.exceed_probability) {
            curve.row([w.name().to_string(), num(*th), num(*p)])?;
        }
        summary.row([
            w.name().to_string(),
            num(c.summary_level),
            num(ccdf_level_db(&samples, c.summary_level)?),
        ])?;
    }
    Ok(vec![curve.finish()?, summary.finish()?])
}

/// `(n_max, waveform, efficiency)` rows of the overhead sweep.
pub fn se_rows(c: &SeSweepConfig) -> anyhow::Result<Vec<(usize, &'static str, f64)>> {
    let n = c.ddam_block_len.unwrap_or(16 * c.k);
    let mut out = Vec::new();
    for &n_max in &c.n_max {
        out.push((n_max, "ofdm", se_overhead(Framing::Ofdm { k: c.k, cp_len: n_max })?));
        out.push((n_max, "otfs", se_overhead(Framing::Otfs { m: c.otfs_m, k: c.k, cp_len: n_max })?));
        out.push((n_max, "ddam", se_overhead(Framing::Ddam { n, n_max })?));
    }
    Ok(out)
}

fn se_sweep(c: &SeSweepConfig) -> anyhow::Result<Vec<CsvFile>> {
    let mut t = Table::new("se_sweep.csv", &["n_max", "waveform", "se"])?;
    for (n_max, w, se) in se_rows(c)? {
        t.row([n_max.to_string(), w.to_string(), num(se)])?;
    }
    Ok(vec![t.finish()?])
}

fn ber(c: &BerConfig) -> anyhow::Result<Vec<CsvFile>> {
    let ch = c.channel.realize::<f64>(derive_seed(c.seed, 0))?;
    let mut t = Table::new("ber_vs_snr.csv", &["waveform", "snr_db", "bits", "errors", "ber"])?;
    for (wi, &w) in c.waveforms.iter().enumerate() {
        for (si, &snr) in c.snr_db.iter().enumerate() {
            let seed = derive_seed(derive_seed(c.seed, 1 + wi as u64), si as u64);
            let r = ber_point(w, &c.params, &ch, &c.perturbation, snr, c.num_symbols, seed)?;
            t.row([
                w.name().to_string(),
                num(snr),
                r.bits.to_string(),
                r.errors.to_string(),
                num(r.rate()),
            ])?;
        }
    }
    Ok(vec![t.finish()?])
}

fn equivalent(c: &EquivalentConfig) -> anyhow::Result<Vec<CsvFile>> {
    let ch = c.channel.realize::<f64>(derive_seed(c.seed, 0))?;
    let psi = psi_from_channel(&ch, &c.perturbation, derive_seed(c.seed, 1))?;
    let d = &c.params.ddam;
    let beams = d.beams(&psi)?;
    let eq = equivalent_channel(&ch, &psi, &beams, &d.options(), d.block_len)?;
    let mut taps = Vec::new();
    eq.write_csv(&mut taps)?;
    let mut s = Table::new("equivalent_summary.csv", &["metric", "value"])?;
    for (k, v) in [
        ("dominant_tap_index", eq.dominant_tap_index.to_string()),
        ("support_start", eq.support_start.to_string()),
        ("delay_spread_samples", eq.delay_spread_samples.to_string()),
        ("residual_isi_power", num(to_f64(eq.residual_isi_power))),
        ("residual_doppler_hz", num(eq.residual_doppler)),
        ("gain_variation", num(eq.gain_variation)),
        ("gain_re", num(eq.gain.re)),
        ("gain_im", num(eq.gain.im)),
    ] {
        s.row([k.to_string(), v])?;
    }
    Ok(vec![
        CsvFile {
            name: "equivalent_taps.csv".into(),
            bytes: taps,
        },
        s.finish()?,
    ])
}

fn complexity(c: &ComplexityConfig) -> anyhow::Result<Vec<CsvFile>> {
    let mut header = vec!["variant", "mt", "k", "m", "l", "ns", "model_tx", "model_rx"];
    if c.measured {
        header.extend(["measured_tx", "measured_rx"]);
    }
    let mut t = Table::new("complexity_table.csv", &header)?;
    for (i, p) in c.grid().iter().enumerate() {
        for v in ComplexityVariant::ALL {
            let model = complexity_model(v, p)?;
            let mut row = vec![
                v.name().to_string(),
                p.mt.to_string(),
                p.k.to_string(),
                p.m.to_string(),
                p.l.to_string(),
                p.ns.to_string(),
                num(model.tx),
                num(model.rx),
            ];
            if c.measured {
                let m = measured_complexity(v, p, derive_seed(c.seed, i as u64))?;
                row.extend([num(m.tx), num(m.rx)]);
            }
            t.row(row)?;
        }
    }
    Ok(vec![t.finish()?])
}
