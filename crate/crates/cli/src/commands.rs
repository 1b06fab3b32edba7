use std::path::PathBuf;

use serde_json::json;
use swe_period::baseline::{rolling_baseline, RollingBaseline};
use swe_period::pipeline::{dimension_table_csv, NoiseLevelSummary, NoiseSweepConfig};
use swe_period::{
    assign_symbols, chop_and_search, diagram_norm, dimension_sweep, dominant_intervals, generate,
    load_csv, noise_sweep, rips_persistence, select_landmarks, swe, Assignment, NormKind,
    PeriodSeries, TimeSeries,
};

use crate::config::{Command, Format, Input, RunConfig};
use crate::error::{CliError, Result};
use crate::svg::{line_plot, Plot};

struct Writer<'a> {
    cfg: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.cfg.out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
        text.push('\n');
        self.put(name, &text)
    }
}

fn load(cfg: &RunConfig) -> Result<TimeSeries> {
    Ok(match &cfg.input {
        Input::Csv { path, column } => load_csv(path, column)?,
        Input::Generator(spec) => generate(spec)?,
    })
}

fn period_points(series: &PeriodSeries) -> Vec<(f64, f64)> {
    series
        .points
        .iter()
        .map(|p| (p.index as f64, p.estimate.mean_period.unwrap_or(f64::NAN)))
        .collect()
}

const PERIOD_PLOT: Plot = Plot {
    title: "Period estimate",
    x_label: "observation (samples)",
    y_label: "period (samples)",
};

/// Runs the command and returns the files written, in write order.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::Config(format!(
            "--out `{}` is not writable: {e}",
            cfg.out_dir.display()
        ))
    })?;
    let mut w = Writer {
        cfg,
        written: Vec::new(),
    };
    match cfg.command {
        Command::Generate => generate_cmd(cfg, &mut w)?,
        Command::Embed => embed_cmd(cfg, &mut w)?,
        Command::Persist => persist_cmd(cfg, &mut w)?,
        Command::Period => period_cmd(cfg, &mut w)?,
        Command::Compare => compare_cmd(cfg, &mut w)?,
        Command::SweepDim => sweep_dim_cmd(cfg, &mut w)?,
        Command::SweepNoise => sweep_noise_cmd(cfg, &mut w)?,
    }
    Ok(w.written)
}

fn generate_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    if cfg.wants(Format::Csv) {
        w.put("series.csv", &ts.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        w.json(
            "series.json",
            &json!({"units": "index in samples", "label": ts.label(), "step": ts.step(), "values": ts.values()}),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let pts: Vec<(f64, f64)> = ts
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64, *v))
            .collect();
        let plot = Plot {
            title: "Series",
            x_label: "observation (samples)",
            y_label: "value",
        };
        w.put("series.svg", &line_plot(&plot, &pts))?;
    }
    Ok(())
}

fn embed_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    let (n, d) = (cfg.pipeline.n, cfg.pipeline.d);
    let cloud = swe(&ts, n, d)?;
    if cfg.wants(Format::Csv) {
        w.put("embedding.csv", &cloud.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        let points: Vec<&[f64]> = cloud.points().collect();
        w.json(
            "embedding.json",
            &json!({"units": "time_index in samples", "n": n, "d": d, "time_indices": cloud.time_indices(), "points": points}),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let pts: Vec<(f64, f64)> = cloud.points().map(|p| (p[0], p[1])).collect();
        let plot = Plot {
            title: "Embedding (first two coordinates)",
            x_label: "x0",
            y_label: "x1",
        };
        w.put("embedding.svg", &line_plot(&plot, &pts))?;
    }
    Ok(())
}

fn persist_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    let cloud = swe(&ts, cfg.pipeline.n, cfg.pipeline.d)?;
    let diag = rips_persistence(&cloud, cfg.pipeline.cap)?;
    if cfg.wants(Format::Csv) {
        w.put("diagram.csv", &diag.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        w.json(
            "diagram.json",
            &json!({
                "units": "embedding distance",
                "diagram": diag,
                "l1": diagram_norm(&diag, 1, NormKind::L1),
                "l2": diagram_norm(&diag, 1, NormKind::L2),
                "dominant": dominant_intervals(&diag, 3),
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let lengths = dominant_intervals(&diag, diag.h1.len());
        let pts: Vec<(f64, f64)> = lengths
            .iter()
            .enumerate()
            .map(|(i, l)| ((i + 1) as f64, *l))
            .collect();
        let plot = Plot {
            title: "H1 interval lengths",
            x_label: "rank",
            y_label: "length",
        };
        w.put("diagram.svg", &line_plot(&plot, &pts))?;
    }
    Ok(())
}

fn period_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    let series = chop_and_search(&ts, &cfg.pipeline)?;
    if cfg.wants(Format::Csv) {
        w.put("period.csv", &series.to_csv())?;
        // symbolic dynamics of the last window
        let p = &cfg.pipeline;
        let cloud = swe(&ts, p.n, p.d)?;
        let last = cloud.len() - 1;
        let window = cloud.window(last.saturating_sub(p.window), last);
        let lm = select_landmarks(&window, p.k.min(window.len()), p.landmark_method, p.seed)?;
        let sym = assign_symbols(&window, &lm, Assignment::Hard, 0.0)?;
        w.put("symbols.csv", &sym.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        w.json(
            "period.json",
            &serde_json::to_value(&series).map_err(|e| CliError::Data(e.to_string()))?,
        )?;
    }
    if cfg.wants(Format::Svg) {
        w.put(
            "period.svg",
            &line_plot(&PERIOD_PLOT, &period_points(&series)),
        )?;
    }
    Ok(())
}

fn aligned_csv(tda: &PeriodSeries, base: &RollingBaseline) -> String {
    let first = base.points.first().map_or(usize::MAX, |p| p.index);
    let mut out = String::from("index,tda_period,baseline_period\n");
    for p in &tda.points {
        let t = p
            .estimate
            .mean_period
            .map(|m| m.to_string())
            .unwrap_or_default();
        let b = if p.index >= first {
            base.points[p.index - first].period.to_string()
        } else {
            String::new()
        };
        out.push_str(&format!("{},{t},{b}\n", p.index));
    }
    out
}

fn compare_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    let tda = chop_and_search(&ts, &cfg.pipeline)?;
    let base = rolling_baseline(&ts, cfg.baseline_window, cfg.pipeline.execution)?;
    if cfg.wants(Format::Csv) {
        w.put("tda.csv", &tda.to_csv())?;
        w.put("baseline.csv", &base.to_csv())?;
        w.put("aligned.csv", &aligned_csv(&tda, &base))?;
        w.put("baseline_summary.csv", &base.summary_csv())?;
    }
    if cfg.wants(Format::Json) {
        w.json(
            "compare.json",
            &json!({"units": "samples", "tda": tda, "baseline": base}),
        )?;
    }
    if cfg.wants(Format::Svg) {
        w.put("tda.svg", &line_plot(&PERIOD_PLOT, &period_points(&tda)))?;
        let pts: Vec<(f64, f64)> = base
            .points
            .iter()
            .map(|p| (p.index as f64, p.period as f64))
            .collect();
        let plot = Plot {
            title: "Spectral baseline",
            ..PERIOD_PLOT
        };
        w.put("baseline.svg", &line_plot(&plot, &pts))?;
    }
    Ok(())
}

fn sweep_dim_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let ts = load(cfg)?;
    let rows = dimension_sweep(
        &ts,
        &cfg.dims,
        cfg.pipeline.d,
        cfg.pipeline.cap,
        cfg.pipeline.execution,
    );
    if rows.iter().all(|r| r.lengths.is_err()) {
        let why = rows
            .iter()
            .filter_map(|r| r.lengths.as_ref().err())
            .next()
            .cloned()
            .unwrap_or_default();
        return Err(CliError::Data(format!(
            "no dimension could be evaluated: {why}"
        )));
    }
    if cfg.wants(Format::Csv) {
        w.put("dimension_table.csv", &dimension_table_csv(&rows))?;
    }
    if cfg.wants(Format::Json) {
        let rows: Vec<_> = rows
            .iter()
            .map(|r| match &r.lengths {
                Ok(l) => json!({"dim": r.dim, "lengths": l}),
                Err(e) => json!({"dim": r.dim, "error": e}),
            })
            .collect();
        w.json(
            "dimension_table.json",
            &json!({"units": "embedding distance", "d": cfg.pipeline.d, "rows": rows}),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| match &r.lengths {
                Ok(l) if l[1] > 0.0 => (r.dim as f64, l[0] / l[1]),
                _ => (r.dim as f64, f64::NAN),
            })
            .collect();
        let plot = Plot {
            title: "Longest / second H1 length",
            x_label: "embedding dimension",
            y_label: "ratio",
        };
        w.put("dimension_table.svg", &line_plot(&plot, &pts))?;
    }
    Ok(())
}

fn noise_csv(rows: &[NoiseLevelSummary]) -> (String, String) {
    let mut norms = String::from("level,mean_l1,mean_l2\n");
    let mut profile = String::from("level,rank,mean_length\n");
    for r in rows {
        norms.push_str(&format!("{},{},{}\n", r.level, r.mean_l1, r.mean_l2));
        for (i, l) in r.profile.iter().enumerate() {
            profile.push_str(&format!("{},{},{}\n", r.level, i + 1, l));
        }
    }
    (norms, profile)
}

fn sweep_noise_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let Input::Generator(spec) = &cfg.input else {
        return Err(CliError::Config(
            "sweep-noise needs a generator input".into(),
        ));
    };
    let p = &cfg.pipeline;
    let sweep = NoiseSweepConfig {
        n: p.n,
        d: p.d,
        cap: p.cap,
    };
    let rows = noise_sweep(spec, &cfg.levels, cfg.reps, sweep, p.execution)?;
    if cfg.wants(Format::Csv) {
        let (norms, profile) = noise_csv(&rows);
        w.put("noise_sweep.csv", &norms)?;
        w.put("noise_profile.csv", &profile)?;
    }
    if cfg.wants(Format::Json) {
        w.json(
            "noise_sweep.json",
            &json!({"units": "embedding distance", "reps": cfg.reps, "generator": spec, "levels": rows}),
        )?;
    }
    if cfg.wants(Format::Svg) {
        for (name, title, pick) in [
            (
                "noise_l1.svg",
                "Mean L1 norm",
                (|r: &NoiseLevelSummary| r.mean_l1) as fn(&NoiseLevelSummary) -> f64,
            ),
            ("noise_l2.svg", "Mean L2 norm", |r: &NoiseLevelSummary| {
                r.mean_l2
            }),
        ] {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.level, pick(r))).collect();
            let plot = Plot {
                title,
                x_label: "noise level",
                y_label: "norm",
            };
            w.put(name, &line_plot(&plot, &pts))?;
        }
    }
    Ok(())
}
