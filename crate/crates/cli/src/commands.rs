//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use landskew::analysis::{diagram_spread, group_compare, transform_diagrams, DenoisedDiagram, Stage};
use landskew::elastic::{karcher_mean, srvf, AlignmentResult, KarcherOptions, SrvfCurve, Warp};
use landskew::fpca::{fit_pca, pc_scores, PcaModel};
use landskew::io::{cloud_from_table, cloud_table, scores_table, to_json_string, Table};
use landskew::landscape::{common_domain_end, Landscape};
use landskew::par;
use landskew::persistence::PersistenceDiagram;
use landskew::pipeline::{compute_diagrams, compute_landscapes, AnalysisConfig};
use landskew::simgen::{generate_mixture, Design, PointCloud, SimConfig};

use crate::config::ExperimentConfig;
use crate::error::{data, usage, CliResult, StageExt};
use crate::manifest::Recorder;
use crate::svg::Figure;
use crate::{figures, Command, DiagramStage, KarcherArgs, PlotKind};

pub fn dispatch(command: Command, command_line: Vec<String>) -> CliResult<()> {
    let threads = par::current_threads();
    match command {
        Command::Simulate(a) => {
            let rec = Recorder::new(&a.out, command_line, threads);
            simulate(a, rec)
        }
        Command::Ph(a) => ph(a, command_line, threads),
        Command::Landscape(a) => landscape(a, command_line, threads),
        Command::Align(a) => align(a, command_line, threads),
        Command::Pca(a) => pca(a, command_line, threads),
        Command::Denoise(a) => denoise(a, command_line, threads),
        Command::Compare(a) => compare(a, command_line, threads),
        Command::Pipeline(a) => pipeline(&a.config, &a.out, command_line, threads),
        Command::Plot(a) => plot(a, command_line, threads),
    }
}

fn indexed(dir: &str, stem: &str, i: usize, ext: &str) -> String {
    format!("{dir}/{stem}_{i:03}.{ext}")
}

/// Files named directly, plus the sorted `ext` files of named directories.
pub fn expand(inputs: &[PathBuf], ext: &str, stage: &str) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .stage(stage)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|e| e == ext))
                .filter(|f| !f.file_name().is_some_and(|n| n.to_string_lossy().contains("manifest")))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(data(stage, anyhow::anyhow!("{} does not exist", p.display())));
        }
    }
    if out.is_empty() {
        return Err(data(stage, anyhow::anyhow!("no .{ext} inputs found")));
    }
    Ok(out)
}

fn read_all<T: DeserializeOwned>(files: &[PathBuf], rec: &mut Recorder, stage: &str) -> CliResult<Vec<T>> {
    files
        .iter()
        .map(|f| {
            rec.input(f)?;
            let text = fs::read_to_string(f).stage(stage)?;
            serde_json::from_str(&text).map_err(|e| data(stage, anyhow::anyhow!("{}: {e}", f.display())))
        })
        .collect()
}

fn json<T: Serialize + ?Sized>(value: &T, stage: &str) -> CliResult<String> {
    to_json_string(value).stage(stage)
}

fn karcher_options(k: &KarcherArgs) -> KarcherOptions {
    KarcherOptions { tol: k.tol, max_iter: k.max_iter, center: true }
}

fn write_clouds(rec: &mut Recorder, prefix: &str, clouds: &[PointCloud]) -> CliResult<()> {
    for (i, c) in clouds.iter().enumerate() {
        rec.write(format!("{prefix}{}", indexed("clouds", "cloud", i, "csv")), cloud_table(c).to_csv_string().stage("simulate")?)?;
    }
    let labels: Vec<&str> = clouds.iter().map(|c| c.label().unwrap_or("")).collect();
    rec.write(format!("{prefix}clouds/labels.json"), json(&labels, "simulate")?)
}

fn write_diagrams(rec: &mut Recorder, prefix: &str, dgs: &[PersistenceDiagram]) -> CliResult<()> {
    for (i, d) in dgs.iter().enumerate() {
        rec.write(format!("{prefix}{}", indexed("diagrams", "diagram", i, "json")), json(d, "ph")?)?;
    }
    Ok(())
}

fn write_landscapes(rec: &mut Recorder, prefix: &str, dir: &str, ls: &[Landscape], stage: &str) -> CliResult<()> {
    for (i, l) in ls.iter().enumerate() {
        rec.write(format!("{prefix}{}", indexed(dir, "landscape", i, "json")), json(l, stage)?)?;
    }
    Ok(())
}

fn write_alignment(rec: &mut Recorder, prefix: &str, a: &AlignmentResult) -> CliResult<()> {
    for (i, w) in a.warps.iter().enumerate() {
        rec.write(format!("{prefix}{}", indexed("warps", "warp", i, "json")), json(w, "align")?)?;
    }
    write_landscapes(rec, prefix, "aligned", &a.aligned, "align")?;
    rec.write(format!("{prefix}mean.json"), json(&a.mean, "align")?)?;
    let trace = Table::new(vec!["sse".into()], a.sse_trace.iter().map(|&v| vec![v]).collect()).stage("align")?;
    rec.write(format!("{prefix}sse_trace.csv"), trace.to_csv_string().stage("align")?)
}

fn write_denoised(rec: &mut Recorder, prefix: &str, dgs: &[DenoisedDiagram]) -> CliResult<()> {
    for (i, d) in dgs.iter().enumerate() {
        rec.write(format!("{prefix}{}", indexed("denoised", "denoised", i, "json")), json(d, "denoise")?)?;
    }
    Ok(())
}

fn simulate(a: crate::SimulateArgs, mut rec: Recorder) -> CliResult<()> {
    let parts = match &a.config {
        Some(path) => {
            rec.input(path)?;
            let mut cfg = ExperimentConfig::load(path)?;
            for part in &mut cfg.simulate {
                part.seed = a.seed;
            }
            cfg.simulate
        }
        None => {
            let design: Design = a.design.parse().map_err(|e| usage("simulate", e))?;
            let mut cfg = SimConfig { seed: a.seed, ..SimConfig::for_design(design) };
            if let Some(n) = a.n_clouds {
                cfg.n_clouds = n;
            }
            if let Some(s) = a.noise {
                cfg.noise_sigma_factor = s;
            }
            if let Some(size) = &a.size {
                let [lo, hi] = size[..] else {
                    return Err(usage("simulate", "--size takes MIN,MAX"));
                };
                cfg.size_range = (lo, hi);
            }
            cfg.fixed_radii = a.fixed_radii.clone();
            cfg.equispaced = a.equispaced;
            vec![cfg]
        }
    };
    rec.seed(a.seed);
    let clouds = rec.time("simulate", |_| generate_mixture(&parts).stage("simulate"))?;
    write_clouds(&mut rec, "", &clouds)?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn read_clouds(files: &[PathBuf], rec: &mut Recorder) -> CliResult<Vec<PointCloud>> {
    files
        .iter()
        .map(|f| {
            rec.input(f)?;
            let table = Table::read(f).map_err(|e| data("ph", anyhow::anyhow!("{}: {e}", f.display())))?;
            cloud_from_table(&table).stage("ph")
        })
        .collect()
}

fn ph(a: crate::PhArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let files = expand(&a.inputs, "csv", "ph")?;
    let clouds = read_clouds(&files, &mut rec)?;
    let mut cfg = AnalysisConfig {
        degree: a.degree,
        complex: a.complex.parse().map_err(|e| usage("ph", e))?,
        convention: a.convention.parse().map_err(|e| usage("ph", e))?,
        max_scale: a.max_scale,
        subsample: a.subsample,
        subsample_seed: a.subsample_seed,
        top_j: a.top_j,
        ..AnalysisConfig::default()
    };
    if let Some(m) = a.max_points {
        cfg.max_points = m;
    }
    rec.seed(a.subsample_seed);
    let dgs = rec.time("ph", |_| compute_diagrams(&clouds, &cfg).stage("ph"))?;
    write_diagrams(&mut rec, "", &dgs)?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn landscape(a: crate::LandscapeArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let files = expand(&a.inputs, "json", "landscape")?;
    let dgs: Vec<PersistenceDiagram> = read_all(&files, &mut rec, "landscape")?;
    let cfg = AnalysisConfig { k: a.k, t: a.t, domain_pad: a.pad, ..AnalysisConfig::default() };
    let sample = rec.time("landscape", |_| compute_landscapes(&dgs, &cfg).stage("landscape"))?;
    write_landscapes(&mut rec, "", "landscapes", &sample.landscapes, "landscape")?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn align(a: crate::AlignArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let files = expand(&a.inputs, "json", "align")?;
    let ls: Vec<Landscape> = read_all(&files, &mut rec, "align")?;
    let opts = karcher_options(&a.karcher);
    let result = rec.time("align", |_| karcher_mean(&ls, &opts).stage("align"))?;
    write_alignment(&mut rec, "", &result)?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn fit_and_write(
    rec: &mut Recorder,
    path: &str,
    qs: &[SrvfCurve],
    b: usize,
    degree: usize,
) -> CliResult<(PcaModel, Vec<Vec<f64>>)> {
    let (model, scores) = rec.time("pca", |_| {
        let model = fit_pca(qs, b, degree).stage("pca")?;
        let scores = pc_scores(qs, &model).stage("pca")?;
        Ok((model, scores))
    })?;
    rec.write(format!("{path}model.json"), json(&model, "pca")?)?;
    rec.write(format!("{path}scores.csv"), scores_table(&scores).to_csv_string().stage("pca")?)?;
    Ok((model, scores))
}

fn raw_srvfs(ls: &[Landscape]) -> CliResult<Vec<SrvfCurve>> {
    par::map(ls, srvf).into_iter().collect::<landskew::Result<_>>().stage("pca")
}

fn pca(a: crate::PcaArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let files = expand(&a.inputs, "json", "pca")?;
    let ls: Vec<Landscape> = read_all(&files, &mut rec, "pca")?;
    let degree = ls[0].degree();
    let qs = if a.no_align {
        raw_srvfs(&ls)?
    } else {
        let opts = karcher_options(&a.karcher);
        rec.time("align", |_| karcher_mean(&ls, &opts).stage("align"))?.aligned_srvfs
    };
    fit_and_write(&mut rec, "pca/", &qs, a.b, degree)?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn denoise(a: crate::DenoiseArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let dgs: Vec<PersistenceDiagram> = read_all(&expand(&a.diagrams, "json", "denoise")?, &mut rec, "denoise")?;
    let warps: Vec<Warp> = read_all(&expand(&a.warps, "json", "denoise")?, &mut rec, "denoise")?;
    let s = match a.scale_s {
        Some(s) => s,
        None => common_domain_end(&dgs, a.pad).stage("denoise")?,
    };
    let mut out = rec.time("denoise", |_| transform_diagrams(&dgs, &warps, s).stage("denoise"))?;
    for (i, d) in out.iter_mut().enumerate() {
        d.warp_id = format!("{i:03}");
    }
    write_denoised(&mut rec, "", &out)?;
    rec.finish("manifest.json")?;
    Ok(())
}

fn compare_groups(
    rec: &mut Recorder,
    prefix: &str,
    a: &[Landscape],
    b: &[Landscape],
    labels: [&str; 2],
    opts: &KarcherOptions,
) -> CliResult<()> {
    let cmp = rec.time("compare", |_| group_compare(a, b, labels, opts).stage("compare"))?;
    for g in 0..2 {
        let label = &cmp.labels[g];
        rec.write(format!("{prefix}compare/mean_{label}.json"), json(&cmp.group_means[g], "compare")?)?;
        rec.write(format!("{prefix}compare/phase_matched_{label}.json"), json(&cmp.phase_matched_means[g], "compare")?)?;
        rec.write(format!("{prefix}compare/to_pool_{label}.json"), json(&cmp.group_to_pool_warps[g], "compare")?)?;
        for (i, w) in cmp.subject_warps[g].iter().enumerate() {
            rec.write(format!("{prefix}compare/warps_{label}/warp_{i:03}.json"), json(w, "compare")?)?;
        }
    }
    rec.write(format!("{prefix}compare/pooled_mean.json"), json(&cmp.pooled.mean, "compare")?)?;
    rec.write(format!("{prefix}compare/difference.json"), json(&cmp.difference, "compare")?)?;
    rec.write(format!("{prefix}compare/difference_srvf.json"), json(&cmp.difference_srvf, "compare")?)?;
    rec.write(format!("{prefix}compare/pointwise_difference.json"), json(&cmp.pointwise_difference, "compare")?)
}

fn compare(a: crate::CompareArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let mut rec = Recorder::new(&a.out, command_line, threads);
    let ga: Vec<Landscape> = read_all(&expand(&a.group_a, "json", "compare")?, &mut rec, "compare")?;
    let gb: Vec<Landscape> = read_all(&expand(&a.group_b, "json", "compare")?, &mut rec, "compare")?;
    if a.labels.len() != 2 || a.labels[0] == a.labels[1] {
        return Err(usage("compare", "--labels takes two distinct names"));
    }
    compare_groups(&mut rec, "", &ga, &gb, [&a.labels[0], &a.labels[1]], &karcher_options(&a.karcher))?;
    rec.finish("manifest.json")?;
    Ok(())
}

/// Before/after summary of the transformed diagrams.
#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub n_clouds: usize,
    pub k: usize,
    pub domain_end: f64,
    pub karcher_iterations: usize,
    pub converged: bool,
    pub final_sse: f64,
    pub spread_before: f64,
    pub spread_after: f64,
    pub explained_fraction: Vec<f64>,
}

fn run_experiment(rec: &mut Recorder, prefix: &str, cfg: &ExperimentConfig) -> CliResult<()> {
    for part in &cfg.simulate {
        rec.seed(part.seed);
    }
    let clouds = rec.time("simulate", |_| generate_mixture(&cfg.simulate).stage("simulate"))?;
    write_clouds(rec, prefix, &clouds)?;

    let dgs = rec.time("ph", |_| compute_diagrams(&clouds, &cfg.analysis).stage("ph"))?;
    write_diagrams(rec, prefix, &dgs)?;

    let sample = rec.time("landscape", |_| compute_landscapes(&dgs, &cfg.analysis).stage("landscape"))?;
    write_landscapes(rec, prefix, "landscapes", &sample.landscapes, "landscape")?;

    let opts = cfg.analysis.karcher_options();
    let alignment = rec.time("align", |_| karcher_mean(&sample.landscapes, &opts).stage("align"))?;
    write_alignment(rec, prefix, &alignment)?;

    let degree = cfg.analysis.degree;
    let b = cfg.pca.b.min(clouds.len().saturating_sub(1)).max(1);
    let (model, scores) = fit_and_write(rec, &format!("{prefix}pca/"), &alignment.aligned_srvfs, b, degree)?;
    let explained = (1..=b).map(|i| model.explained_fraction(i)).collect();
    let baseline = if cfg.pca.baseline {
        let raw = raw_srvfs(&sample.landscapes)?;
        Some(fit_and_write(rec, &format!("{prefix}pca_unaligned/"), &raw, b, degree)?.1)
    } else {
        None
    };

    let mut denoised =
        rec.time("denoise", |_| transform_diagrams(&dgs, &alignment.warps, sample.domain_end).stage("denoise"))?;
    for (i, d) in denoised.iter_mut().enumerate() {
        d.warp_id = format!("{i:03}");
    }
    write_denoised(rec, prefix, &denoised)?;

    let summary = Summary {
        n_clouds: clouds.len(),
        k: sample.k,
        domain_end: sample.domain_end,
        karcher_iterations: alignment.sse_trace.len(),
        converged: alignment.converged,
        final_sse: alignment.sse_trace.last().copied().unwrap_or(0.0),
        spread_before: diagram_spread(&denoised, 1, Stage::Original).spread,
        spread_after: diagram_spread(&denoised, 1, Stage::Transformed).spread,
        explained_fraction: explained,
    };
    rec.write(format!("{prefix}summary.json"), json(&summary, "denoise")?)?;

    let mut labels: Vec<String> = Vec::new();
    let groups: Vec<usize> = clouds
        .iter()
        .map(|c| {
            let l = c.label().unwrap_or("").to_string();
            labels.iter().position(|x| *x == l).unwrap_or_else(|| {
                labels.push(l);
                labels.len() - 1
            })
        })
        .collect();
    if cfg.compare {
        if labels.len() != 2 {
            return Err(usage("compare", format!("comparison needs exactly two cloud labels, found {}", labels.len())));
        }
        let split = |g: usize| -> Vec<Landscape> {
            sample.landscapes.iter().zip(&groups).filter(|(_, &x)| x == g).map(|(l, _)| l.clone()).collect()
        };
        compare_groups(rec, prefix, &split(0), &split(1), [&labels[0], &labels[1]], &opts)?;
    }

    if cfg.figures {
        rec.time("plot", |rec| {
            let name = if cfg.name.is_empty() { String::new() } else { format!("{}: ", cfg.name) };
            let level = 0;
            let mut figs: Vec<(&str, Figure)> = vec![
                ("landscapes", figures::landscapes(&sample.landscapes, level, &format!("{name}landscapes"))),
                ("aligned", figures::landscapes(&alignment.aligned, level, &format!("{name}aligned landscapes"))),
                (
                    "mean",
                    figures::mean_overlay(&alignment.aligned, &alignment.mean, &sample.landscapes, level, &format!("{name}Karcher mean")),
                ),
                (
                    "diagrams_before",
                    figures::diagrams(
                        &denoised.iter().map(|d| d.original.clone()).collect::<Vec<_>>(),
                        &groups,
                        &format!("{name}diagrams"),
                        true,
                    ),
                ),
                (
                    "diagrams_after",
                    figures::diagrams(
                        &denoised.iter().map(|d| d.transformed.clone()).collect::<Vec<_>>(),
                        &groups,
                        &format!("{name}transformed diagrams"),
                        true,
                    ),
                ),
                ("warps", figures::warps(&alignment.warps, &format!("{name}warps"))),
                ("pc_scores", figures::scores(&scores, &groups, &format!("{name}PC scores (aligned)"))),
            ];
            if let Some(base) = &baseline {
                figs.push(("pc_scores_unaligned", figures::scores(base, &groups, &format!("{name}PC scores (unaligned)"))));
            }
            for (file, fig) in figs {
                rec.write(format!("{prefix}figures/{file}.svg"), fig.render())?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub fn pipeline(config: &Path, out: &Path, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let cfg = ExperimentConfig::load(config)?;
    let mut rec = Recorder::new(out, command_line, threads);
    rec.input(config)?;
    let text = fs::read(config).stage("config")?;
    let ext = config.extension().and_then(|e| e.to_str()).unwrap_or("toml");
    rec.write(format!("config.{ext}"), text)?;
    for (sub, run) in cfg.per_seed() {
        let prefix = sub.map(|s| format!("{s}/")).unwrap_or_default();
        log::info!("running {}{}", cfg.name, prefix);
        run_experiment(&mut rec, &prefix, &run)?;
    }
    rec.finish("manifest.json")?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyDiagram {
    Denoised(DenoisedDiagram),
    Raw(PersistenceDiagram),
}

fn plot(a: crate::PlotArgs, command_line: Vec<String>, threads: usize) -> CliResult<()> {
    let out_dir = a.out.parent().map(Path::to_path_buf).unwrap_or_default();
    let file = a.out.file_name().ok_or_else(|| usage("plot", "--out must name a file"))?.to_string_lossy().into_owned();
    let stem = a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut rec = Recorder::new(&out_dir, command_line, threads);
    if a.level == 0 {
        return Err(usage("plot", "--level starts at 1"));
    }
    let level = a.level - 1;
    let title = |default: &str| a.title.clone().unwrap_or_else(|| default.to_string());
    let fig = match a.kind {
        PlotKind::Landscapes => {
            let ls: Vec<Landscape> = read_all(&expand(&a.inputs, "json", "plot")?, &mut rec, "plot")?;
            figures::landscapes(&ls, level, &title("landscapes"))
        }
        PlotKind::Mean => {
            let ls: Vec<Landscape> = read_all(&expand(&a.inputs, "json", "plot")?, &mut rec, "plot")?;
            let path = a.mean.as_ref().ok_or_else(|| usage("plot", "mean plots need --mean"))?;
            let mean: Landscape = read_all(std::slice::from_ref(path), &mut rec, "plot")?.remove(0);
            figures::mean_overlay(&ls, &mean, &[], level, &title("Karcher mean"))
        }
        PlotKind::Diagrams => {
            let dgs: Vec<AnyDiagram> = read_all(&expand(&a.inputs, "json", "plot")?, &mut rec, "plot")?;
            let normalized = dgs.iter().all(|d| matches!(d, AnyDiagram::Denoised(_)));
            let sets: Vec<Vec<(f64, f64)>> = dgs
                .into_iter()
                .map(|d| match d {
                    AnyDiagram::Denoised(d) => match a.stage {
                        DiagramStage::Original => d.original,
                        DiagramStage::Transformed => d.transformed,
                    },
                    AnyDiagram::Raw(d) => d.pairs().to_vec(),
                })
                .collect();
            let colors: Vec<usize> = (0..sets.len()).collect();
            figures::diagrams(&sets, &colors, &title("diagrams"), normalized)
        }
        PlotKind::Warps => {
            let ws: Vec<Warp> = read_all(&expand(&a.inputs, "json", "plot")?, &mut rec, "plot")?;
            figures::warps(&ws, &title("warps"))
        }
        PlotKind::Scores => {
            let files = expand(&a.inputs, "csv", "plot")?;
            let mut rows = Vec::new();
            let mut groups = Vec::new();
            for (g, f) in files.iter().enumerate() {
                rec.input(f)?;
                let t = Table::read(f).map_err(|e| data("plot", anyhow::anyhow!("{}: {e}", f.display())))?;
                groups.extend(std::iter::repeat_n(g, t.rows.len()));
                rows.extend(t.rows);
            }
            figures::scores(&rows, &groups, &title("PC scores"))
        }
    };
    rec.write(&file, fig.render())?;
    rec.finish(&format!("{stem}.manifest.json"))?;
    Ok(())
}
