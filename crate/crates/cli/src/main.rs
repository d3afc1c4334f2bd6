use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ca_edge_core::baselines::{
    canny_detailed, gradient_edges, gradient_operator, log_operator, CannyParams, GradientKind,
    LogParams, ThresholdScale, DEFAULT_EDGE_FRACTION,
};
use ca_edge_core::evaluation::{compare, search_rules, CorpusPair, SearchConfig};
use ca_edge_core::imaging::{binarize_fixed, otsu_threshold, read_pnm, write_pnm};
use ca_edge_core::{
    parse_rule, run, BinaryGrid, BoundaryCondition, GrayImage, LinearRule, PnmFormat, PnmImage,
    StepConfig, Threshold, PAPER_RULES,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Binary edge detection with twenty-five-neighborhood linear cellular automata.
#[derive(Debug, Parser)]
#[command(name = "ca-edge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Binarize an image and apply one or more linear rules.
    Edge(EdgeArgs),
    /// Run a classical edge operator.
    Baseline(BaselineArgs),
    /// Score a predicted edge map against a reference.
    Compare(CompareArgs),
    /// Rank every rule with up to M terms against a corpus of reference pairs.
    Search(SearchArgs),
    /// Binarize a graymap into a bitmap.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
struct EdgeArgs {
    /// Input PGM or PBM.
    input: PathBuf,
    /// Rule number, `a+b+...` sum of basic rules, or `paper` for the six published rules.
    #[arg(long = "rule", required = true)]
    rules: Vec<String>,
    #[arg(long, default_value = "null")]
    boundary: BoundaryCondition,
    /// `otsu` or a fixed level 0-255; ignored for PBM input.
    #[arg(long, default_value = "otsu")]
    threshold: ThresholdArg,
    #[arg(long, default_value_t = 1)]
    iterations: u32,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write plain (P1) bitmaps instead of raw (P4).
    #[arg(long)]
    plain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Sobel,
    Prewitt,
    Roberts,
    Log,
    Canny,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Input PGM (a PBM is read as 0/255).
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Gaussian scale for `log` (default 2.0) and `canny` (default 1.0).
    #[arg(long)]
    sigma: Option<f64>,
    /// Canny low threshold (default 0.1).
    #[arg(long)]
    low: Option<f64>,
    /// Canny high threshold (default 0.3).
    #[arg(long)]
    high: Option<f64>,
    /// Treat Canny thresholds as raw magnitudes rather than fractions of the maximum.
    #[arg(long)]
    absolute: bool,
    /// Gradient edge cut as a fraction of the maximum magnitude.
    #[arg(long, default_value_t = DEFAULT_EDGE_FRACTION)]
    fraction: f64,
    /// LoG zero-crossing contrast as a fraction of the peak response (default 0.1).
    #[arg(long)]
    contrast: Option<f64>,
    /// Output PBM; parameters go to the same path with a `.json` extension.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plain: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    predicted: PathBuf,
    reference: PathBuf,
    #[arg(long, default_value_t = 0)]
    tolerance: usize,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Directory of `<stem>.in.<ext>` inputs and `<stem>.ref.pbm` references.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_terms: u32,
    #[arg(long, default_value = "null")]
    boundary: BoundaryCondition,
    #[arg(long, default_value_t = 2)]
    tolerance: usize,
    /// Binarization of graymap inputs.
    #[arg(long, default_value = "otsu")]
    threshold: ThresholdArg,
    /// Also score the top rules against Canny on each input.
    #[arg(long)]
    canny_agreement: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(long, default_value = "otsu")]
    threshold: ThresholdArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThresholdArg {
    Otsu,
    Fixed(u8),
}

impl std::str::FromStr for ThresholdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("otsu") {
            return Ok(ThresholdArg::Otsu);
        }
        s.parse::<u8>()
            .map(ThresholdArg::Fixed)
            .map_err(|_| format!("expected `otsu` or an integer 0-255, got {s:?}"))
    }
}

impl ThresholdArg {
    fn resolve(self, img: &GrayImage) -> Threshold {
        match self {
            ThresholdArg::Otsu => otsu_threshold(img),
            ThresholdArg::Fixed(v) => Threshold::fixed(v),
        }
    }
}

#[derive(Debug)]
enum CliError {
    /// Bad flags, unreadable or invalid input: exit 2.
    Usage(String),
    /// Anything else: exit 1.
    Internal(String),
}

impl From<ca_edge_core::Error> for CliError {
    fn from(e: ca_edge_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Edge(a) => cmd_edge(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Search(a) => cmd_search(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: internal: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_image(path: &Path) -> CliResult<PnmImage> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    read_pnm(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_bitmap(path: &Path) -> CliResult<BinaryGrid> {
    match read_image(path)? {
        PnmImage::Binary(g) => Ok(g),
        PnmImage::Gray(_) => Err(CliError::Usage(format!(
            "{}: expected a PBM bitmap",
            path.display()
        ))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn write_bitmap(path: &Path, g: &BinaryGrid, plain: bool) -> CliResult {
    let format = if plain { PnmFormat::P1 } else { PnmFormat::P4 };
    let bytes = write_pnm(&PnmImage::Binary(g.clone()), format)?;
    write_file(path, &bytes)
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(format!("cannot serialize report: {e}")))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// Binarizes graymaps; bitmaps pass through and report no threshold.
fn binarize(img: PnmImage, threshold: ThresholdArg) -> (BinaryGrid, Option<Threshold>) {
    match img {
        PnmImage::Binary(g) => (g, None),
        PnmImage::Gray(img) => {
            let t = threshold.resolve(&img);
            (binarize_fixed(&img, t), Some(t))
        }
    }
}

/// Expands `paper` and parses the rest, keeping first occurrences in order.
fn expand_rules(specs: &[String]) -> CliResult<Vec<LinearRule>> {
    let mut rules: Vec<LinearRule> = Vec::new();
    for spec in specs {
        let parsed = if spec.trim().eq_ignore_ascii_case("paper") {
            PAPER_RULES.to_vec()
        } else {
            vec![parse_rule(spec)?]
        };
        for r in parsed {
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
    }
    Ok(rules)
}

#[derive(Serialize)]
struct EdgeOutput {
    rule: u32,
    terms: Vec<u32>,
    file: String,
    popcount: usize,
}

#[derive(Serialize)]
struct EdgeSummary {
    input: String,
    height: usize,
    width: usize,
    threshold: Option<Threshold>,
    input_popcount: usize,
    boundary: BoundaryCondition,
    iterations: u32,
    outputs: Vec<EdgeOutput>,
}

fn cmd_edge(a: EdgeArgs) -> CliResult {
    let rules = expand_rules(&a.rules)?;
    let (grid, threshold) = binarize(read_image(&a.input)?, a.threshold);
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", a.out_dir.display())))?;
    let stem = file_stem(&a.input);

    let mut outputs = Vec::with_capacity(rules.len());
    for rule in rules {
        if rule.number() == 0 {
            eprintln!("warning: rule 0 always produces an empty edge map");
        }
        let cfg = StepConfig::new(rule, a.boundary, a.iterations)?;
        let out = run(&grid, &cfg);
        let name = format!("{stem}.rule{}.pbm", rule.number());
        write_bitmap(&a.out_dir.join(&name), &out, a.plain)?;
        println!(
            "rule {:>8}  popcount {:>8}  {name}",
            rule.number(),
            out.popcount()
        );
        outputs.push(EdgeOutput {
            rule: rule.number(),
            terms: rule.basics().collect(),
            file: name,
            popcount: out.popcount(),
        });
    }

    let summary = EdgeSummary {
        input: a.input.display().to_string(),
        height: grid.height(),
        width: grid.width(),
        threshold,
        input_popcount: grid.popcount(),
        boundary: a.boundary,
        iterations: a.iterations,
        outputs,
    };
    write_file(
        &a.out_dir.join(format!("{stem}.summary.json")),
        to_json(&summary)?.as_bytes(),
    )
}

#[derive(Serialize)]
struct BaselineSidecar {
    input: String,
    method: &'static str,
    params: BTreeMap<&'static str, serde_json::Value>,
    height: usize,
    width: usize,
    popcount: usize,
}

fn cmd_baseline(a: BaselineArgs) -> CliResult {
    let img = match read_image(&a.input)? {
        PnmImage::Gray(img) => img,
        PnmImage::Binary(g) => GrayImage::from_binary(&g),
    };
    let mut params = BTreeMap::new();
    let (method, edges) = match a.method {
        Method::Sobel | Method::Prewitt | Method::Roberts => {
            let (name, kind) = match a.method {
                Method::Sobel => ("sobel", GradientKind::Sobel),
                Method::Prewitt => ("prewitt", GradientKind::Prewitt),
                _ => ("roberts", GradientKind::Roberts),
            };
            if !(0.0..=1.0).contains(&a.fraction) {
                return Err(CliError::Usage(format!(
                    "--fraction must lie in [0, 1], got {}",
                    a.fraction
                )));
            }
            let field = gradient_operator(&img, kind)?;
            params.insert("fraction", a.fraction.into());
            params.insert("max_magnitude", field.max_magnitude().into());
            (name, gradient_edges(&field, a.fraction))
        }
        Method::Log => {
            let d = LogParams::default();
            let p = LogParams::new(a.sigma.unwrap_or(d.sigma), a.contrast.unwrap_or(d.contrast))?;
            params.insert("sigma", p.sigma.into());
            params.insert("contrast", p.contrast.into());
            ("log", log_operator(&img, p).edges)
        }
        Method::Canny => {
            let d = CannyParams::default();
            let scale = if a.absolute {
                ThresholdScale::Absolute
            } else {
                ThresholdScale::FractionOfMax
            };
            let p = CannyParams::new(
                a.sigma.unwrap_or(d.sigma),
                a.low.unwrap_or(d.low),
                a.high.unwrap_or(d.high),
                scale,
            )?;
            let r = canny_detailed(&img, p);
            params.insert("sigma", p.sigma.into());
            params.insert("low", p.low.into());
            params.insert("high", p.high.into());
            params.insert(
                "scale",
                serde_json::to_value(p.scale).expect("unit enum serializes"),
            );
            params.insert("low_magnitude", r.low.into());
            params.insert("high_magnitude", r.high.into());
            ("canny", r.edges)
        }
    };

    write_bitmap(&a.out, &edges, a.plain)?;
    let sidecar = BaselineSidecar {
        input: a.input.display().to_string(),
        method,
        params,
        height: edges.height(),
        width: edges.width(),
        popcount: edges.popcount(),
    };
    write_file(&a.out.with_extension("json"), to_json(&sidecar)?.as_bytes())?;
    println!("{method}: popcount {}", edges.popcount());
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> CliResult {
    let predicted = read_bitmap(&a.predicted)?;
    let reference = read_bitmap(&a.reference)?;
    let report = compare(&predicted, &reference, a.tolerance)?;
    let json = to_json(&report)?;
    if let Some(out) = &a.out {
        write_file(out, json.as_bytes())?;
    }
    print!("{json}");
    Ok(())
}

/// Pairs `<stem>.in.<ext>` with `<stem>.ref.pbm`, sorted by stem.
fn load_corpus(dir: &Path, threshold: ThresholdArg) -> CliResult<Vec<CorpusPair>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("cannot read corpus {}: {e}", dir.display())))?;
    let mut inputs: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut references: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in entries {
        let path = entry
            .map_err(|e| CliError::Usage(format!("cannot list corpus {}: {e}", dir.display())))?
            .path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Some(stem) = name.strip_suffix(".ref.pbm") {
            references.insert(stem.to_string(), path.clone());
        } else if let Some((stem, _ext)) = name.rsplit_once('.') {
            if let Some(stem) = stem.strip_suffix(".in") {
                if let Some(prev) = inputs.insert(stem.to_string(), path.clone()) {
                    return Err(CliError::Usage(format!(
                        "corpus stem {stem:?} has two inputs: {} and {}",
                        prev.display(),
                        path.display()
                    )));
                }
            }
        }
    }
    if inputs.is_empty() && references.is_empty() {
        return Err(CliError::Usage(format!(
            "corpus {} is empty: expected <stem>.in.<ext> and <stem>.ref.pbm pairs",
            dir.display()
        )));
    }
    if let Some(stem) = references.keys().find(|s| !inputs.contains_key(*s)) {
        return Err(CliError::Usage(format!(
            "corpus stem {stem:?} has a reference but no <stem>.in.* input"
        )));
    }

    let mut corpus = Vec::with_capacity(inputs.len());
    for (stem, input_path) in inputs {
        let Some(ref_path) = references.get(&stem) else {
            return Err(CliError::Usage(format!(
                "corpus stem {stem:?} is missing its reference {stem}.ref.pbm"
            )));
        };
        let (input, _) = binarize(read_image(&input_path)?, threshold);
        let reference = read_bitmap(ref_path)?;
        corpus.push(CorpusPair {
            name: stem,
            input,
            reference,
        });
    }
    Ok(corpus)
}

fn cmd_search(a: SearchArgs) -> CliResult {
    let corpus = load_corpus(&a.corpus, a.threshold)?;
    let cfg = SearchConfig {
        max_terms: a.max_terms,
        boundary: a.boundary,
        tolerance: a.tolerance,
        canny_agreement: a.canny_agreement,
    };
    let report = search_rules(&corpus, &cfg)?;
    if let Some(out) = &a.out {
        write_file(out, to_json(&report)?.as_bytes())?;
    }
    println!(
        "{} candidates over {} pairs (boundary {}, tolerance {})",
        report.candidates_evaluated, report.corpus.pairs, report.boundary, report.tolerance
    );
    for (rank, (rule, f)) in report.ranking.iter().take(10).enumerate() {
        let terms: Vec<String> = LinearRule::new(*rule)?
            .basics()
            .map(|b| b.to_string())
            .collect();
        println!("{:>3}  {rule:>8}  f {f:.6}  {}", rank + 1, terms.join("+"));
    }
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> CliResult {
    match read_image(&a.input)? {
        PnmImage::Binary(_) => {
            let bytes = fs::read(&a.input)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.input.display())))?;
            eprintln!(
                "notice: {} is already a bitmap; copied unchanged",
                a.input.display()
            );
            write_file(&a.out, &bytes)
        }
        PnmImage::Gray(img) => {
            let t = a.threshold.resolve(&img);
            let grid = binarize_fixed(&img, t);
            write_bitmap(&a.out, &grid, a.plain)?;
            let origin = serde_json::to_value(t.origin).expect("unit enum serializes");
            println!(
                "threshold {} ({})",
                t.value,
                origin.as_str().unwrap_or("fixed")
            );
            Ok(())
        }
    }
}
