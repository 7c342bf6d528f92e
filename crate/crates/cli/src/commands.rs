use std::fs::File;
use std::path::{Path, PathBuf};

use fvbm::exact::{log_normalization_constant, sample};
use fvbm::graph::{build_network, emit_dot, DecisionMode};
use fvbm::votes::{parse_votes, prepare, ImputeConfig, MemberExtraction, PrepareConfig, SplitResolution};
use fvbm::{build_report, enumerate_pmf, fit, AdjustmentGroups, FdrMethod, FitConfig, Init, SpinMatrix};
use serde::Serialize;

use crate::config::FileConfig;
use crate::documents::{
    check_schema, read_json, read_params, to_json, FitDocument, GraphDocument, PairDocument, ProbsDocument,
    ReportDocument, SCHEMA_VERSION,
};
use crate::{Cli, CliError, Command, FitArgs, GraphArgs, InferArgs, PrepareArgs, ProbsArgs, SimulateArgs};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Prepare(args) => cmd_prepare(args, &file),
        Command::Fit(args) => cmd_fit(args, &file),
        Command::Infer(args) => cmd_infer(args, &file),
        Command::Probs(args) => cmd_probs(args),
        Command::Graph(args) => cmd_graph(args, &file),
        Command::Simulate(args) => cmd_simulate(args, &file),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn in_context(path: &Path) -> impl Fn(fvbm::Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn parse_flag<T: std::str::FromStr<Err = fvbm::Error>>(value: &str) -> Result<T, CliError> {
    value.parse().map_err(CliError::from)
}

fn read_matrix(path: &Path) -> Result<(SpinMatrix, Vec<String>), CliError> {
    let (data, labels) = SpinMatrix::from_csv(open(path)?).map_err(in_context(path))?;
    if data.is_empty() {
        return Err(CliError::Data(format!("{}: no observations", path.display())));
    }
    Ok((data, labels))
}

fn cmd_prepare(args: PrepareArgs, file: &FileConfig) -> Result<(), CliError> {
    let section = &file.prepare;
    let k = args.k.or(section.k).unwrap_or(3);
    let drop_threshold = args.drop_threshold.or(section.drop_threshold).unwrap_or(0.5);
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if !(drop_threshold > 0.0 && drop_threshold <= 1.0) {
        return Err(CliError::Usage("--drop-threshold must lie in (0, 1]".into()));
    }
    let reference = args.reference.or_else(|| section.reference.clone()).unwrap_or_else(|| "LNP".into());
    let member = args.extract_member.or_else(|| section.extract_member.clone());
    let label = args.member_label.or_else(|| section.member_label.clone());
    let extract = match (member, label) {
        (Some(m), Some(l)) => Some(MemberExtraction::new(m).with_label(l)),
        (Some(m), None) => Some(MemberExtraction::new(m)),
        (None, Some(_)) => return Err(CliError::Usage("--member-label requires --extract-member".into())),
        (None, None) => None,
    };

    let table = parse_votes(open(&args.votes)?).map_err(in_context(&args.votes))?;
    let splits = match &args.splits {
        Some(path) => SplitResolution::parse(open(path)?).map_err(in_context(path))?,
        None => SplitResolution::new(),
    };
    let config = PrepareConfig { reference, extract, drop_threshold, impute: ImputeConfig { k } };
    let prepared = prepare(&table, &splits, &config).map_err(in_context(&args.votes))?;

    #[derive(Serialize)]
    struct Provenance<'a> {
        schema_version: u32,
        votes: String,
        splits: Option<String>,
        reference: &'a str,
        k: usize,
        drop_threshold: f64,
        rows: usize,
        labels: &'a [String],
        #[serde(flatten)]
        log: &'a fvbm::votes::PrepareLog,
    }
    let provenance = Provenance {
        schema_version: SCHEMA_VERSION,
        votes: args.votes.display().to_string(),
        splits: args.splits.as_ref().map(|p| p.display().to_string()),
        reference: &config.reference,
        k,
        drop_threshold,
        rows: prepared.data.nrows(),
        labels: &prepared.labels,
        log: &prepared.log,
    };
    write(&args.out, &prepared.data.to_csv(&prepared.labels)?)?;
    let log_path = args.log.unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".log.json");
        PathBuf::from(name)
    });
    write(&log_path, &to_json(&provenance)?)?;
    let log = &prepared.log;
    eprintln!(
        "prepared {} x {}: {} splits resolved, {} columns dropped, {} cells imputed",
        prepared.data.nrows(),
        prepared.labels.len(),
        log.splits_resolved,
        log.dropped_columns.len(),
        log.imputed.len()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs, file: &FileConfig) -> Result<(), CliError> {
    let section = &file.fit;
    let defaults = FitConfig::default();
    let init = match args.init.as_deref().or(section.init.as_deref()) {
        None | Some("zeros") => Init::Zeros,
        Some(path) => Init::Params(read_params(Path::new(path))?.0),
    };
    let config = FitConfig {
        max_iterations: args.max_iter.or(section.max_iter).unwrap_or(defaults.max_iterations),
        objective_tolerance: args.tol.or(section.tol).unwrap_or(defaults.objective_tolerance),
        step_tolerance: args.step_tol.or(section.step_tol).unwrap_or(defaults.step_tolerance),
        init,
    };
    config.validate()?;
    let strict = args.strict || section.strict.unwrap_or(false);

    let (data, labels) = read_matrix(&args.data)?;
    let result = fit(&data, &config).map_err(in_context(&args.data))?;
    if !result.degenerate_columns.is_empty() {
        let names: Vec<&str> = result.degenerate_columns.iter().map(|&j| labels[j].as_str()).collect();
        let message = format!("constant columns have no finite bias estimate: {}", names.join(", "));
        if strict {
            return Err(CliError::Data(message));
        }
        eprintln!("warning: {message}");
    }
    if !result.converged && result.degenerate_columns.is_empty() {
        let message = format!("fit did not converge within {} sweeps", result.iterations_used);
        if strict {
            return Err(CliError::Numerical(message));
        }
        eprintln!("warning: {message}");
    }
    let doc = FitDocument { schema_version: SCHEMA_VERSION, labels, fit: result };
    write(&args.out, &to_json(&doc)?)
}

fn cmd_infer(args: InferArgs, file: &FileConfig) -> Result<(), CliError> {
    let method: FdrMethod = parse_flag(args.fdr.as_deref().or(file.infer.fdr.as_deref()).unwrap_or("by"))?;
    let groups: AdjustmentGroups =
        parse_flag(args.groups.as_deref().or(file.infer.groups.as_deref()).unwrap_or("subtables"))?;

    check_schema(&args.fit)?;
    let doc: FitDocument = read_json(&args.fit)?;
    let (data, labels) = read_matrix(&args.data)?;
    if labels != doc.labels {
        return Err(CliError::Data(format!(
            "{} columns {:?} do not match the fit's {:?}",
            args.data.display(),
            labels,
            doc.labels
        )));
    }
    let report = build_report(&doc.fit, &data, &groups, method)?;
    let tables = report.to_text(&labels);
    let out = ReportDocument { schema_version: SCHEMA_VERSION, labels, report };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    write(&args.out_dir.join("report.json"), &to_json(&out)?)?;
    write(&args.out_dir.join("tables.txt"), &tables)
}

fn cmd_probs(args: ProbsArgs) -> Result<(), CliError> {
    let (params, labels) = read_params(&args.fit)?;
    let mut wanted = Vec::new();
    for spec in &args.pair {
        let index = |name: &str| {
            labels
                .iter()
                .position(|l| l.eq_ignore_ascii_case(name.trim()))
                .ok_or_else(|| CliError::Usage(format!("--pair {spec}: unknown column {name:?}")))
        };
        let (a, b) = spec.split_once(',').ok_or_else(|| CliError::Usage(format!("--pair expects A,B, got {spec:?}")))?;
        let (j, k) = (index(a)?, index(b)?);
        if j == k {
            return Err(CliError::Usage(format!("--pair {spec}: columns must differ")));
        }
        wanted.push((j, k));
    }

    let table = enumerate_pmf(&params)?;
    let pairs = wanted
        .into_iter()
        .map(|(j, k)| {
            let joint = table.pairwise_joint(j, k)?;
            Ok(PairDocument {
                first: labels[j].clone(),
                second: labels[k].clone(),
                concordance: joint.concordance(),
                joint,
            })
        })
        .collect::<Result<Vec<_>, fvbm::Error>>()?;
    let doc = ProbsDocument {
        schema_version: SCHEMA_VERSION,
        log_normalization_constant: log_normalization_constant(&params)?,
        marginals: table.marginals(),
        labels,
        pairs,
    };
    write_or_print(args.out.as_deref(), &to_json(&doc)?)
}

fn cmd_graph(args: GraphArgs, file: &FileConfig) -> Result<(), CliError> {
    let mode: DecisionMode = parse_flag(args.mode.as_deref().or(file.graph.mode.as_deref()).unwrap_or("raw"))?;
    let level = args.level.or(file.graph.level).unwrap_or(match mode {
        DecisionMode::Raw => 0.05,
        DecisionMode::Fdr => 0.10,
    });
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Usage("--level must lie in (0, 1)".into()));
    }
    check_schema(&args.report)?;
    let doc: ReportDocument = read_json(&args.report)?;
    let spec = build_network(&doc.report, &doc.labels, mode, level)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    write(&args.out_dir.join("graph.dot"), &emit_dot(&spec))?;
    let json = GraphDocument { schema_version: SCHEMA_VERSION, network: &spec };
    write(&args.out_dir.join("graph.json"), &to_json(&json)?)?;
    eprintln!(
        "{} of {} nodes and {} of {} edges significant",
        spec.significant_nodes(),
        spec.nodes.len(),
        spec.significant_edges(),
        spec.edges.len()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, file: &FileConfig) -> Result<(), CliError> {
    let seed = args.seed.or(file.simulate.seed).unwrap_or(0);
    let (params, labels) = read_params(&args.params)?;
    let data = sample(&params, args.n, seed)?;
    write_or_print(args.out.as_deref(), &data.to_csv(&labels)?)
}
