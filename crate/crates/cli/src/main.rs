use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trendlens_cli::config::PipelineConfig;
use trendlens_cli::{run, CliError, RunOptions, Stage, REPORT_FILE};

#[derive(Parser)]
#[command(
    name = "trendlens",
    version,
    about = "Security topic trends across news, blogs and the web"
)]
struct Cli {
    #[command(subcommand)]
    stage: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read the article dumps, keep keyword matches, drop duplicates
    Ingest(Common),
    /// Fit topic models and remove off-topic articles
    Model(Common),
    /// Extract domain terms per topic
    Terms(Common),
    /// Score articles against the category corpora
    Categorize(Common),
    /// Popularity, impact series and co-occurrence
    Trends(Common),
    /// Significance tests, trend verdicts and lagged correlation
    Stats(Common),
    /// Write and print the summary report
    Report(Common),
    /// Run every stage in order
    All(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Recompute even if outputs are current or came from another configuration
    #[arg(long)]
    force: bool,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (stages, common): (Vec<Stage>, Common) = match cli.stage {
        Command::Ingest(c) => (vec![Stage::Ingest], c),
        Command::Model(c) => (vec![Stage::Model], c),
        Command::Terms(c) => (vec![Stage::Terms], c),
        Command::Categorize(c) => (vec![Stage::Categorize], c),
        Command::Trends(c) => (vec![Stage::Trends], c),
        Command::Stats(c) => (vec![Stage::Stats], c),
        Command::Report(c) => (vec![Stage::Report], c),
        Command::All(c) => (Stage::PIPELINE.to_vec(), c),
    };
    match execute(&stages, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(stages: &[Stage], common: &Common) -> Result<(), CliError> {
    let opts = RunOptions {
        force: common.force,
        seed: common.seed,
    };
    for outcome in run(stages, &common.config, opts)? {
        let state = if outcome.skipped {
            "up to date"
        } else {
            "done"
        };
        eprintln!("{:<10} {state}", outcome.stage.name());
    }
    if stages.last() == Some(&Stage::Report) {
        let cfg = PipelineConfig::load(&common.config)?;
        let path = cfg.output_dir.join(REPORT_FILE);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        print!("{text}");
    }
    Ok(())
}
