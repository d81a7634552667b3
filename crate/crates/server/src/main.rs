use std::io::IsTerminal;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use atlas_server::{index_command, serve_command, ServerConfig};
use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "atlas", version, about = "Ontology-guided corpus navigation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate a corpus against an ontology and write a snapshot.
    Index {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, value_name = "FILE")]
        ontology: PathBuf,
        #[arg(long, value_name = "SNAPSHOT")]
        out: PathBuf,
        #[arg(long, value_name = "FILE")]
        stopwords: Option<PathBuf>,
    },
    /// Serve the HTTP API over a snapshot.
    Serve {
        #[arg(long, value_name = "SNAPSHOT")]
        snapshot: PathBuf,
        #[arg(long, value_name = "HOST:PORT", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        #[arg(long, value_name = "D")]
        distortion: Option<f64>,
        #[arg(long, value_name = "T")]
        tau: Option<f64>,
        #[arg(long, value_name = "K")]
        k: Option<usize>,
        #[arg(long, value_name = "N")]
        max_neighbors: Option<usize>,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();

    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let defaults = ServerConfig::default();
    match cli.command {
        Command::Index {
            corpus,
            ontology,
            out,
            stopwords,
        } => {
            let config = ServerConfig {
                corpus_dir: Some(corpus),
                ontology_path: Some(ontology),
                snapshot_path: out,
                stopwords_path: stopwords,
                ..defaults
            };
            let report = index_command(&config)?;
            println!("documents: {}", report.documents);
            println!("annotated documents: {}", report.annotated_documents);
            println!("concepts matched: {}", report.concepts_matched);
            println!("association edges: {}", report.association_edges);
            println!("similarity edges: {}", report.similarity_edges);
            Ok(())
        }
        Command::Serve {
            snapshot,
            listen,
            distortion,
            tau,
            k,
            max_neighbors,
        } => {
            let config = ServerConfig {
                snapshot_path: snapshot,
                listen,
                distortion: distortion.unwrap_or(defaults.distortion),
                tau: tau.unwrap_or(defaults.tau),
                k: k.unwrap_or(defaults.k),
                max_neighbors: max_neighbors.unwrap_or(defaults.max_neighbors),
                ..defaults
            };
            config.validate()?;
            tokio::runtime::Runtime::new()?.block_on(serve_command(&config))
        }
    }
}
