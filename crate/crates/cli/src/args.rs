use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Hard cap on exhaustive enumeration lengths.
pub const MAX_LEN_CAP: usize = 10;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "boolglr",
    version,
    about = "Three-valued recognition for Boolean grammars"
)]
pub struct Cli {
    /// Grammar file.
    #[arg(long, global = true)]
    pub grammar: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Engine::Glr)]
    pub engine: Engine,

    /// Output format; `dump automaton` and `dump gss` default to dot.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Longest word enumerated by `diff`.
    #[arg(long, global = true, default_value_t = 6,
          value_parser = clap::value_parser!(u64).range(0..=MAX_LEN_CAP as u64))]
    pub max_len: u64,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Also report the verdict of every prefix.
    #[arg(long, global = true)]
    pub prefixes: bool,

    /// Print the oracle's fixpoint iterations to stderr.
    #[arg(long, global = true)]
    pub trace: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify words given as arguments, in a file, or on stdin.
    Check {
        /// Words to classify; `%eps` is the empty word.
        words: Vec<String>,
        /// Read one word per line from this file.
        #[arg(long, conflicts_with = "words")]
        input: Option<PathBuf>,
    },
    /// Compare both engines on every word up to `--max-len`.
    Diff,
    /// Print an internal structure.
    #[command(subcommand)]
    Dump(DumpTarget),
    /// Parse random words of growing length and fit growth rates.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32, 64, 128])]
        lengths: Vec<usize>,
        /// Parses per length; the fastest is reported.
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum DumpTarget {
    Automaton,
    Nullability,
    Gss {
        /// `%eps` is the empty word.
        word: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Oracle,
    Glr,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Tsv,
    JsonLines,
    Dot,
}
