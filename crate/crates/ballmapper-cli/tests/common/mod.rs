//! Helpers shared by the CLI and acceptance test binaries.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballmapper"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

pub fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

/// Minimal union-find, kept separate from the library so JSON recomputation
/// is an independent oracle.
pub struct Uf {
    parent: Vec<usize>,
}

impl Uf {
    pub fn new(n: usize) -> Self {
        Uf {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Summary {
    pub v: usize,
    pub e: usize,
    pub cc: usize,
    pub cycle_rank: usize,
}

/// Recomputes the summary quadruple from an exported JSON graph.
pub fn summary_from_json(path: &Path) -> Summary {
    let text = std::fs::read_to_string(path).expect("exported JSON exists");
    let doc: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let vertices = doc["vertices"].as_array().expect("vertices array");
    let edges = doc["edges"].as_array().expect("edges array");
    let v = vertices.len();
    let mut uf = Uf::new(v);
    for e in edges {
        uf.union(
            e["u"].as_u64().expect("edge u") as usize,
            e["v"].as_u64().expect("edge v") as usize,
        );
    }
    let cc = uf.components();
    Summary {
        v,
        e: edges.len(),
        cc,
        cycle_rank: edges.len() + cc - v,
    }
}

/// Parses the last `V=.. E=.. CC=.. cycle_rank=..` line of a run's stdout.
pub fn summary_from_stdout(stdout: &str) -> Summary {
    let line = stdout
        .lines()
        .rev()
        .find(|l| l.starts_with("V="))
        .expect("summary line in stdout");
    let mut fields = line.split_whitespace().map(|kv| {
        kv.split_once('=')
            .expect("key=value")
            .1
            .parse::<usize>()
            .expect("numeric summary field")
    });
    Summary {
        v: fields.next().unwrap(),
        e: fields.next().unwrap(),
        cc: fields.next().unwrap(),
        cycle_rank: fields.next().unwrap(),
    }
}

pub fn iris_path() -> String {
    format!("{}/../../data/iris.csv", env!("CARGO_MANIFEST_DIR"))
}
