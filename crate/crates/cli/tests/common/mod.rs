#![allow(dead_code)]

use std::path::{Path, PathBuf};

use tempfile::TempDir;

use itemgauge::item::Marginals;
use itemgauge::{generate_synthetic, serialize_dataset, Dataset, FittedModel};

pub const COURSES: [&str; 3] = ["Digital Systems", "Digital Communication", "Design of Algorithms"];

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("itemgauge").chain(args.iter().copied());
    let code = itemgauge_cli::run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// A scratch directory holding a labeled, course-tagged synthetic corpus.
pub struct Workspace {
    pub dir: TempDir,
    pub data: String,
}

impl Workspace {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let base = generate_synthetic(
            &Marginals::reference(),
            Some(&FittedModel::published_six_variable()),
            300,
            11,
        )
        .unwrap();
        let items = base
            .items()
            .iter()
            .enumerate()
            .map(|(i, item)| item.clone().with_course(COURSES[i % 3]))
            .collect();
        let data = dir.path().join("items.csv");
        std::fs::write(&data, serialize_dataset(&Dataset::new(items).unwrap())).unwrap();
        Workspace {
            data: data.to_string_lossy().into_owned(),
            dir,
        }
    }

    pub fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }

    pub fn write(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}
