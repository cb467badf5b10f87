//! Conversion of CSV outputs into whitespace-separated `.dat` files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::HarnessError;

type Result<T> = std::result::Result<T, HarnessError>;

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Result<Csv> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
    let bad = |e: csv::Error| HarnessError::Usage(format!("{}: {e}", path.display()));
    let header = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(bad)?.iter().map(|f| f.replace(char::is_whitespace, "_")).collect());
    }
    Ok(Csv { header, rows })
}

/// Lists the CSV files named by `inputs`; directories contribute every
/// `*.csv` directly inside them.
fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    if inputs.is_empty() {
        return Err(HarnessError::Usage("no input files given".into()));
    }
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| HarnessError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == "csv"))
                .collect();
            found.sort();
            files.extend(found);
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(HarnessError::Usage(format!("input {} does not exist", p.display())));
        }
    }
    if files.is_empty() {
        return Err(HarnessError::Usage("no CSV files among the inputs".into()));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// `series_<group>_r<k>` → `(group, k)`.
fn series_group(stem: &str) -> Option<(String, usize)> {
    let rest = stem.strip_prefix("series_")?;
    let (group, k) = rest.rsplit_once("_r")?;
    Some((group.to_string(), k.parse().ok()?))
}

fn render(c: &Csv) -> String {
    let mut s = String::new();
    if c.header.len() == 1 {
        s.push_str(&format!("# index {}\n", c.header[0]));
        for (k, row) in c.rows.iter().enumerate() {
            s.push_str(&format!("{k} {}\n", row[0]));
        }
    } else {
        s.push_str(&format!("# {}\n", c.header.join(" ")));
        for row in &c.rows {
            s.push_str(&row.join(" "));
            s.push('\n');
        }
    }
    s
}

/// Per-replica `M_LR` traces plus their mean and standard error.
fn render_traces(group: &str, replicas: &BTreeMap<usize, Csv>) -> Result<String> {
    let column = |c: &Csv, name: &str| {
        c.header.iter().position(|h| h == name).ok_or_else(|| HarnessError::Usage(format!("series {group}: no {name} column")))
    };
    let mut traces = Vec::new();
    let mut sweeps: Option<Vec<String>> = None;
    for c in replicas.values() {
        let (ks, km) = (column(c, "sweep")?, column(c, "M_LR")?);
        let s: Vec<String> = c.rows.iter().map(|r| r[ks].clone()).collect();
        match &sweeps {
            Some(prev) if *prev != s => {
                return Err(HarnessError::Usage(format!("series {group}: replicas record different sweeps")))
            }
            _ => sweeps = Some(s),
        }
        let vals = c
            .rows
            .iter()
            .map(|r| r[km].parse::<f64>().map_err(|e| HarnessError::Usage(format!("series {group}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        traces.push(vals);
    }
    let mut s = String::from("# sweep");
    for k in replicas.keys() {
        s.push_str(&format!(" M_LR_r{k}"));
    }
    s.push_str(" mean stderr\n");
    let n = traces.len() as f64;
    for (i, sweep) in sweeps.unwrap_or_default().iter().enumerate() {
        let vals: Vec<f64> = traces.iter().map(|t| t[i]).collect();
        let mean = vals.iter().sum::<f64>() / n;
        let stderr = if traces.len() > 1 {
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        s.push_str(sweep);
        for v in &vals {
            s.push_str(&format!(" {v:.16e}"));
        }
        s.push_str(&format!(" {mean:.16e} {stderr:.16e}\n"));
    }
    Ok(s)
}

/// Writes one `.dat` per input CSV, plus `<group>_traces.dat` for every
/// group of metastability series files. Returns the written paths.
pub fn emit_plot_data(inputs: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let files = collect_inputs(inputs)?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut groups: BTreeMap<String, BTreeMap<usize, Csv>> = BTreeMap::new();
    for f in &files {
        let c = read_csv(f)?;
        let name = stem(f);
        let target = out_dir.join(format!("{name}.dat"));
        std::fs::write(&target, render(&c)).map_err(|e| HarnessError::io(&target, e))?;
        written.push(target);
        if let Some((g, k)) = series_group(&name) {
            groups.entry(g).or_default().insert(k, c);
        }
    }
    for (g, replicas) in &groups {
        let target = out_dir.join(format!("{g}_traces.dat"));
        std::fs::write(&target, render_traces(g, replicas)?).map_err(|e| HarnessError::io(&target, e))?;
        written.push(target);
    }
    Ok(written)
}
