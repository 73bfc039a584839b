//! Plain-text model files.
//!
//! ```text
//! smote-reg-mlp 1
//! layers 3 64 64 1
//! feature core_edge_nm
//! ...
//! target length_nm
//! feature_mean <values>
//! feature_std <values>
//! target_mean <value>
//! target_std <value>
//! weights 0 64 3
//! <one line per matrix row>
//! bias 0 64
//! <values>
//! ...
//! end
//! ```
//!
//! Numbers use 17 significant digits, so loading reproduces every parameter
//! bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::network::Network;
use super::train::MlpModel;
use crate::dataset::Standardizer;
use crate::error::{Error, Result};
use crate::numfmt::format_sig;

const MAGIC: &str = "smote-reg-mlp";
const VERSION: u32 = 1;

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| format_sig(v, 17)).collect::<Vec<_>>().join(" ")
}

pub fn to_text(model: &MlpModel) -> String {
    let net = &model.network;
    let mut out = String::new();
    let sizes: Vec<String> = net.layer_sizes().iter().map(usize::to_string).collect();
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    writeln!(out, "layers {}", sizes.join(" ")).unwrap();
    for name in &model.feature_names {
        writeln!(out, "feature {name}").unwrap();
    }
    writeln!(out, "target {}", model.target_name).unwrap();
    writeln!(out, "feature_mean {}", join(model.feature_scaler.means())).unwrap();
    writeln!(out, "feature_std {}", join(model.feature_scaler.stds())).unwrap();
    writeln!(out, "target_mean {}", join(model.target_scaler.means())).unwrap();
    writeln!(out, "target_std {}", join(model.target_scaler.stds())).unwrap();
    for l in 0..net.n_layers() {
        let (rows, cols) = net.weight_shape(l);
        writeln!(out, "weights {l} {rows} {cols}").unwrap();
        for row in net.weights(l).chunks(cols) {
            writeln!(out, "{}", join(row)).unwrap();
        }
        writeln!(out, "bias {l} {rows}").unwrap();
        writeln!(out, "{}", join(net.bias(l))).unwrap();
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self.iter.next().ok_or_else(|| self.err("unexpected end of file"))?;
        self.line = i + 1;
        Ok(l)
    }

    /// Next line, which must start with `key`; returns the remainder.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            _ if l == key => Ok(""),
            _ => Err(self.err(format!("expected `{key}`"))),
        }
    }

    fn numbers<T: std::str::FromStr>(&self, s: &str, expected: usize) -> Result<Vec<T>> {
        let vals = s
            .split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| self.err(format!("bad number `{t}`"))))
            .collect::<Result<Vec<T>>>()?;
        if vals.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", vals.len())));
        }
        Ok(vals)
    }
}

pub fn from_text(text: &str) -> Result<MlpModel> {
    let mut lines = Lines { iter: text.lines().enumerate(), line: 0 };
    let header = lines.keyed(MAGIC)?;
    if header.trim() != VERSION.to_string() {
        return Err(lines.err(format!("unsupported version `{header}`")));
    }
    let sizes_text = lines.keyed("layers")?;
    let n_sizes = sizes_text.split_whitespace().count();
    let sizes: Vec<usize> = lines.numbers(sizes_text, n_sizes)?;
    if sizes.len() < 2 {
        return Err(lines.err("need at least two layer sizes"));
    }
    let mut feature_names = Vec::with_capacity(sizes[0]);
    for _ in 0..sizes[0] {
        feature_names.push(lines.keyed("feature")?.to_string());
    }
    let target_name = lines.keyed("target")?.to_string();
    let nf = sizes[0];
    let fm = lines.keyed("feature_mean")?;
    let fm = lines.numbers(fm, nf)?;
    let fs = lines.keyed("feature_std")?;
    let fs = lines.numbers(fs, nf)?;
    let tm = lines.keyed("target_mean")?;
    let tm = lines.numbers(tm, 1)?;
    let ts = lines.keyed("target_std")?;
    let ts = lines.numbers(ts, 1)?;

    let mut params = Vec::new();
    for l in 0..sizes.len() - 1 {
        let (rows, cols) = (sizes[l + 1], sizes[l]);
        let head = lines.keyed("weights")?;
        if lines.numbers::<usize>(head, 3)? != [l, rows, cols] {
            return Err(lines.err(format!("expected weights {l} {rows} {cols}")));
        }
        for _ in 0..rows {
            let row = lines.next()?;
            params.extend(lines.numbers::<f64>(row, cols)?);
        }
        let head = lines.keyed("bias")?;
        if lines.numbers::<usize>(head, 2)? != [l, rows] {
            return Err(lines.err(format!("expected bias {l} {rows}")));
        }
        let row = lines.next()?;
        params.extend(lines.numbers::<f64>(row, rows)?);
    }
    lines.keyed("end")?;

    let network = Network::from_params(&sizes, params)?;
    Ok(MlpModel {
        network,
        feature_names,
        target_name,
        feature_scaler: Standardizer::from_parts(fm, fs)?,
        target_scaler: Standardizer::from_parts(tm, ts)?,
    })
}

pub fn save_model(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_text(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MlpModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text)
}
