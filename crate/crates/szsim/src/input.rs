//! Graph and coin JSON inputs.
//!
//! Graph files:
//!
//! ```json
//! { "n": 3, "edges": [[0, 1, 1.0], [1, 2, 0.5], [1, 0, 0.5], [2, 0, 1.0]],
//!   "link_phases": [[1, 2, 1.5708]], "apr": [3.14159, 3.14159, 1.0] }
//! ```
//!
//! Each edge `[i, j, w]` is the probability `w` of jumping from `i` to `j`,
//! and each link phase `[i, j, rad]` is attached to the edge state
//! `|i>_1 |j>_2`. Columns must already sum to one; nothing is renormalized.
//!
//! Coin files list, per node, its neighbors in coin-basis order and the coin
//! as rows of `[re, im]` pairs:
//!
//! ```json
//! { "n": 3, "coins": [ { "neighbors": [1, 2], "matrix": [[[0,0],[1,0]], [[1,0],[0,0]]] }, ... ] }
//! ```

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use szegedy::coin::DEFAULT_CAST_TOL;
use szegedy::{cast_to_szegedy, CoinSet, Complex64, LemmaClass, PhaseConfig, TransitionMatrix};

use crate::error::{Result, SimError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    link_phases: Vec<(usize, usize, f64)>,
    apr: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinFile {
    n: usize,
    coins: Vec<CoinEntry>,
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinEntry {
    neighbors: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// A walk read from disk. `lemma_class` is set for coin inputs.
#[derive(Debug, Clone)]
pub struct LoadedWalk {
    pub g: TransitionMatrix,
    pub phases: PhaseConfig,
    pub lemma_class: Option<LemmaClass>,
}

pub fn load_walk(path: &Path) -> Result<LoadedWalk> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e.to_string()))?;
    parse_walk(&text).map_err(|e| match e {
        SimError::Validation(message) => input_error(path, message),
        other => other,
    })
}

pub fn parse_walk(text: &str) -> Result<LoadedWalk> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SimError::Validation(e.to_string()))?;
    if value.get("coins").is_some() {
        let file: CoinFile = serde_json::from_value(value).map_err(|e| SimError::Validation(e.to_string()))?;
        from_coins(file)
    } else {
        let file: GraphFile = serde_json::from_value(value).map_err(|e| SimError::Validation(e.to_string()))?;
        from_graph(file)
    }
}

fn input_error(path: &Path, message: String) -> SimError {
    SimError::Input {
        path: path.to_path_buf(),
        message,
    }
}

fn check_index(i: usize, n: usize, what: &str) -> Result<()> {
    if i >= n {
        return Err(SimError::Validation(format!("{what} refers to node {i} but n = {n}")));
    }
    Ok(())
}

fn from_graph(file: GraphFile) -> Result<LoadedWalk> {
    let n = file.n;
    if n == 0 {
        return Err(SimError::Validation("n must be positive".into()));
    }
    let mut g = DMatrix::zeros(n, n);
    let mut seen = DMatrix::from_element(n, n, false);
    for &(i, j, w) in &file.edges {
        check_index(i, n, "edge")?;
        check_index(j, n, "edge")?;
        if seen[(j, i)] {
            return Err(SimError::Validation(format!("edge ({i}, {j}) listed twice")));
        }
        seen[(j, i)] = true;
        g[(j, i)] = w;
    }
    let mut link = DMatrix::zeros(n, n);
    for &(i, j, phase) in &file.link_phases {
        check_index(i, n, "link phase")?;
        check_index(j, n, "link phase")?;
        link[(i, j)] = phase;
    }
    let apr = match file.apr {
        Some(apr) if apr.len() != n => {
            return Err(SimError::Validation(format!("apr has {} entries for n = {n}", apr.len())))
        }
        Some(apr) => apr,
        None => vec![std::f64::consts::PI; n],
    };
    Ok(LoadedWalk {
        g: TransitionMatrix::new(g)?,
        phases: PhaseConfig::new(apr, link)?,
        lemma_class: None,
    })
}

fn from_coins(file: CoinFile) -> Result<LoadedWalk> {
    if file.coins.len() != file.n {
        return Err(SimError::Validation(format!(
            "{} coins listed for n = {}",
            file.coins.len(),
            file.n
        )));
    }
    let mut coins = Vec::with_capacity(file.n);
    let mut orders = Vec::with_capacity(file.n);
    for (i, entry) in file.coins.into_iter().enumerate() {
        let d = entry.neighbors.len();
        if entry.matrix.len() != d || entry.matrix.iter().any(|row| row.len() != d) {
            return Err(SimError::Validation(format!(
                "coin {i} must be {d}x{d} to match its neighbor list"
            )));
        }
        coins.push(DMatrix::from_fn(d, d, |r, c| {
            let [re, im] = entry.matrix[r][c];
            Complex64::new(re, im)
        }));
        orders.push(entry.neighbors);
    }
    let coins = CoinSet::new(coins, orders)?;
    let cast = cast_to_szegedy(&coins, &coins.adjacency(), file.tol.unwrap_or(DEFAULT_CAST_TOL))?;
    Ok(LoadedWalk {
        g: cast.g,
        phases: cast.phases,
        lemma_class: Some(cast.lemma_class),
    })
}
