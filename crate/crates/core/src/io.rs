//! JSON documents for games, policies and bimatrix games.
//!
//! Nested tables are written in the same index order as the in-memory flat
//! tables: `transitions[s][a][s']`, `rewards[i][s][a]`, `probs[i][s][a_i]`.
//! Floats use shortest round-trip formatting, so save/load is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bimatrix::BimatrixGame;
use crate::error::{Error, Result};
use crate::game::{MarkovGame, ProductPolicy};

pub const JOINT_ACTION_ORDER: &str = "player1_slowest";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    n_players: usize,
    n_states: usize,
    action_counts: Vec<usize>,
    gamma: f64,
    initial_dist: Vec<f64>,
    transitions: Vec<Vec<Vec<f64>>>,
    rewards: Vec<Vec<Vec<f64>>>,
    joint_action_order: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    n_players: usize,
    n_states: usize,
    action_counts: Vec<usize>,
    probs: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BimatrixDoc {
    #[serde(rename = "A1")]
    a1: Vec<Vec<f64>>,
    #[serde(rename = "A2")]
    a2: Vec<Vec<f64>>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: source.to_string(),
        message: format!("line {} column {}: {}", e.line(), e.column(), e),
    })
}

fn nest<'a>(flat: &'a [f64], outer: usize, inner: usize) -> impl Iterator<Item = Vec<f64>> + 'a {
    (0..outer).map(move |k| flat[k * inner..(k + 1) * inner].to_vec())
}

/// Flattens `table` checking every level has the expected length.
fn flatten3(table: &[Vec<Vec<f64>>], dims: [usize; 3], field: &str) -> Result<Vec<f64>> {
    let shape_err = |at: String, len: usize, want: usize| {
        Error::Shape(format!("{field}{at}: {len} entries, expected {want}"))
    };
    if table.len() != dims[0] {
        return Err(shape_err(String::new(), table.len(), dims[0]));
    }
    let mut out = Vec::with_capacity(dims.iter().product());
    for (i, mid) in table.iter().enumerate() {
        if mid.len() != dims[1] {
            return Err(shape_err(format!("[{i}]"), mid.len(), dims[1]));
        }
        for (j, row) in mid.iter().enumerate() {
            if row.len() != dims[2] {
                return Err(shape_err(format!("[{i}][{j}]"), row.len(), dims[2]));
            }
            out.extend_from_slice(row);
        }
    }
    Ok(out)
}

pub fn game_to_json(game: &MarkovGame) -> String {
    let (ns, na) = (game.n_states(), game.n_joint());
    let doc = GameDoc {
        n_players: game.n_players(),
        n_states: ns,
        action_counts: game.action_counts().to_vec(),
        gamma: game.gamma(),
        initial_dist: game.initial_dist().to_vec(),
        transitions: (0..ns)
            .map(|s| nest(&game.transitions()[s * na * ns..(s + 1) * na * ns], na, ns).collect())
            .collect(),
        rewards: (0..game.n_players())
            .map(|i| nest(game.rewards_of(i), ns, na).collect())
            .collect(),
        joint_action_order: JOINT_ACTION_ORDER.into(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises")
}

/// Parses and validates a game document. `source` names the input in errors.
pub fn game_from_json(text: &str, source: &str) -> Result<MarkovGame> {
    let doc: GameDoc = parse(text, source)?;
    if doc.joint_action_order != JOINT_ACTION_ORDER {
        return Err(Error::Parse {
            path: source.into(),
            message: format!(
                "joint_action_order must be \"{JOINT_ACTION_ORDER}\", got \"{}\"",
                doc.joint_action_order
            ),
        });
    }
    if doc.action_counts.len() != doc.n_players {
        return Err(Error::Shape(format!(
            "action_counts lists {} players, n_players is {}",
            doc.action_counts.len(),
            doc.n_players
        )));
    }
    let na: usize = doc.action_counts.iter().product();
    let ns = doc.n_states;
    let transitions = flatten3(&doc.transitions, [ns, na, ns], "transitions")?;
    let rewards = flatten3(&doc.rewards, [doc.n_players, ns, na], "rewards")?;
    MarkovGame::new(ns, doc.action_counts, transitions, rewards, doc.initial_dist, doc.gamma)
}

pub fn policy_to_json(policy: &ProductPolicy) -> String {
    let ns = policy.n_states();
    let doc = PolicyDoc {
        n_players: policy.n_players(),
        n_states: ns,
        action_counts: policy.action_counts().to_vec(),
        probs: policy
            .tables()
            .iter()
            .zip(policy.action_counts())
            .map(|(t, &m)| nest(t, ns, m).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises")
}

pub fn policy_from_json(text: &str, source: &str) -> Result<ProductPolicy> {
    let doc: PolicyDoc = parse(text, source)?;
    if doc.action_counts.len() != doc.n_players || doc.probs.len() != doc.n_players {
        return Err(Error::InvalidPolicy(format!(
            "n_players is {} but action_counts has {} and probs has {} entries",
            doc.n_players,
            doc.action_counts.len(),
            doc.probs.len()
        )));
    }
    let mut tables = Vec::with_capacity(doc.n_players);
    for (i, (player, &m)) in doc.probs.iter().zip(&doc.action_counts).enumerate() {
        tables.push(flatten3(std::slice::from_ref(player), [1, doc.n_states, m], &format!("probs[{i}]"))?);
    }
    ProductPolicy::new(&doc.action_counts, doc.n_states, tables)
}

pub fn bimatrix_to_json(game: &BimatrixGame) -> String {
    let doc = BimatrixDoc {
        a1: game.a1_rows(),
        a2: game.a2_rows(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serialises")
}

pub fn bimatrix_from_json(text: &str, source: &str) -> Result<BimatrixGame> {
    let doc: BimatrixDoc = parse(text, source)?;
    BimatrixGame::new(doc.a1, doc.a2)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_game(path: &Path) -> Result<MarkovGame> {
    game_from_json(&read_text(path)?, &path.display().to_string())
}

pub fn save_game(game: &MarkovGame, path: &Path) -> Result<()> {
    write_text(path, &game_to_json(game))
}

pub fn load_policy(path: &Path) -> Result<ProductPolicy> {
    policy_from_json(&read_text(path)?, &path.display().to_string())
}

pub fn save_policy(policy: &ProductPolicy, path: &Path) -> Result<()> {
    write_text(path, &policy_to_json(policy))
}

pub fn load_bimatrix(path: &Path) -> Result<BimatrixGame> {
    bimatrix_from_json(&read_text(path)?, &path.display().to_string())
}
