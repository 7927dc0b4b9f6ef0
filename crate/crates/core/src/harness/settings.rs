//! Built-in instances.

use crate::envs::{BanditInstance, RewardFamily};
use crate::error::{LexError, Result};
use crate::lexcore::{analyze_instance, InstanceAnalysis, RewardMatrix};

/// Names accepted by [`builtin_setting`], with a one-line description each.
pub const SETTINGS: [(&str, &str); 6] = [
    ("setting1", "3 arms, 2 objectives: (.5,.5) (.5,.4) (.4,.9)"),
    ("setting2", "3 arms, 2 objectives: (.5,.5) (.5,.4) (.4,.5)"),
    ("setting3", "3 arms, 2 objectives: (.5,.5) (.5,.4) (.4,.1)"),
    (
        "setting4",
        "43 arms, 3 objectives: {.9,.5,.4,.1}^3 not above (.5,.5,.5)",
    ),
    (
        "setting5",
        "19 arms, 3 objectives: setting4 with objective-2 mean >= .5",
    ),
    (
        "setting5-alt",
        "35 arms, 3 objectives: setting4 without the objective-2 drop set",
    ),
];

const GRID: [f64; 4] = [0.9, 0.5, 0.4, 0.1];
const CENTER: [f64; 3] = [0.5, 0.5, 0.5];

/// Every vector of the grid cube that does not lexicographically beat the
/// center, in descending lexicographic order.
fn cube_below_center() -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(43);
    // GRID is descending, so nested iteration yields descending lex order.
    for &x in &GRID {
        for &y in &GRID {
            for &z in &GRID {
                let v = [x, y, z];
                let above = v
                    .iter()
                    .zip(&CENTER)
                    .find(|(a, b)| a != b)
                    .is_some_and(|(a, b)| a > b);
                if !above {
                    rows.push(v.to_vec());
                }
            }
        }
    }
    rows
}

fn matrix_for(name: &str) -> Option<RewardMatrix> {
    let rows: Vec<Vec<f64>> = match name {
        "setting1" => vec![vec![0.5, 0.5], vec![0.5, 0.4], vec![0.4, 0.9]],
        "setting2" => vec![vec![0.5, 0.5], vec![0.5, 0.4], vec![0.4, 0.5]],
        "setting3" => vec![vec![0.5, 0.5], vec![0.5, 0.4], vec![0.4, 0.1]],
        "setting4" => cube_below_center(),
        "setting5" => cube_below_center()
            .into_iter()
            .filter(|r| r[1] >= 0.5)
            .collect(),
        "setting5-alt" => {
            let full = RewardMatrix::new(cube_below_center()).ok()?;
            let analysis = analyze_instance(&full);
            (0..full.num_arms())
                .filter(|a| analysis.drop_objective[*a] != Some(1))
                .map(|a| full.row(a).to_vec())
                .collect()
        }
        _ => return None,
    };
    RewardMatrix::new(rows).ok()
}

/// Builds a named Bernoulli instance and its analysis.
pub fn builtin_setting(name: &str) -> Result<(BanditInstance, InstanceAnalysis)> {
    let matrix = matrix_for(name).ok_or_else(|| {
        let known: Vec<&str> = SETTINGS.iter().map(|(n, _)| *n).collect();
        LexError::Config(format!(
            "unknown setting '{}' (known: {})",
            name,
            known.join(", ")
        ))
    })?;
    let analysis = analyze_instance(&matrix);
    let instance = BanditInstance::new(matrix, RewardFamily::Bernoulli, name)?;
    Ok((instance, analysis))
}
