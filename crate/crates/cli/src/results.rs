use std::path::Path;

use anyhow::{ensure, Context, Result};

use gallerist::metrics::{Label, UNKNOWN_LABEL};

/// Per query image (sorted by file name), per painting (left to right), the
/// ranked labels. An unknown painting is answered by the list `[-1]`.
pub type QueryResults = Vec<Vec<Vec<Label>>>;

/// Checks the shape rules JSON typing cannot express.
pub fn validate(results: &QueryResults) -> Result<()> {
    for (i, image) in results.iter().enumerate() {
        ensure!(image.len() <= 3, "image {i}: {} paintings, at most 3 allowed", image.len());
        for (j, ranking) in image.iter().enumerate() {
            ensure!(
                ranking.iter().all(|&l| l >= UNKNOWN_LABEL),
                "image {i} painting {j}: labels must be -1 or non-negative"
            );
            ensure!(
                !ranking.contains(&UNKNOWN_LABEL) || ranking.len() == 1,
                "image {i} painting {j}: -1 must stand alone"
            );
            let mut seen = ranking.clone();
            seen.sort_unstable();
            seen.dedup();
            ensure!(seen.len() == ranking.len(), "image {i} painting {j}: repeated label");
        }
    }
    Ok(())
}

pub fn to_json(results: &QueryResults) -> String {
    let mut s = serde_json::to_string(results).expect("labels serialize");
    s.push('\n');
    s
}

pub fn write(results: &QueryResults, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(results)).with_context(|| format!("writing {}", path.display()))
}

pub fn read(path: &Path) -> Result<QueryResults> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let results: QueryResults =
        serde_json::from_str(&text).with_context(|| format!("malformed results file {}", path.display()))?;
    validate(&results).with_context(|| format!("in {}", path.display()))?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rules() {
        assert!(validate(&vec![vec![vec![3, 1], vec![-1]], vec![]]).is_ok());
        assert!(validate(&vec![vec![vec![-1, 2]]]).is_err());
        assert!(validate(&vec![vec![vec![-2]]]).is_err());
        assert!(validate(&vec![vec![vec![4, 4]]]).is_err());
        assert!(validate(&vec![vec![vec![1]; 4]]).is_err());
    }

    #[test]
    fn read_refuses_malformed_json() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        for bad in ["[[1]]", "{\"a\":1}", "[[[1.5]]]", "[[[\"x\"]]]", "not json"] {
            std::fs::write(&p, bad).unwrap();
            assert!(read(&p).is_err(), "{bad}");
        }
        std::fs::write(&p, "[[[2,0]],[[-1],[4]]]").unwrap();
        assert_eq!(read(&p).unwrap(), vec![vec![vec![2, 0]], vec![vec![-1], vec![4]]]);
    }
}
